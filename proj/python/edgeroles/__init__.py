"""Higher-order role discovery for graph edges.

The heavy lifting lives in the compiled extension; this package re-exports
its surface. A typical session:

    import edgeroles as er
    g = er.load_edgelist("graph.edges")
    feats = er.learn_features(g)
    report = er.select_rank(feats.X, 1, 8, div="kl")
    model = er.fit(feats.X, report.best_rank, div="kl")
    labels = er.assign_roles(model.U)
"""

from ._core import (
    EDGE_ORBITS,
    NODE_ORBITS,
    EntropyRecord,
    EntropySeries,
    FeatureDef,
    Graph,
    HuffmanCost,
    LearnResult,
    MdlRecord,
    MdlReport,
    ModelCost,
    Quantizer,
    RoleDefinitions,
    RoleModel,
    RoleSeries,
    SnapshotSeries,
    aggregate_ops,
    all_ops,
    assign_roles,
    base_edge_features,
    bregman_loss,
    check_drift,
    disagreement,
    edge_graphlets,
    entropy_rank,
    error_bits,
    export_dot,
    fit,
    from_edges,
    huffman_bits,
    infer_memberships,
    infer_series,
    learn_features,
    learn_timescale,
    lloyd_max,
    load_edgelist,
    log_bin,
    materialize,
    model_bits,
    node_graphlets,
    quantize,
    select_rank,
    snapshots,
    train_definitions,
    union_window,
    write_edgelist,
)

__version__ = "0.1.0"

__all__ = [
    "EDGE_ORBITS",
    "NODE_ORBITS",
    "EntropyRecord",
    "EntropySeries",
    "FeatureDef",
    "Graph",
    "HuffmanCost",
    "LearnResult",
    "MdlRecord",
    "MdlReport",
    "ModelCost",
    "Quantizer",
    "RoleDefinitions",
    "RoleModel",
    "RoleSeries",
    "SnapshotSeries",
    "aggregate_ops",
    "all_ops",
    "assign_roles",
    "base_edge_features",
    "bregman_loss",
    "check_drift",
    "disagreement",
    "edge_graphlets",
    "entropy_rank",
    "error_bits",
    "export_dot",
    "fit",
    "from_edges",
    "huffman_bits",
    "infer_memberships",
    "infer_series",
    "learn_features",
    "learn_timescale",
    "lloyd_max",
    "load_edgelist",
    "log_bin",
    "materialize",
    "model_bits",
    "node_graphlets",
    "quantize",
    "select_rank",
    "snapshots",
    "train_definitions",
    "union_window",
    "write_edgelist",
]
