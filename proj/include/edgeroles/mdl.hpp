#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "edgeroles/factorize.hpp"

namespace edgeroles {

// Scalar quantizer with levels chosen by Lloyd-Max iteration. boundaries
// has one entry fewer than centroids and is strictly increasing; freq counts
// how many training values landed in each cell.
struct Quantizer {
  int levels = 0;
  std::vector<double> boundaries;
  std::vector<double> centroids;
  std::vector<std::int64_t> freq;
  double distortion = 0.0;  // mean squared error on the training values
};

// Builds a quantizer for `values` with at most `b` levels. Asking for more
// levels than there are distinct values silently reduces the level count.
Quantizer lloyd_max(const std::vector<double>& values, int b);

// Maps a value to its cell index in [0, levels).
int quantize(const Quantizer& q, double value);
std::vector<int> quantize(const Quantizer& q, const std::vector<double>& values);

struct HuffmanCost {
  double total_bits = 0.0;
  double mean_bits = 0.0;  // bits per encoded symbol
};

// Cost of an optimal prefix code over the given symbol counts. Zero-count
// symbols are skipped; a lone symbol still pays one bit per occurrence so the
// stream stays delimitable.
HuffmanCost huffman_bits(const std::vector<std::int64_t>& frequencies);

struct ModelCost {
  double kappa = 0.0;  // mean bits per stored factor value
  double value_bits = 0.0;
  double position_bits = 0.0;
  double header_bits = 0.0;
  double total = 0.0;
};

// Description length of the factor pair: nonzero values of U and V quantized
// jointly and Huffman-coded, plus position indices for the nonzeros and a
// small header recording how many there are.
ModelCost model_bits(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V);

// Description length of the data given the model. Divergence losses convert
// from nats to bits; squared error instead codes the residual matrix the same
// way model values are coded, since exact reconstruction needs it spelled out.
double error_bits(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
                  const Eigen::MatrixXd& V, Divergence div);

struct MdlRecord {
  int rank = 0;
  double model_bits = 0.0;
  double error_bits = 0.0;
  double total_bits = 0.0;
  double fit_seconds = 0.0;
};

struct MdlReport {
  std::vector<MdlRecord> records;
  int best_rank = 0;  // argmin of total_bits, smallest rank on ties
};

// Fits every rank in [r_min, r_max] with the same configuration and returns
// the per-rank description lengths together with the winning rank.
MdlReport select_rank(const Eigen::MatrixXd& X, int r_min, int r_max,
                      Divergence div, const FitConfig& cfg = FitConfig{});

}  // namespace edgeroles
