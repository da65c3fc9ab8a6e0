#include "edgeroles/mdl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace edgeroles {

namespace {

// ceil(log2(n)) for positive n; 0 when a single option needs no index bits.
double ceil_log2(std::int64_t n) {
  if (n <= 1) return 0.0;
  double bits = 0.0;
  std::int64_t span = 1;
  while (span < n) {
    span <<= 1;
    bits += 1.0;
  }
  return bits;
}

std::vector<double> collect_nonzeros(const Eigen::MatrixXd& M) {
  std::vector<double> out;
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      if (M(i, j) != 0.0) out.push_back(M(i, j));
  return out;
}

double mean_squared_error(const std::vector<double>& values, const Quantizer& q) {
  double err = 0.0;
  for (double x : values) {
    const double d = x - q.centroids[static_cast<std::size_t>(quantize(q, x))];
    err += d * d;
  }
  return err / static_cast<double>(values.size());
}

// Value bits for a sparse matrix entry set: quantize the nonzeros with the
// given bin budget, then charge Huffman lengths plus per-entry position bits.
double sparse_code_bits(const std::vector<double>& nonzeros, int bins,
                        double bits_per_position) {
  if (nonzeros.empty()) return 0.0;
  Quantizer q = lloyd_max(nonzeros, bins);
  HuffmanCost code = huffman_bits(q.freq);
  return code.total_bits + bits_per_position * static_cast<double>(nonzeros.size());
}

}  // namespace

Quantizer lloyd_max(const std::vector<double>& values, int b) {
  if (values.empty()) throw std::invalid_argument("lloyd_max: no values");
  if (b < 1) throw std::invalid_argument("lloyd_max: bin count must be positive");
  for (double x : values)
    if (!std::isfinite(x)) throw std::invalid_argument("lloyd_max: non-finite value");

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < n; ++i) distinct += sorted[i] != sorted[i - 1];
  const int levels = std::min<std::int64_t>(b, static_cast<std::int64_t>(distinct));

  Quantizer q;
  q.levels = levels;
  if (levels == 1) {
    q.centroids = {std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                   static_cast<double>(n)};
    q.freq = {static_cast<std::int64_t>(n)};
    q.distortion = mean_squared_error(values, q);
    return q;
  }

  // start from equal-count chunks of the sorted data
  q.centroids.resize(levels);
  for (int k = 0; k < levels; ++k) {
    const std::size_t lo = n * k / levels;
    const std::size_t hi = n * (k + 1) / levels;
    q.centroids[k] = std::accumulate(sorted.begin() + lo, sorted.begin() + hi, 0.0) /
                     static_cast<double>(hi - lo);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 200; ++iter) {
    q.boundaries.assign(levels - 1, 0.0);
    for (int k = 0; k + 1 < levels; ++k)
      q.boundaries[k] = 0.5 * (q.centroids[k] + q.centroids[k + 1]);

    bool changed = false;
    std::vector<double> sum(levels, 0.0);
    std::vector<std::int64_t> count(levels, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int sym = quantize(q, sorted[i]);
      changed |= sym != assign[i];
      assign[i] = sym;
      sum[sym] += sorted[i];
      count[sym] += 1;
    }
    q.freq.assign(count.begin(), count.end());
    if (!changed) break;
    for (int k = 0; k < levels; ++k)
      if (count[k] > 0) q.centroids[k] = sum[k] / static_cast<double>(count[k]);
  }

  // drop cells that ended up empty or collapsed onto a neighbor
  std::vector<double> kept;
  std::vector<std::int64_t> kept_freq;
  for (int k = 0; k < levels; ++k) {
    if (q.freq[k] == 0) continue;
    if (!kept.empty() && q.centroids[k] == kept.back()) {
      kept_freq.back() += q.freq[k];
      continue;
    }
    kept.push_back(q.centroids[k]);
    kept_freq.push_back(q.freq[k]);
  }
  q.levels = static_cast<int>(kept.size());
  q.centroids = std::move(kept);
  q.freq = std::move(kept_freq);
  q.boundaries.assign(q.levels - 1, 0.0);
  for (int k = 0; k + 1 < q.levels; ++k)
    q.boundaries[k] = 0.5 * (q.centroids[k] + q.centroids[k + 1]);
  q.distortion = mean_squared_error(values, q);
  return q;
}

int quantize(const Quantizer& q, double value) {
  if (q.levels <= 0) throw std::logic_error("quantize: empty quantizer");
  const auto it = std::upper_bound(q.boundaries.begin(), q.boundaries.end(), value);
  return static_cast<int>(it - q.boundaries.begin());
}

std::vector<int> quantize(const Quantizer& q, const std::vector<double>& values) {
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = quantize(q, values[i]);
  return out;
}

HuffmanCost huffman_bits(const std::vector<std::int64_t>& frequencies) {
  std::vector<std::int64_t> counts;
  for (std::int64_t f : frequencies) {
    if (f < 0) throw std::invalid_argument("huffman_bits: negative count");
    if (f > 0) counts.push_back(f);
  }
  if (counts.empty()) throw std::invalid_argument("huffman_bits: no positive counts");

  const double n = static_cast<double>(
      std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
  HuffmanCost cost;
  if (counts.size() == 1) {
    // a zero-length code could not delimit values
    cost.total_bits = n;
    cost.mean_bits = 1.0;
    return cost;
  }

  // classic merge: each combination's weight equals the bits that merge adds
  std::priority_queue<std::int64_t, std::vector<std::int64_t>, std::greater<>> heap(
      counts.begin(), counts.end());
  std::int64_t total = 0;
  while (heap.size() > 1) {
    std::int64_t a = heap.top();
    heap.pop();
    std::int64_t b = heap.top();
    heap.pop();
    total += a + b;
    heap.push(a + b);
  }
  cost.total_bits = static_cast<double>(total);
  cost.mean_bits = cost.total_bits / n;
  return cost;
}

ModelCost model_bits(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
  if (U.cols() != V.cols())
    throw std::invalid_argument("model_bits: factor rank mismatch");
  const std::int64_t m = U.rows();
  const std::int64_t f = V.rows();
  const std::int64_t r = U.cols();

  std::vector<double> pool = collect_nonzeros(U);
  const std::size_t nnz_u = pool.size();
  std::vector<double> v_vals = collect_nonzeros(V);
  const std::size_t nnz_v = v_vals.size();
  pool.insert(pool.end(), v_vals.begin(), v_vals.end());

  ModelCost cost;
  cost.header_bits = ceil_log2(m * r + 1) + ceil_log2(f * r + 1);
  if (!pool.empty()) {
    const int bins = std::max(1, static_cast<int>(ceil_log2(std::max(m, std::int64_t{2}))));
    Quantizer q = lloyd_max(pool, bins);
    HuffmanCost code = huffman_bits(q.freq);
    cost.kappa = code.mean_bits;
    cost.value_bits = code.total_bits;
  }
  cost.position_bits =
      static_cast<double>(nnz_u) * (ceil_log2(m) + ceil_log2(r)) +
      static_cast<double>(nnz_v) * (ceil_log2(f) + ceil_log2(r));
  cost.total = cost.value_bits + cost.position_bits + cost.header_bits;
  return cost;
}

double error_bits(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
                  const Eigen::MatrixXd& V, Divergence div) {
  if (div != Divergence::kFro) return bregman_loss(X, U, V, div) / std::log(2.0);

  if (X.rows() != U.rows() || X.cols() != V.rows() || U.cols() != V.cols())
    throw std::invalid_argument("error_bits: shape mismatch");
  const std::int64_t m = X.rows();
  const std::int64_t f = X.cols();
  const Eigen::MatrixXd E = X - U * V.transpose();
  const std::vector<double> nonzeros = collect_nonzeros(E);
  const int bins = std::max(1, static_cast<int>(ceil_log2(std::max(m, std::int64_t{2}))));
  return ceil_log2(m * f + 1) +
         sparse_code_bits(nonzeros, bins, ceil_log2(m) + ceil_log2(f));
}

MdlReport select_rank(const Eigen::MatrixXd& X, int r_min, int r_max,
                      Divergence div, const FitConfig& cfg) {
  if (r_min < 1 || r_min > r_max)
    throw std::invalid_argument("select_rank: need 1 <= r_min <= r_max");
  if (r_max > std::min(X.rows(), X.cols()))
    throw std::invalid_argument("select_rank: r_max exceeds matrix dimensions");

  MdlReport report;
  report.records.resize(static_cast<std::size_t>(r_max - r_min + 1));
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = r_min; r <= r_max; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    RoleModel model = fit(X, r, div, cfg);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
    MdlRecord& rec = report.records[static_cast<std::size_t>(r - r_min)];
    rec.rank = r;
    rec.model_bits = model_bits(model.U, model.V).total;
    rec.error_bits = error_bits(X, model.U, model.V, div);
    rec.total_bits = rec.model_bits + rec.error_bits;
    rec.fit_seconds = elapsed.count();
  }

  report.best_rank = report.records.front().rank;
  double best = report.records.front().total_bits;
  for (const MdlRecord& rec : report.records)
    if (rec.total_bits < best) {
      best = rec.total_bits;
      report.best_rank = rec.rank;
    }
  return report;
}

}  // namespace edgeroles
