#include "edgeroles/factorize.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace edgeroles {

namespace {

double entry_div(Divergence div, double x, double xp, double eps) {
  switch (div) {
    case Divergence::kFro: {
      const double d = x - xp;
      return 0.5 * d * d;
    }
    case Divergence::kKL: {
      const double xpe = std::max(xp, eps);
      if (x == 0.0) return xpe;
      return x * std::log(x / xpe) - x + xpe;
    }
    case Divergence::kIS: {
      const double xe = std::max(x, eps);
      const double r = xe / std::max(xp, eps);
      return r - std::log(r) - 1.0;
    }
  }
  return 0.0;
}

double loss_against(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Xp, Divergence div,
                    double eps) {
  double loss = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double x = X(i, j);
      if (x < 0.0) throw std::domain_error("negative entry in data matrix");
      loss += entry_div(div, x, Xp(i, j), eps);
    }
  return loss;
}

void check_nonnegative(const Eigen::MatrixXd& X) {
  if ((X.array() < 0.0).any()) throw std::domain_error("data matrix must be non-negative");
  if (!X.allFinite()) throw std::domain_error("data matrix must be finite");
}

// change in the objective along one scalar move, restricted to the affected row
double objective_delta(Divergence div, const Eigen::VectorXd& x, const Eigen::VectorXd& approx,
                       const Eigen::VectorXd& other, double delta, double eps) {
  double dg = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xp_new = approx[i] + delta * other[i];
    dg += entry_div(div, x[i], xp_new, eps) - entry_div(div, x[i], approx[i], eps);
  }
  return dg;
}

// one coordinate move with a descent safeguard for the non-quadratic divergences
double guarded_step(Divergence div, const Eigen::VectorXd& x, const Eigen::VectorXd& approx,
                    const Eigen::VectorXd& other, double current, double eps, double lambda) {
  double cand = update_scalar(div, x, approx, other, current, eps, lambda);
  if (div == Divergence::kFro) return cand;  // exact minimizer of the scalar problem
  double delta = cand - current;
  if (delta == 0.0) return current;
  for (int tries = 0; tries < 40; ++tries) {
    if (objective_delta(div, x, approx, other, delta, eps) <= 0.0) return current + delta;
    delta *= 0.5;
  }
  return current;
}

struct Prepared {
  Eigen::MatrixXd X;  // effective data (IS entries floored)
};

Prepared prepare(const Eigen::MatrixXd& X, Divergence div, const FitConfig& cfg) {
  check_nonnegative(X);
  if (cfg.eps_div <= 0.0) throw std::invalid_argument("eps_div must be positive");
  if (cfg.rel_tol <= 0.0) throw std::invalid_argument("rel_tol must be positive");
  if (cfg.max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");
  if ((cfg.lambda_u != 0.0 || cfg.lambda_v != 0.0) && div != Divergence::kFro)
    throw std::invalid_argument("ridge regularization applies to the quadratic divergence only");
  Prepared p;
  p.X = div == Divergence::kIS ? X.cwiseMax(cfg.eps_div).eval() : X;
  return p;
}

Eigen::MatrixXd random_factor(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = 1.0 - unit(rng);  // (0, 1]
  return M;
}

void scale_to_data_mean(const Eigen::MatrixXd& X, Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
  const double approx_mean =
      U.colwise().sum().dot(V.colwise().sum()) / static_cast<double>(X.size());
  const double data_mean = X.mean();
  if (approx_mean > 0.0 && data_mean > 0.0) U *= data_mean / approx_mean;
}

bool converged(const std::vector<double>& trace, double rel_tol) {
  const std::size_t n = trace.size();
  if (n < 2) return false;
  const double prev = trace[n - 2], cur = trace[n - 1];
  if (prev == 0.0) return true;
  return std::abs(prev - cur) / std::max(std::abs(prev), 1e-300) < rel_tol;
}

}  // namespace

const char* divergence_name(Divergence d) {
  switch (d) {
    case Divergence::kFro: return "fro";
    case Divergence::kKL: return "kl";
    case Divergence::kIS: return "is";
  }
  return "?";
}

Divergence divergence_from_name(const std::string& name) {
  if (name == "fro") return Divergence::kFro;
  if (name == "kl") return Divergence::kKL;
  if (name == "is") return Divergence::kIS;
  throw std::invalid_argument("unknown divergence: " + name);
}

double bregman_loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
                    const Eigen::MatrixXd& V, Divergence div, double eps_div) {
  if (U.rows() != X.rows() || V.rows() != X.cols() || U.cols() != V.cols())
    throw std::invalid_argument("factor shapes do not match the data matrix");
  const Eigen::MatrixXd Xp = U * V.transpose();
  return loss_against(X, Xp, div, eps_div);
}

Eigen::MatrixXd residual(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
                         const Eigen::MatrixXd& V, int k) {
  if (U.rows() != X.rows() || V.rows() != X.cols() || U.cols() != V.cols())
    throw std::invalid_argument("factor shapes do not match the data matrix");
  if (k < 0 || k >= U.cols()) throw std::out_of_range("component index out of range");
  return X - U * V.transpose() + U.col(k) * V.col(k).transpose();
}

double update_scalar(Divergence div, const Eigen::VectorXd& x, const Eigen::VectorXd& approx,
                     const Eigen::VectorXd& other, double current, double eps_div,
                     double lambda) {
  if (x.size() != approx.size() || x.size() != other.size())
    throw std::invalid_argument("vector lengths do not match");
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = other[i];
    if (u == 0.0) continue;
    const double xk = x[i] - approx[i] + u * current;
    double w = 1.0;
    if (div != Divergence::kFro) {
      const double xpe = std::max(approx[i], eps_div);
      w = div == Divergence::kKL ? 1.0 / xpe : 1.0 / (xpe * xpe);
    }
    num += w * u * xk;
    den += w * u * u;
  }
  if (div == Divergence::kFro) den += lambda;
  if (den <= 0.0) return 0.0;
  return std::max(num / den, 0.0);
}

RoleModel fit(const Eigen::MatrixXd& X, int rank, Divergence div, const FitConfig& cfg) {
  const Eigen::Index m = X.rows(), f = X.cols();
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  if (rank > std::min(m, f))
    throw std::invalid_argument("rank exceeds the smaller data dimension");
  Prepared prep = prepare(X, div, cfg);
  const Eigen::MatrixXd& Xe = prep.X;

  std::mt19937_64 rng(cfg.seed);
  RoleModel model;
  model.rank = rank;
  model.divergence = div;
  model.U = random_factor(m, rank, rng);
  model.V = random_factor(f, rank, rng);
  scale_to_data_mean(Xe, model.U, model.V);
  for (Eigen::Index i = 0; i < m; ++i)
    if (Xe.row(i).sum() == 0.0) model.U.row(i).setConstant(cfg.eps_div);
  for (Eigen::Index j = 0; j < f; ++j)
    if (Xe.col(j).sum() == 0.0) model.V.row(j).setConstant(cfg.eps_div);

  Eigen::MatrixXd& U = model.U;
  Eigen::MatrixXd& V = model.V;
  Eigen::MatrixXd Xp = U * V.transpose();
  const double penalty_scale = 0.5;
  auto objective = [&]() {
    double loss = loss_against(Xe, Xp, div, cfg.eps_div);
    if (cfg.lambda_u != 0.0) loss += penalty_scale * cfg.lambda_u * U.squaredNorm();
    if (cfg.lambda_v != 0.0) loss += penalty_scale * cfg.lambda_v * V.squaredNorm();
    return loss;
  };
  model.loss_trace.push_back(objective());

  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    for (int k = 0; k < rank; ++k) {
      // row memberships for component k; rows touch disjoint slices of the
      // approximation, so this phase is deterministic under parallelism
#pragma omp parallel for schedule(static)
      for (Eigen::Index i = 0; i < m; ++i) {
        const double old = U(i, k);
        const double next = guarded_step(div, Xe.row(i), Xp.row(i), V.col(k), old,
                                         cfg.eps_div, cfg.lambda_u);
        if (next != old) {
          Xp.row(i) += (next - old) * V.col(k).transpose();
          U(i, k) = next;
        }
      }
#pragma omp parallel for schedule(static)
      for (Eigen::Index j = 0; j < f; ++j) {
        const double old = V(j, k);
        const double next = guarded_step(div, Xe.col(j), Xp.col(j), U.col(k), old,
                                         cfg.eps_div, cfg.lambda_v);
        if (next != old) {
          Xp.col(j) += (next - old) * U.col(k);
          V(j, k) = next;
        }
      }
    }
    Xp = U * V.transpose();  // clear accumulated drift before measuring
    model.loss_trace.push_back(objective());
    if (converged(model.loss_trace, cfg.rel_tol)) break;
  }
  return model;
}

Eigen::MatrixXd infer_memberships(const Eigen::MatrixXd& X_new, const Eigen::MatrixXd& V,
                                  Divergence div, const FitConfig& cfg) {
  if (X_new.cols() != V.rows())
    throw std::invalid_argument("feature count does not match the role definitions");
  const Eigen::Index m = X_new.rows();
  const auto rank = static_cast<int>(V.cols());
  Prepared prep = prepare(X_new, div, cfg);
  const Eigen::MatrixXd& Xe = prep.X;

  std::mt19937_64 rng(cfg.seed);
  Eigen::MatrixXd U = random_factor(m, rank, rng);
  scale_to_data_mean(Xe, U, V);

  // nothing observed on a row means no memberships, for every divergence
  std::vector<char> active(m, 1);
  for (Eigen::Index i = 0; i < m; ++i)
    if (X_new.row(i).sum() == 0.0) {
      U.row(i).setZero();
      active[i] = 0;
    }

  Eigen::MatrixXd Xp = U * V.transpose();
  std::vector<double> trace{loss_against(Xe, Xp, div, cfg.eps_div)};
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    for (int k = 0; k < rank; ++k) {
#pragma omp parallel for schedule(static)
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!active[i]) continue;
        const double old = U(i, k);
        const double next =
            guarded_step(div, Xe.row(i), Xp.row(i), V.col(k), old, cfg.eps_div, 0.0);
        if (next != old) {
          Xp.row(i) += (next - old) * V.col(k).transpose();
          U(i, k) = next;
        }
      }
    }
    Xp = U * V.transpose();
    trace.push_back(loss_against(Xe, Xp, div, cfg.eps_div));
    if (converged(trace, cfg.rel_tol)) break;
  }
  return U;
}

}  // namespace edgeroles
