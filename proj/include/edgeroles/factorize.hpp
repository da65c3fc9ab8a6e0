#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace edgeroles {

enum class Divergence { kFro, kKL, kIS };

const char* divergence_name(Divergence d);
Divergence divergence_from_name(const std::string& name);

struct FitConfig {
  int max_sweeps = 200;
  double rel_tol = 1e-6;   // stop when the relative loss change drops below this
  std::uint64_t seed = 0;
  double eps_div = 1e-10;  // positivity floor for KL / IS approximation entries
  double lambda_u = 0.0;   // ridge weights, quadratic divergence only
  double lambda_v = 0.0;
};

// Non-negative factor pair X ~= U V^T plus the per-sweep objective history.
struct RoleModel {
  Eigen::MatrixXd U;  // m x r, row = edge role memberships
  Eigen::MatrixXd V;  // f x r, row = feature's role contributions
  int rank = 0;
  Divergence divergence = Divergence::kFro;
  std::vector<double> loss_trace;
};

// Sum of per-entry divergences between X and U V^T. KL terms with x = 0
// contribute the approximation value; IS floors x at eps_div.
double bregman_loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
                    const Eigen::MatrixXd& V, Divergence div, double eps_div = 1e-10);

// X - U V^T + u_k v_k^T for column k (0-based). Dense; for verification.
Eigen::MatrixXd residual(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
                         const Eigen::MatrixXd& V, int k);

// Closed-form minimizer of one factor entry given the current approximation.
// `x` and `approx` are the entry's row (or column) of X and of U V^T, `other`
// the matching column of the opposite factor, `current` the entry's value.
double update_scalar(Divergence div, const Eigen::VectorXd& x, const Eigen::VectorXd& approx,
                     const Eigen::VectorXd& other, double current, double eps_div,
                     double lambda = 0.0);

// Alternating scalar coordinate descent on U and V.
RoleModel fit(const Eigen::MatrixXd& X, int rank, Divergence div, const FitConfig& cfg = {});

// Same updates on rows only; V is read-only. Zero rows of X map to zero rows.
Eigen::MatrixXd infer_memberships(const Eigen::MatrixXd& X_new, const Eigen::MatrixXd& V,
                                  Divergence div, const FitConfig& cfg = {});

}  // namespace edgeroles
