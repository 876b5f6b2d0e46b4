#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "asga/objective.hpp"
#include "asga/rng.hpp"

namespace asga {

/// Append-only archive of evaluated (input, output) pairs in original
/// coordinates; the raw material for every subspace build.
class SampleStore {
 public:
  void append(const Eigen::VectorXd& input, double output);
  void append(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs);

  Eigen::Index size() const { return outputs_.size(); }
  Eigen::Index input_dim() const { return inputs_.empty() ? 0 : inputs_.front().size(); }
  const std::vector<Eigen::VectorXd>& inputs() const { return inputs_; }
  const Eigen::VectorXd& outputs() const { return outputs_; }
  Eigen::MatrixXd inputs_matrix() const;

 private:
  std::vector<Eigen::VectorXd> inputs_;
  Eigen::VectorXd outputs_;
};

/// Bijection between a box domain and [-1,1]^k.
class AffineScaler {
 public:
  explicit AffineScaler(BoxDomain domain);

  Eigen::VectorXd scale(const Eigen::VectorXd& x) const;
  Eigen::VectorXd unscale(const Eigen::VectorXd& z) const;
  /// One sample per row.
  Eigen::MatrixXd scale_rows(const Eigen::MatrixXd& xs) const;

  const BoxDomain& domain() const { return domain_; }

 private:
  BoxDomain domain_;
  Eigen::VectorXd center_;
  Eigen::VectorXd half_width_;
};

/// Eigenstructure of the gradient covariance, split at the active dimension.
struct ActiveSubspace {
  Eigen::VectorXd eigenvalues;   // descending, length k
  Eigen::MatrixXd eigenvectors;  // k x k orthogonal, column i pairs with eigenvalues[i]
  int active_dim = 1;            // M, 1 <= M < k
  AffineScaler scaler;

  Eigen::Index full_dim() const { return eigenvalues.size(); }
  Eigen::Index inactive_dim() const { return full_dim() - active_dim; }
  Eigen::MatrixXd w1() const { return eigenvectors.leftCols(active_dim); }
  Eigen::MatrixXd w2() const { return eigenvectors.rightCols(inactive_dim()); }

  /// Active coordinates of an original-space point: W1^T scale(x).
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
};

struct GradientDiagnostics {
  int rank_deficient_fits = 0;
};

/// Gradient of the response at every stored sample, estimated by fitting an
/// affine model over the p nearest neighbors (Euclidean, scaled coordinates,
/// ties on distance broken by sample index). neighbor_count 0 selects the
/// default p = min(n, ceil(1.5 (k+1)) + 2). Rank-deficient local systems
/// fall back to the minimum-norm least-squares solution and are counted in
/// the diagnostics.
Eigen::MatrixXd estimate_gradients_local_linear(const SampleStore& store, const AffineScaler& scaler,
                                                int neighbor_count = 0,
                                                GradientDiagnostics* diagnostics = nullptr);

/// Monte Carlo estimate C = (1/n) sum_i g_i g_i^T of the uncentered
/// covariance of the gradients (one gradient per row).
Eigen::MatrixXd build_covariance(const Eigen::MatrixXd& gradients);

/// Eigendecomposition of a symmetric C with descending eigenvalues and a
/// deterministic sign convention: each eigenvector's largest-magnitude
/// component is positive (ties resolved toward the lowest index).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> decompose(const Eigen::MatrixXd& covariance);

/// Full pipeline: scale, estimate gradients, average outer products,
/// decompose, split at active_dim.
ActiveSubspace build_subspace(const SampleStore& store, const BoxDomain& domain, int active_dim,
                              GradientDiagnostics* diagnostics = nullptr);

/// Index of the largest spectral gap: argmax_i log10(lambda_i / lambda_{i+1})
/// with eigenvalues floored at 1e-15; first index wins ties.
int choose_active_dim(const Eigen::VectorXd& eigenvalues);

struct EigenvalueInterval {
  double low = 0.0;
  double high = 0.0;
};

struct BootstrapResult {
  Eigen::VectorXd eigenvalues;               // point estimate
  std::vector<EigenvalueInterval> intervals;  // per index, bracket the estimate
};

/// Resamples gradient rows with replacement n_boot times and records the
/// min/max eigenvalue per index (the point estimate is included in the
/// bracket).
BootstrapResult bootstrap_eigenvalues(const SampleStore& store, const BoxDomain& domain, int n_boot,
                                      Rng& rng);

}  // namespace asga
