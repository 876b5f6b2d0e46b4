#include "asga/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace asga {

void SampleStore::append(const Eigen::VectorXd& input, double output) {
  if (!inputs_.empty() && input.size() != inputs_.front().size()) {
    throw std::invalid_argument("SampleStore: input dimension mismatch");
  }
  if (!input.allFinite() || !std::isfinite(output)) {
    throw std::invalid_argument("SampleStore: non-finite sample");
  }
  inputs_.push_back(input);
  outputs_.conservativeResize(outputs_.size() + 1);
  outputs_[outputs_.size() - 1] = output;
}

void SampleStore::append(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs) {
  if (inputs.rows() != outputs.size()) throw std::invalid_argument("SampleStore: row count mismatch");
  const Eigen::Index start = outputs_.size();
  outputs_.conservativeResize(start + outputs.size());
  inputs_.reserve(inputs_.size() + inputs.rows());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    if (!inputs.row(i).allFinite() || !std::isfinite(outputs[i])) {
      outputs_.conservativeResize(start);
      throw std::invalid_argument("SampleStore: non-finite sample in batch");
    }
    if (!inputs_.empty() && inputs.cols() != inputs_.front().size()) {
      outputs_.conservativeResize(start);
      throw std::invalid_argument("SampleStore: input dimension mismatch");
    }
    inputs_.push_back(inputs.row(i).transpose());
    outputs_[start + i] = outputs[i];
  }
}

Eigen::MatrixXd SampleStore::inputs_matrix() const {
  Eigen::MatrixXd m(size(), input_dim());
  for (Eigen::Index i = 0; i < size(); ++i) m.row(i) = inputs_[i].transpose();
  return m;
}

AffineScaler::AffineScaler(BoxDomain domain)
    : domain_(std::move(domain)), center_(domain_.center()), half_width_(domain_.half_width()) {}

Eigen::VectorXd AffineScaler::scale(const Eigen::VectorXd& x) const {
  if (x.size() != center_.size()) throw std::invalid_argument("AffineScaler: dimension mismatch");
  return (x - center_).cwiseQuotient(half_width_);
}

Eigen::VectorXd AffineScaler::unscale(const Eigen::VectorXd& z) const {
  if (z.size() != center_.size()) throw std::invalid_argument("AffineScaler: dimension mismatch");
  return center_ + half_width_.cwiseProduct(z);
}

Eigen::MatrixXd AffineScaler::scale_rows(const Eigen::MatrixXd& xs) const {
  if (xs.cols() != center_.size()) throw std::invalid_argument("AffineScaler: dimension mismatch");
  return (xs.rowwise() - center_.transpose()) * half_width_.cwiseInverse().asDiagonal();
}

Eigen::VectorXd ActiveSubspace::forward(const Eigen::VectorXd& x) const {
  return w1().transpose() * scaler.scale(x);
}

Eigen::MatrixXd estimate_gradients_local_linear(const SampleStore& store, const AffineScaler& scaler,
                                                int neighbor_count, GradientDiagnostics* diagnostics) {
  const Eigen::Index n = store.size();
  const Eigen::Index k = store.input_dim();
  if (n < k + 2) {
    throw std::invalid_argument("estimate_gradients_local_linear: need at least k+2 samples");
  }

  const Eigen::MatrixXd scaled = scaler.scale_rows(store.inputs_matrix());
  const Eigen::VectorXd& outputs = store.outputs();

  const Eigen::Index p_default = std::min<Eigen::Index>(
      n, static_cast<Eigen::Index>(std::ceil(1.5 * static_cast<double>(k + 1))) + 2);
  const Eigen::Index p =
      neighbor_count > 0 ? std::min<Eigen::Index>(n, neighbor_count) : p_default;

  Eigen::MatrixXd gradients(n, k);
  std::vector<std::pair<double, Eigen::Index>> order(n);
  Eigen::MatrixXd design(p, k + 1);
  Eigen::VectorXd rhs(p);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      order[j] = {(scaled.row(j) - scaled.row(i)).squaredNorm(), j};
    }
    std::nth_element(order.begin(), order.begin() + (p - 1), order.end());
    std::sort(order.begin(), order.begin() + p);  // ties resolved by sample index

    for (Eigen::Index j = 0; j < p; ++j) {
      const Eigen::Index idx = order[j].second;
      design(j, 0) = 1.0;
      design.row(j).tail(k) = scaled.row(idx) - scaled.row(i);
      rhs[j] = outputs[idx];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    if (cod.rank() < k + 1 && diagnostics) ++diagnostics->rank_deficient_fits;
    gradients.row(i) = cod.solve(rhs).tail(k).transpose();
  }
  return gradients;
}

Eigen::MatrixXd build_covariance(const Eigen::MatrixXd& gradients) {
  if (gradients.rows() < 1) throw std::invalid_argument("build_covariance: need at least one gradient");
  Eigen::MatrixXd c = gradients.transpose() * gradients / static_cast<double>(gradients.rows());
  // The blocked product can leave (i,j) and (j,i) a rounding error apart.
  c = 0.5 * (c + c.transpose()).eval();
  return c;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> decompose(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols()) {
    throw std::invalid_argument("decompose: matrix must be square");
  }
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("decompose: matrix is not symmetric");
  }
  const Eigen::Index k = covariance.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (covariance + covariance.transpose()));
  if (solver.info() != Eigen::Success) throw std::runtime_error("decompose: eigensolver failed");

  // Eigen returns ascending order; flip to descending and fix signs.
  Eigen::VectorXd values(k);
  Eigen::MatrixXd vectors(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    values[i] = solver.eigenvalues()[k - 1 - i];
    vectors.col(i) = solver.eigenvectors().col(k - 1 - i);
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::Index lead = 0;
    for (Eigen::Index j = 1; j < k; ++j) {
      if (std::abs(vectors(j, i)) > std::abs(vectors(lead, i))) lead = j;
    }
    if (vectors(lead, i) < 0.0) vectors.col(i) = -vectors.col(i);
  }
  return {std::move(values), std::move(vectors)};
}

ActiveSubspace build_subspace(const SampleStore& store, const BoxDomain& domain, int active_dim,
                              GradientDiagnostics* diagnostics) {
  const Eigen::Index k = domain.dim();
  if (active_dim < 1 || active_dim >= k) {
    throw std::invalid_argument("build_subspace: active_dim must satisfy 1 <= M < k");
  }
  AffineScaler scaler(domain);
  const Eigen::MatrixXd gradients = estimate_gradients_local_linear(store, scaler, 0, diagnostics);
  auto [values, vectors] = decompose(build_covariance(gradients));
  return ActiveSubspace{std::move(values), std::move(vectors), active_dim, std::move(scaler)};
}

int choose_active_dim(const Eigen::VectorXd& eigenvalues) {
  const Eigen::Index k = eigenvalues.size();
  if (k < 2) throw std::invalid_argument("choose_active_dim: need at least two eigenvalues");
  int best = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j + 1 < k; ++j) {
    const double hi = std::max(eigenvalues[j], 1e-15);
    const double lo = std::max(eigenvalues[j + 1], 1e-15);
    const double gap = std::log10(hi / lo);
    if (gap > best_gap) {
      best_gap = gap;
      best = static_cast<int>(j) + 1;
    }
  }
  return best;
}

BootstrapResult bootstrap_eigenvalues(const SampleStore& store, const BoxDomain& domain, int n_boot,
                                      Rng& rng) {
  if (n_boot < 2) throw std::invalid_argument("bootstrap_eigenvalues: n_boot must be >= 2");
  AffineScaler scaler(domain);
  const Eigen::MatrixXd gradients = estimate_gradients_local_linear(store, scaler);
  const Eigen::Index n = gradients.rows();

  BootstrapResult result;
  result.eigenvalues = decompose(build_covariance(gradients)).first;
  result.intervals.resize(result.eigenvalues.size());
  for (Eigen::Index i = 0; i < result.eigenvalues.size(); ++i) {
    result.intervals[i] = {result.eigenvalues[i], result.eigenvalues[i]};
  }

  Eigen::MatrixXd resampled(n, gradients.cols());
  for (int b = 0; b < n_boot; ++b) {
    for (Eigen::Index i = 0; i < n; ++i) {
      resampled.row(i) = gradients.row(static_cast<Eigen::Index>(rng.uniform_index(n)));
    }
    const Eigen::VectorXd values = decompose(build_covariance(resampled)).first;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      result.intervals[i].low = std::min(result.intervals[i].low, values[i]);
      result.intervals[i].high = std::max(result.intervals[i].high, values[i]);
    }
  }
  return result;
}

}  // namespace asga
