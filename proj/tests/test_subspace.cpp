#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "asga/objective.hpp"
#include "asga/rng.hpp"
#include "asga/subspace.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace asga;

namespace {

// Uniform samples of fn over the box, in a store.
template <typename Fn>
SampleStore sample_store(const BoxDomain& box, int n, Fn fn, std::uint64_t seed) {
  Rng rng(seed);
  SampleStore store;
  for (int i = 0; i < n; ++i) {
    VectorXd x(box.dim());
    for (int j = 0; j < box.dim(); ++j) x[j] = rng.uniform(box.lower()[j], box.upper()[j]);
    store.append(x, fn(x));
  }
  return store;
}

}  // namespace

TEST_CASE("scaler round trip and center") {
  const BoxDomain box = BoxDomain::cube(3, -5.0, 10.0);
  const AffineScaler scaler(box);
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    VectorXd z(3);
    for (int j = 0; j < 3; ++j) z[j] = rng.uniform(-1.0, 1.0);
    CHECK((scaler.scale(scaler.unscale(z)) - z).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(scaler.scale(box.center()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((scaler.scale(box.upper()) - VectorXd::Ones(3)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("gradients of exact affine data recover the slope for any neighbor count") {
  const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);  // identity scaling
  auto affine = [](const VectorXd& x) { return 3.0 * x[0] - 2.0 * x[1] + 0.25; };
  const SampleStore store = sample_store(box, 40, affine, 3);
  const AffineScaler scaler(box);
  for (int p : {0, 3, 4, 7, 20, 40}) {
    const MatrixXd grads = estimate_gradients_local_linear(store, scaler, p);
    for (Eigen::Index i = 0; i < grads.rows(); ++i) {
      CHECK(std::abs(grads(i, 0) - 3.0) < 1e-8);
      CHECK(std::abs(grads(i, 1) + 2.0) < 1e-8);
    }
  }
}

TEST_CASE("constant outputs give zero gradients") {
  const BoxDomain box = BoxDomain::cube(3, 0.0, 1.0);
  const SampleStore store = sample_store(box, 20, [](const VectorXd&) { return 4.2; }, 5);
  const MatrixXd grads = estimate_gradients_local_linear(store, AffineScaler(box));
  CHECK(grads.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("gradient sign matches 2x on a segment of x^2 samples") {
  // Samples on the e1 axis of a 2-D box; local systems are collinear and
  // rank-deficient, the minimum-norm fallback must still get the sign right.
  const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
  SampleStore store;
  for (double t : {-1.0, -0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, -0.2,
                   0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    VectorXd x(2);
    x << t, 0.0;
    store.append(x, t * t);
  }
  GradientDiagnostics diag;
  const MatrixXd grads = estimate_gradients_local_linear(store, AffineScaler(box), 0, &diag);
  CHECK(diag.rank_deficient_fits == store.size());
  for (Eigen::Index i = 0; i < store.size(); ++i) {
    const double t = store.inputs()[i][0];
    CHECK(grads(i, 0) * (2.0 * t) > 0.0);
  }
}

TEST_CASE("covariance equals the brute-force outer-product average") {
  MatrixXd g(5, 3);
  Rng rng(17);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 3; ++j) g(i, j) = rng.normal(0.0, 1.0);
  }
  const MatrixXd c = build_covariance(g);
  MatrixXd oracle = MatrixXd::Zero(3, 3);
  for (int i = 0; i < 5; ++i) {
    for (int r = 0; r < 3; ++r) {
      for (int s = 0; s < 3; ++s) oracle(r, s) += g(i, r) * g(i, s) / 5.0;
    }
  }
  CHECK((c - oracle).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant gradient directions collapse the covariance") {
  MatrixXd g(4, 2);
  g << 1, 0, 1, 0, -1, 0, -1, 0;  // signs cancel in the outer product
  const MatrixXd c = build_covariance(g);
  CHECK(c(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(c(0, 1)) < 1e-15);
  CHECK(std::abs(c(1, 1)) < 1e-15);
}

TEST_CASE("decompose orders eigenvalues and fixes signs") {
  MatrixXd c(2, 2);
  c << 4, 0, 0, 1;
  const auto [values, vectors] = decompose(c);
  CHECK(values[0] == doctest::Approx(4.0));
  CHECK(values[1] == doctest::Approx(1.0));
  CHECK((vectors - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  // uniform gradient (1, 0): leading eigenvector is +e1 by the convention
  MatrixXd g(3, 2);
  g << 1, 0, 1, 0, 1, 0;
  const auto [lv, lw] = decompose(build_covariance(g));
  CHECK(lw(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(lw(1, 0)) < 1e-12);
}

TEST_CASE("decompose round-trips a rotation-built matrix") {
  const double theta = 0.7;
  MatrixXd r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const MatrixXd c = r * d * r.transpose();
  const auto [values, vectors] = decompose(0.5 * (c + c.transpose()));
  CHECK(values[0] == doctest::Approx(3.0));
  CHECK(values[1] == doctest::Approx(1.0));
  for (int i = 0; i < 2; ++i) {
    const double diff_plus = (vectors.col(i) - r.col(i)).norm();
    const double diff_minus = (vectors.col(i) + r.col(i)).norm();
    CHECK(std::min(diff_plus, diff_minus) < 1e-9);
  }
}

TEST_CASE("decompose rejects asymmetric matrices") {
  MatrixXd c(2, 2);
  c << 1, 0.5, 0.1, 1;
  CHECK_THROWS_AS(decompose(c), std::invalid_argument);
}

TEST_CASE("1-d subspace of a linear function recovers the coefficient direction") {
  const int k = 10;
  Rng rng(41);
  VectorXd coeff(k);
  for (int j = 0; j < k; ++j) coeff[j] = rng.normal(0.0, 1.0);
  const BoxDomain box = BoxDomain::cube(k, -1.0, 1.0);
  const SampleStore store =
      sample_store(box, 200, [&](const VectorXd& x) { return coeff.dot(x); }, 42);
  const ActiveSubspace subspace = build_subspace(store, box, 1);

  const VectorXd unit = coeff / coeff.norm();
  const VectorXd w1 = subspace.w1().col(0);
  const double diff = std::min((w1 - unit).cwiseAbs().maxCoeff(), (w1 + unit).cwiseAbs().maxCoeff());
  CHECK(diff < 1e-6);
  CHECK(subspace.eigenvalues[1] < 1e-12 * subspace.eigenvalues[0]);
}

TEST_CASE("orthogonality and reconstruction identity") {
  const BoxDomain box = BoxDomain::cube(4, -2.0, 3.0);
  const SampleStore store = sample_store(
      box, 80, [](const VectorXd& x) { return x.squaredNorm() + std::sin(x[0]); }, 7);
  const ActiveSubspace subspace = build_subspace(store, box, 2);

  const MatrixXd w = subspace.eigenvectors;
  CHECK((w.transpose() * w - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);

  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd x(4);
    for (int j = 0; j < 4; ++j) x[j] = rng.uniform(box.lower()[j], box.upper()[j]);
    const VectorXd z = subspace.scaler.scale(x);
    const VectorXd rebuilt = subspace.scaler.unscale(
        subspace.w1() * (subspace.w1().transpose() * z) + subspace.w2() * (subspace.w2().transpose() * z));
    CHECK((rebuilt - x).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("eigenvalues are nonnegative and scale quadratically with the outputs") {
  const BoxDomain box = BoxDomain::cube(3, -1.0, 2.0);
  auto fn = [](const VectorXd& x) { return x[0] * x[0] + 0.5 * x[1] - 0.1 * x[2]; };
  const SampleStore base = sample_store(box, 60, fn, 13);
  SampleStore scaled;
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    scaled.append(base.inputs()[i], 5.0 * base.outputs()[i]);
  }
  const ActiveSubspace s1 = build_subspace(base, box, 1);
  const ActiveSubspace s2 = build_subspace(scaled, box, 1);
  CHECK(s1.eigenvalues.minCoeff() > -1e-10);
  for (int i = 0; i < 3; ++i) {
    CHECK(s2.eigenvalues[i] == doctest::Approx(25.0 * s1.eigenvalues[i]).epsilon(1e-9));
  }
  CHECK((s1.eigenvectors - s2.eigenvectors).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("forward projects scaled coordinates") {
  const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
  const SampleStore store =
      sample_store(box, 30, [](const VectorXd& x) { return x[0]; }, 19);
  const ActiveSubspace subspace = build_subspace(store, box, 1);
  // W1 = e1 for f(x) = x1
  VectorXd x(2);
  x << 0.3, -0.7;
  CHECK(subspace.forward(x)[0] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(subspace.forward(box.center()).cwiseAbs().maxCoeff() < 1e-12);

  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    VectorXd y(2);
    y << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    const VectorXd oracle = subspace.w1().transpose() * subspace.scaler.scale(y);
    CHECK((subspace.forward(y) - oracle).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("choose_active_dim picks the largest spectral gap") {
  VectorXd a(3);
  a << 1.0, 1e-6, 1e-7;
  CHECK(choose_active_dim(a) == 1);
  VectorXd b(3);
  b << 5.0, 4.9, 0.001;
  CHECK(choose_active_dim(b) == 2);
  VectorXd c = VectorXd::Constant(4, 2.0);
  CHECK(choose_active_dim(c) == 1);  // ties resolve to the first gap
  VectorXd d(3);
  d << 1.0, 0.0, 0.0;  // zero tail is floored, gap sits at index 1
  CHECK(choose_active_dim(d) == 1);
}

TEST_CASE("bootstrap intervals bracket the estimate and collapse for identical rows") {
  const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
  // exact affine data -> identical gradient rows -> zero resampling variance
  const SampleStore store =
      sample_store(box, 25, [](const VectorXd& x) { return 2.0 * x[0] - x[1]; }, 29);
  Rng rng(31);
  const BootstrapResult result = bootstrap_eigenvalues(store, box, 50, rng);
  for (Eigen::Index i = 0; i < result.eigenvalues.size(); ++i) {
    CHECK(result.intervals[i].high - result.intervals[i].low < 1e-9);
    CHECK(result.intervals[i].low <= result.eigenvalues[i]);
    CHECK(result.intervals[i].high >= result.eigenvalues[i]);
  }

  // mixed data: intervals still bracket, reruns with the same seed agree
  const SampleStore mixed = sample_store(
      box, 40, [](const VectorXd& x) { return x[0] * x[0] + x[1]; }, 37);
  Rng r1(5), r2(5);
  const BootstrapResult b1 = bootstrap_eigenvalues(mixed, box, 100, r1);
  const BootstrapResult b2 = bootstrap_eigenvalues(mixed, box, 100, r2);
  for (Eigen::Index i = 0; i < b1.eigenvalues.size(); ++i) {
    CHECK(b1.intervals[i].low <= b1.eigenvalues[i]);
    CHECK(b1.intervals[i].high >= b1.eigenvalues[i]);
    CHECK(b1.intervals[i].low == b2.intervals[i].low);
    CHECK(b1.intervals[i].high == b2.intervals[i].high);
  }
}

TEST_CASE("build_subspace validates its arguments") {
  const BoxDomain box = BoxDomain::cube(3, 0.0, 1.0);
  const SampleStore store = sample_store(box, 10, [](const VectorXd& x) { return x[0]; }, 1);
  CHECK_THROWS_AS(build_subspace(store, box, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_subspace(store, box, 3), std::invalid_argument);
  SampleStore tiny;
  tiny.append(VectorXd::Zero(3), 0.0);
  CHECK_THROWS_AS(build_subspace(tiny, box, 1), std::invalid_argument);
}
