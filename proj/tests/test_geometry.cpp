#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "asga/geometry.hpp"
#include "asga/objective.hpp"
#include "asga/rng.hpp"
#include "asga/subspace.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace asga;

namespace {

Polytope box_polytope(int q, double half) {
  Polytope p;
  p.a.resize(2 * q, q);
  p.a.topRows(q) = MatrixXd::Identity(q, q);
  p.a.bottomRows(q) = -MatrixXd::Identity(q, q);
  p.b = VectorXd::Constant(2 * q, half);
  return p;
}

// Exhaustive vertex-enumeration oracle for max c^T x s.t. A x <= b on a
// bounded feasible polytope: the optimum sits on a vertex, i.e. the
// solution of some q-subset of tight constraints.
double vertex_oracle(const MatrixXd& a, const VectorXd& b, const VectorXd& c) {
  const int m = static_cast<int>(a.rows());
  const int q = static_cast<int>(a.cols());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick(q);
  // enumerate q-combinations of row indices
  std::function<void(int, int)> recurse = [&](int start, int chosen) {
    if (chosen == q) {
      MatrixXd sys(q, q);
      VectorXd rhs(q);
      for (int i = 0; i < q; ++i) {
        sys.row(i) = a.row(pick[i]);
        rhs[i] = b[pick[i]];
      }
      Eigen::FullPivLU<MatrixXd> lu(sys);
      if (!lu.isInvertible()) return;
      const VectorXd x = lu.solve(rhs);
      if (((a * x - b).array() <= 1e-9).all()) best = std::max(best, c.dot(x));
      return;
    }
    for (int i = start; i < m; ++i) {
      pick[chosen] = i;
      recurse(i + 1, chosen + 1);
    }
  };
  recurse(0, 0);
  return best;
}

ActiveSubspace make_subspace(const MatrixXd& w, int active_dim, const BoxDomain& box) {
  return ActiveSubspace{VectorXd::LinSpaced(w.cols(), w.cols(), 1), w, active_dim, AffineScaler(box)};
}

MatrixXd rotation2(double theta) {
  MatrixXd r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

MatrixXd random_orthogonal(int k, Rng& rng) {
  MatrixXd m(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) m(i, j) = rng.normal(0.0, 1.0);
  }
  return Eigen::HouseholderQR<MatrixXd>(m).householderQ();
}

}  // namespace

TEST_CASE("simplex agrees with vertex enumeration on random small LPs") {
  Rng rng(2024);
  int solved = 0;
  while (solved < 50) {
    const int q = 2 + static_cast<int>(rng.uniform_index(4));  // 2..5
    const int extra = 1 + static_cast<int>(rng.uniform_index(12 - 2 * q > 0 ? 12 - 2 * q : 1));
    MatrixXd a(extra + 2 * q, q);
    VectorXd b(extra + 2 * q);
    for (int i = 0; i < extra; ++i) {
      VectorXd row(q);
      for (int j = 0; j < q; ++j) row[j] = rng.normal(0.0, 1.0);
      a.row(i) = row.normalized();
      b[i] = rng.uniform(0.2, 1.5);  // origin strictly feasible
    }
    a.middleRows(extra, q) = MatrixXd::Identity(q, q);
    a.bottomRows(q) = -MatrixXd::Identity(q, q);
    b.segment(extra, 2 * q).setConstant(10.0);  // bounding box keeps it finite
    VectorXd c(q);
    for (int j = 0; j < q; ++j) c[j] = rng.normal(0.0, 1.0);

    const LpResult lp = solve_lp_max(a, b, c, std::vector<bool>(q, false));
    REQUIRE(lp.status == LpStatus::optimal);
    const double oracle = vertex_oracle(a, b, c);
    CHECK(lp.objective_value == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(((a * lp.point - b).array() <= 1e-7).all());
    ++solved;
  }
}

TEST_CASE("simplex detects infeasible and unbounded problems") {
  // x <= -1 and -x <= 0 cannot hold together
  MatrixXd a(2, 1);
  a << 1, -1;
  VectorXd b(2);
  b << -1, 0;
  VectorXd c(1);
  c << 1;
  CHECK(solve_lp_max(a, b, c, {false}).status == LpStatus::infeasible);

  // max x with only x >= -1: unbounded above
  MatrixXd a2(1, 1);
  a2 << -1;
  VectorXd b2(1);
  b2 << 1;
  CHECK(solve_lp_max(a2, b2, c, {false}).status == LpStatus::unbounded);
}

TEST_CASE("chebyshev center of interval and box") {
  const Polytope interval = box_polytope(1, 1.0);
  const ChebyshevResult c1 = chebyshev_center(interval);
  REQUIRE(c1.status == LpStatus::optimal);
  CHECK(std::abs(c1.center[0]) < 1e-9);
  CHECK(c1.radius == doctest::Approx(1.0).epsilon(1e-9));

  const Polytope box = box_polytope(2, 1.0);
  const ChebyshevResult c2 = chebyshev_center(box);
  REQUIRE(c2.status == LpStatus::optimal);
  CHECK(c2.center.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(c2.radius == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("chebyshev center of the triangle matches a grid search") {
  // {x >= 0, y >= 0, x + y <= 1}
  Polytope tri;
  tri.a.resize(3, 2);
  tri.a << -1, 0, 0, -1, 1, 1;
  tri.b.resize(3);
  tri.b << 0, 0, 1;
  const ChebyshevResult result = chebyshev_center(tri);
  REQUIRE(result.status == LpStatus::optimal);

  double best_radius = -1.0;
  double best_x = 0.0, best_y = 0.0;
  const double sqrt2 = std::sqrt(2.0);
  for (double x = 0.0; x <= 1.0; x += 1e-3) {
    for (double y = 0.0; y <= 1.0 - x + 1e-12; y += 1e-3) {
      const double r = std::min({x, y, (1.0 - x - y) / sqrt2});
      if (r > best_radius) {
        best_radius = r;
        best_x = x;
        best_y = y;
      }
    }
  }
  CHECK(result.radius == doctest::Approx(best_radius).epsilon(1e-2));
  CHECK(std::abs(result.center[0] - best_x) < 2e-3);
  CHECK(std::abs(result.center[1] - best_y) < 2e-3);
  // analytic inradius of this triangle for good measure
  CHECK(result.radius == doctest::Approx(1.0 / (2.0 + sqrt2)).epsilon(1e-9));
}

TEST_CASE("rejection sampling accepts everything when the polytope is its own box") {
  Polytope p = box_polytope(2, 1.0);
  p.bounding_half_width = VectorXd::Constant(2, 1.0);
  Rng rng(1);
  const auto samples = sample_rejection(p, 500, 500, rng);
  CHECK(samples.size() == 500);
  for (const auto& s : samples) CHECK(p.contains(s, 0.0));
}

TEST_CASE("rejection sampling on an empty polytope returns nothing") {
  Polytope p;
  p.a.resize(2, 1);
  p.a << 1, -1;
  p.b.resize(2);
  p.b << -1, 0;  // x <= -1 and x >= 0
  p.bounding_half_width = VectorXd::Constant(1, 2.0);
  Rng rng(2);
  CHECK(sample_rejection(p, 10, 1000, rng).empty());
}

TEST_CASE("rejection acceptance rate matches the area ratio on a half box") {
  // feasible set: [-1,1]^2 cut to eta_1 <= 0; sampling box: [-1,1]^2
  Polytope p = box_polytope(2, 1.0);
  p.a.conservativeResize(5, 2);
  p.a.row(4) << 1, 0;
  p.b.conservativeResize(5);
  p.b[4] = 0.0;
  p.bounding_half_width = VectorXd::Constant(2, 1.0);
  Rng rng(3);
  const long trials = 100000;
  const auto samples = sample_rejection(p, trials, trials, rng);
  const double rate = static_cast<double>(samples.size()) / static_cast<double>(trials);
  CHECK(std::abs(rate - 0.5) < 0.02);
}

TEST_CASE("hit-and-run stays inside and looks centered on a box") {
  const Polytope p = box_polytope(3, 1.0);
  Rng rng(7);
  const auto samples = sample_hit_and_run(p, 10000, VectorXd::Zero(3), rng);
  REQUIRE(samples.size() == 10000);
  VectorXd mean = VectorXd::Zero(3);
  for (const auto& s : samples) {
    CHECK(p.contains(s, 1e-10));
    mean += s;
  }
  mean /= static_cast<double>(samples.size());
  CHECK(mean.cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("hit-and-run is deterministic and rejects infeasible starts") {
  const Polytope p = box_polytope(2, 2.0);
  Rng r1(11), r2(11);
  const auto s1 = sample_hit_and_run(p, 50, VectorXd::Zero(2), r1);
  const auto s2 = sample_hit_and_run(p, 50, VectorXd::Zero(2), r2);
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i] == s2[i]);

  Rng r3(1);
  CHECK_THROWS_AS(sample_hit_and_run(p, 1, VectorXd::Constant(2, 2.0), r3), std::invalid_argument);

  // one sample from a 1-D interval stays inside
  const Polytope interval = box_polytope(1, 1.0);
  Rng r4(5);
  for (const auto& s : sample_hit_and_run(interval, 200, VectorXd::Zero(1), r4)) {
    CHECK(s[0] >= -1.0 - 1e-12);
    CHECK(s[0] <= 1.0 + 1e-12);
  }
}

TEST_CASE("inactive polytope reduces to the expected box for identity directions") {
  const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
  const ActiveSubspace subspace = make_subspace(MatrixXd::Identity(2, 2), 1, box);
  VectorXd mu(1);
  mu << 0.5;
  const Polytope p = inactive_polytope(subspace, mu);
  REQUIRE(p.rows() == 4);
  // rows: W2 eta <= 1 - W1 mu*, -W2 eta <= 1 + W1 mu*; W2 = e2 here, so the
  // eta constraints are -1 <= eta <= 1 and the active rows are 0 <= 0.5, 0 <= 1.5
  CHECK(p.b[0] == doctest::Approx(0.5));
  CHECK(p.b[1] == doctest::Approx(1.0));
  CHECK(p.b[2] == doctest::Approx(1.5));
  CHECK(p.b[3] == doctest::Approx(1.0));
  CHECK(p.contains(VectorXd::Zero(1), 0.0));
  const ChebyshevResult c = chebyshev_center(p);
  CHECK(c.status == LpStatus::optimal);
  CHECK(c.radius == doctest::Approx(1.0).epsilon(1e-9));

  // mu* = 0 keeps the origin feasible for any rotation
  const ActiveSubspace rotated = make_subspace(rotation2(0.9), 1, box);
  const Polytope p0 = inactive_polytope(rotated, VectorXd::Zero(1));
  CHECK((p0.b.array() == 1.0).all());
  CHECK(p0.contains(VectorXd::Zero(1), 0.0));
}

TEST_CASE("far-out active points give an infeasible polytope") {
  const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
  const ActiveSubspace subspace = make_subspace(rotation2(M_PI / 4.0), 1, box);
  VectorXd mu(1);
  mu << 2.0 * std::sqrt(2.0);  // twice the maximum of |W1^T z| over the cube
  const ChebyshevResult c = chebyshev_center(inactive_polytope(subspace, mu));
  CHECK(c.status == LpStatus::infeasible);
  Rng rng(1);
  CHECK_THROWS_AS(backward(subspace, mu, 2, rng), std::runtime_error);
}

TEST_CASE("backward pins the active coordinate and stays in the box") {
  const BoxDomain box = BoxDomain::cube(2, -2.0, 2.0);
  const ActiveSubspace subspace = make_subspace(MatrixXd::Identity(2, 2), 1, box);
  VectorXd mu(1);
  mu << 0.5;
  Rng rng(13);
  const auto points = backward(subspace, mu, 2, rng);
  REQUIRE(points.size() == 2);
  for (const auto& x : points) {
    CHECK(box.contains(x));
    const VectorXd z = subspace.scaler.scale(x);
    CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(z[1] >= -1.0);
    CHECK(z[1] <= 1.0);
  }
}

TEST_CASE("backward round trip across dimensions and counts") {
  Rng master(97);
  for (int k : {5, 9}) {
    for (int m : {1, 2}) {
      const BoxDomain box = BoxDomain::cube(k, -3.0, 7.0);
      Rng wrng = master.derive(k, m);
      const ActiveSubspace subspace = make_subspace(random_orthogonal(k, wrng), m, box);
      for (int b : {1, 2, 4}) {
        for (int trial = 0; trial < 5; ++trial) {
          Rng rng = master.derive(k, m, static_cast<std::uint64_t>(b * 10 + trial));
          VectorXd z(k);
          for (int j = 0; j < k; ++j) z[j] = rng.uniform(-1.0, 1.0);
          const VectorXd mu = subspace.w1().transpose() * z;
          const auto points = backward(subspace, mu, b, rng);
          REQUIRE(points.size() == static_cast<std::size_t>(b));
          for (const auto& x : points) {
            CHECK(box.contains(x, 1e-9));
            CHECK((subspace.forward(x) - mu).cwiseAbs().maxCoeff() < 1e-8);
          }
        }
      }
    }
  }
}

TEST_CASE("degenerate polytope forces identical center copies") {
  const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
  const ActiveSubspace subspace = make_subspace(rotation2(M_PI / 4.0), 1, box);
  VectorXd mu(1);
  mu << std::sqrt(2.0);  // the slice through the corner (1,1) is a single point
  Rng rng(3);
  const auto points = backward(subspace, mu, 3, rng);
  REQUIRE(points.size() == 3);
  for (const auto& x : points) {
    CHECK((x - points[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(box.contains(x, 1e-9));
    CHECK((x - VectorXd::Ones(2)).cwiseAbs().maxCoeff() < 1e-6);
  }
}
