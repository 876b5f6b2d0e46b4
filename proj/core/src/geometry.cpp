#include "asga/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace asga {

namespace {

constexpr double kPivotTol = 1e-9;

// Canonical-tableau simplex step loop, Bland's rule on entering and leaving
// variables. Columns in [0, enter_limit) may enter the basis. Returns false
// when the problem is unbounded.
bool simplex_run(Eigen::MatrixXd& tableau, std::vector<int>& basis, const Eigen::VectorXd& cost,
                 int enter_limit) {
  const Eigen::Index m = tableau.rows();
  const Eigen::Index rhs = tableau.cols() - 1;
  for (;;) {
    int enter = -1;
    for (int j = 0; j < enter_limit; ++j) {
      double reduced = cost[j];
      for (Eigen::Index i = 0; i < m; ++i) reduced -= cost[basis[i]] * tableau(i, j);
      if (reduced < -kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;

    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tableau(i, enter) > kPivotTol) {
        const double ratio = tableau(i, rhs) / tableau(i, enter);
        if (ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;

    tableau.row(leave) /= tableau(leave, enter);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != leave && tableau(i, enter) != 0.0) {
        tableau.row(i) -= tableau(i, enter) * tableau.row(leave);
      }
    }
    basis[leave] = enter;
  }
}

}  // namespace

LpResult solve_lp_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                      const std::vector<bool>& nonnegative) {
  const Eigen::Index m = a.rows();
  const Eigen::Index nx = a.cols();
  if (b.size() != m || c.size() != nx || static_cast<Eigen::Index>(nonnegative.size()) != nx) {
    throw std::invalid_argument("solve_lp_max: inconsistent dimensions");
  }

  // Standard form: free variables split into differences of nonnegatives,
  // one slack per row, artificials form the phase-1 basis.
  Eigen::Index nv = 0;
  for (bool nn : nonnegative) nv += nn ? 1 : 2;
  const Eigen::Index n_slack = m;
  const Eigen::Index art_start = nv + n_slack;
  const Eigen::Index n_total = art_start + m;

  Eigen::MatrixXd tableau = Eigen::MatrixXd::Zero(m, n_total + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < nx; ++j) {
      tableau(i, col++) = a(i, j);
      if (!nonnegative[j]) tableau(i, col++) = -a(i, j);
    }
    tableau(i, nv + i) = 1.0;  // slack
    tableau(i, n_total) = b[i];
    if (b[i] < 0.0) tableau.row(i) = -tableau.row(i);
    tableau(i, art_start + i) = 1.0;
  }

  std::vector<int> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = static_cast<int>(art_start + i);

  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n_total);
  phase1_cost.tail(m).setOnes();
  simplex_run(tableau, basis, phase1_cost, static_cast<int>(art_start));

  double infeasibility = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] >= art_start) infeasibility += tableau(i, n_total);
  }
  if (infeasibility > 1e-7) {
    return {Eigen::VectorXd::Zero(nx), 0.0, LpStatus::infeasible};
  }

  // Pivot leftover artificials out of the basis; a row with no eligible
  // pivot is redundant and stays parked at zero.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < art_start) continue;
    for (Eigen::Index j = 0; j < art_start; ++j) {
      if (std::abs(tableau(i, j)) > kPivotTol) {
        tableau.row(i) /= tableau(i, j);
        for (Eigen::Index r = 0; r < m; ++r) {
          if (r != i && tableau(r, j) != 0.0) tableau.row(r) -= tableau(r, j) * tableau.row(i);
        }
        basis[i] = static_cast<int>(j);
        break;
      }
    }
  }

  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n_total);
  {
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < nx; ++j) {
      phase2_cost[col++] = -c[j];  // maximize c^T x == minimize -c^T x
      if (!nonnegative[j]) phase2_cost[col++] = c[j];
    }
  }
  if (!simplex_run(tableau, basis, phase2_cost, static_cast<int>(art_start))) {
    return {Eigen::VectorXd::Zero(nx), 0.0, LpStatus::unbounded};
  }

  Eigen::VectorXd standard = Eigen::VectorXd::Zero(n_total);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < art_start) standard[basis[i]] = tableau(i, n_total);
  }
  Eigen::VectorXd x(nx);
  {
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < nx; ++j) {
      x[j] = standard[col++];
      if (!nonnegative[j]) x[j] -= standard[col++];
    }
  }
  return {x, c.dot(x), LpStatus::optimal};
}

Polytope inactive_polytope(const ActiveSubspace& subspace, const Eigen::VectorXd& mu_star) {
  if (mu_star.size() != subspace.active_dim) {
    throw std::invalid_argument("inactive_polytope: active point has wrong dimension");
  }
  if (!mu_star.allFinite()) throw std::invalid_argument("inactive_polytope: non-finite active point");

  const Eigen::MatrixXd w2 = subspace.w2();
  const Eigen::VectorXd shift = subspace.w1() * mu_star;  // W1 mu* in scaled coordinates
  const Eigen::Index k = w2.rows();
  const Eigen::Index q = w2.cols();

  Polytope p;
  p.a.resize(2 * k, q);
  p.a.topRows(k) = w2;
  p.a.bottomRows(k) = -w2;
  p.b.resize(2 * k);
  p.b.head(k) = Eigen::VectorXd::Ones(k) - shift;
  p.b.tail(k) = Eigen::VectorXd::Ones(k) + shift;
  // eta = W2^T mu with mu in [-1,1]^k, so |eta_j| <= ||W2 col j||_1.
  p.bounding_half_width = w2.cwiseAbs().colwise().sum().transpose();
  return p;
}

ChebyshevResult chebyshev_center(const Polytope& p) {
  const Eigen::Index m = p.rows();
  const Eigen::Index q = p.dim();

  Eigen::MatrixXd a(m, q + 1);
  a.leftCols(q) = p.a;
  for (Eigen::Index i = 0; i < m; ++i) a(i, q) = p.a.row(i).norm();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(q + 1);
  c[q] = 1.0;
  std::vector<bool> nonneg(q + 1, false);
  nonneg[q] = true;  // the radius

  const LpResult lp = solve_lp_max(a, p.b, c, nonneg);
  if (lp.status == LpStatus::infeasible) return {Eigen::VectorXd::Zero(q), 0.0, LpStatus::infeasible};
  if (lp.status == LpStatus::unbounded) {
    throw std::runtime_error("chebyshev_center: polytope is unbounded");
  }
  return {lp.point.head(q), lp.point[q], LpStatus::optimal};
}

namespace {

// Per-coordinate [min, max] of a generic polytope via 2q bound LPs.
std::pair<Eigen::VectorXd, Eigen::VectorXd> lp_bounding_box(const Polytope& p) {
  const Eigen::Index q = p.dim();
  Eigen::VectorXd lo(q), hi(q);
  const std::vector<bool> nonneg(q, false);
  for (Eigen::Index j = 0; j < q; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(q);
    c[j] = 1.0;
    const LpResult upper = solve_lp_max(p.a, p.b, c, nonneg);
    c[j] = -1.0;
    const LpResult lower = solve_lp_max(p.a, p.b, c, nonneg);
    if (upper.status == LpStatus::infeasible || lower.status == LpStatus::infeasible) {
      return {Eigen::VectorXd(), Eigen::VectorXd()};
    }
    if (upper.status == LpStatus::unbounded || lower.status == LpStatus::unbounded) {
      throw std::invalid_argument("sample_rejection: polytope is unbounded");
    }
    hi[j] = upper.objective_value;
    lo[j] = -lower.objective_value;
  }
  return {lo, hi};
}

}  // namespace

std::vector<Eigen::VectorXd> sample_rejection(const Polytope& p, int count, long max_trials, Rng& rng) {
  if (count < 1) throw std::invalid_argument("sample_rejection: count must be >= 1");
  const Eigen::Index q = p.dim();

  Eigen::VectorXd lo(q), hi(q);
  if (p.bounding_half_width) {
    hi = *p.bounding_half_width;
    lo = -hi;
  } else {
    auto [blo, bhi] = lp_bounding_box(p);
    if (blo.size() == 0) return {};  // empty polytope
    lo = blo;
    hi = bhi;
  }

  std::vector<Eigen::VectorXd> accepted;
  accepted.reserve(count);
  Eigen::VectorXd eta(q);
  for (long trial = 0; trial < max_trials && static_cast<int>(accepted.size()) < count; ++trial) {
    for (Eigen::Index j = 0; j < q; ++j) eta[j] = rng.uniform(lo[j], hi[j]);
    if (p.contains(eta, 1e-12)) accepted.push_back(eta);
  }
  return accepted;
}

std::vector<Eigen::VectorXd> sample_hit_and_run(const Polytope& p, int count,
                                                const Eigen::VectorXd& start, Rng& rng,
                                                long burn_in) {
  const Eigen::Index q = p.dim();
  if (start.size() != q) throw std::invalid_argument("sample_hit_and_run: start dimension mismatch");
  if (((p.a * start - p.b).array() >= 0.0).any()) {
    throw std::invalid_argument("sample_hit_and_run: start point is not strictly feasible");
  }

  if (burn_in < 0) burn_in = 10 * static_cast<long>(q);
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(count);

  Eigen::VectorXd x = start;
  Eigen::VectorXd direction(q);
  long steps = 0;
  int dead_directions = 0;
  while (static_cast<int>(samples.size()) < count) {
    for (Eigen::Index j = 0; j < q; ++j) direction[j] = rng.normal(0.0, 1.0);
    const double norm = direction.norm();
    if (norm < 1e-300) continue;
    direction /= norm;

    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double along = p.a.row(i).dot(direction);
      const double slack = p.b[i] - p.a.row(i).dot(x);
      if (along > 1e-14) {
        t_max = std::min(t_max, slack / along);
      } else if (along < -1e-14) {
        t_min = std::max(t_min, slack / along);
      }
    }
    if (!std::isfinite(t_min) || !std::isfinite(t_max)) {
      throw std::runtime_error("sample_hit_and_run: unbounded chord");
    }
    if (t_max - t_min <= 1e-14) {
      if (++dead_directions >= 100) {
        throw std::runtime_error("sample_hit_and_run: degenerate polytope (no usable chord)");
      }
      continue;
    }
    dead_directions = 0;
    x += rng.uniform(t_min, t_max) * direction;
    if (++steps > burn_in) samples.push_back(x);
  }
  return samples;
}

std::vector<Eigen::VectorXd> backward(const ActiveSubspace& subspace, const Eigen::VectorXd& mu_star,
                                      int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("backward: count must be >= 1");

  const Polytope p = inactive_polytope(subspace, mu_star);
  const ChebyshevResult cheb = chebyshev_center(p);
  if (cheb.status == LpStatus::infeasible) {
    throw std::runtime_error("backward: no point of the domain projects onto the active point");
  }

  std::vector<Eigen::VectorXd> etas = sample_rejection(p, count, 100L * count, rng);
  if (static_cast<int>(etas.size()) < count) {
    const int missing = count - static_cast<int>(etas.size());
    if (cheb.radius >= 1e-10) {
      // Sequential walk from the center, every step kept. Keeping the
      // samples near the most interior preimage is what lets the reduced
      // evolution make progress once the box volume defeats rejection.
      for (auto& eta : sample_hit_and_run(p, missing, cheb.center, rng, 0)) {
        etas.push_back(std::move(eta));
      }
    } else {
      // Lower-dimensional polytope: the center is the whole story.
      etas.insert(etas.end(), missing, cheb.center);
    }
  }

  const Eigen::MatrixXd w1 = subspace.w1();
  const Eigen::MatrixXd w2 = subspace.w2();
  const BoxDomain& box = subspace.scaler.domain();
  std::vector<Eigen::VectorXd> points;
  points.reserve(count);
  for (const auto& eta : etas) {
    Eigen::VectorXd z = w1 * mu_star + w2 * eta;
    z = z.cwiseMax(-1.0).cwiseMin(1.0);  // sampler tolerance only
    points.push_back(box.clip(subspace.scaler.unscale(z)));
  }
  return points;
}

}  // namespace asga
