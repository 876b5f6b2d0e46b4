#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "asga/rng.hpp"
#include "asga/subspace.hpp"

namespace asga {

/// H-representation {eta : A eta <= b}. When built from an active point the
/// analytic bounding half-widths of the feasible set are carried along so
/// the rejection sampler can skip the per-coordinate bound LPs.
struct Polytope {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::optional<Eigen::VectorXd> bounding_half_width;

  Eigen::Index dim() const { return a.cols(); }
  Eigen::Index rows() const { return a.rows(); }
  bool contains(const Eigen::VectorXd& eta, double tol) const {
    return ((a * eta - b).array() <= tol).all();
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  Eigen::VectorXd point;
  double objective_value = 0.0;
  LpStatus status = LpStatus::infeasible;
};

/// max c^T x subject to A x <= b, with per-variable sign restrictions
/// (nonnegative[i] true for x_i >= 0, false for a free variable). Dense
/// two-phase simplex with Bland's rule; sized for the small systems the
/// back-mapping produces.
LpResult solve_lp_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                      const std::vector<bool>& nonnegative);

/// Feasible set of inactive variables for a fixed active point:
/// W2 eta <= 1 - W1 mu*, -W2 eta <= 1 + W1 mu*.
Polytope inactive_polytope(const ActiveSubspace& subspace, const Eigen::VectorXd& mu_star);

struct ChebyshevResult {
  Eigen::VectorXd center;
  double radius = 0.0;
  LpStatus status = LpStatus::infeasible;
};

/// Center and radius of the largest inscribed ball; LP formulation
/// max r s.t. a_i^T x + r ||a_i|| <= b_i, r >= 0. Throws on an unbounded
/// polytope (degenerate constraint matrix).
ChebyshevResult chebyshev_center(const Polytope& p);

/// Uniform draws over a bounding box of the polytope, keeping points with
/// A eta <= b + 1e-12, until `count` are accepted or `max_trials` drawn.
/// A short result signals that a fallback is needed.
std::vector<Eigen::VectorXd> sample_rejection(const Polytope& p, int count, long max_trials, Rng& rng);

/// Hit-and-run walk: from a strictly feasible start, repeatedly pick a
/// uniform random direction, intersect the line with the polytope and jump
/// to a uniform point of the chord. Emits every step after the burn-in;
/// the default burn-in of 10 * dim steps decorrelates the output from the
/// start point. burn_in = 0 reproduces the sequential scheme the
/// back-mapping uses, where every step starting from the center counts.
std::vector<Eigen::VectorXd> sample_hit_and_run(const Polytope& p, int count,
                                                const Eigen::VectorXd& start, Rng& rng,
                                                long burn_in = -1);

/// Back-maps an active point to `count` original-coordinate points whose
/// forward projection is mu_star: rejection sampling first, hit-and-run from
/// the Chebyshev center to top up, and as a last resort copies of the center
/// itself. Outputs are clipped into the domain box (tolerance-level motion
/// only). Throws std::runtime_error when the polytope is infeasible.
std::vector<Eigen::VectorXd> backward(const ActiveSubspace& subspace, const Eigen::VectorXd& mu_star,
                                      int count, Rng& rng);

}  // namespace asga
