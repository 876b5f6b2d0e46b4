#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace asga {

/// Axis-aligned box {x : lower <= x <= upper} with strictly positive widths.
class BoxDomain {
 public:
  BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper);

  /// Hypercube [lo, hi]^dim.
  static BoxDomain cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::VectorXd center() const { return 0.5 * (lower_ + upper_); }
  Eigen::VectorXd half_width() const { return 0.5 * (upper_ - lower_); }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  Eigen::VectorXd clip(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// A named scalar objective on a box domain, with the optimum when known.
struct ObjectiveSpec {
  std::string name;
  int dimension = 0;
  BoxDomain domain;
  std::function<double(const Eigen::VectorXd&)> fn;
  std::optional<double> known_optimum_value;
  std::optional<Eigen::VectorXd> known_optimum_point;
};

/// Evaluates spec.fn at x after checking dimension and finiteness.
double evaluate(const ObjectiveSpec& spec, const Eigen::VectorXd& x);

// The six d-dimensional test functions, callable directly.
double rosenbrock(const Eigen::VectorXd& x);
double ackley(const Eigen::VectorXd& x);
double bohachevsky(const Eigen::VectorXd& x);
double rastrigin(const Eigen::VectorXd& x);
double schaffer7(const Eigen::VectorXd& x);
double zakharov(const Eigen::VectorXd& x);

/// Registry lookup by name ("rosenbrock", "ackley", "bohachevsky",
/// "rastrigin", "schaffer7", "zakharov"). Throws std::invalid_argument for
/// unknown names.
ObjectiveSpec make_benchmark(const std::string& name, int dim);
const std::vector<std::string>& benchmark_names();

enum class RbfKernel { gaussian, multiquadric, thin_plate };

RbfKernel rbf_kernel_from_name(const std::string& name);

/// Interpolating radial basis surrogate g(x) fitted to (inputs, outputs).
///
/// Inputs are rescaled column-wise to [-1,1] before the kernel is applied;
/// multiquadric and thin-plate kernels carry a linear polynomial tail.
class RbfSurrogate {
 public:
  static RbfSurrogate fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                          RbfKernel kernel = RbfKernel::gaussian, double shape_parameter = 1.0,
                          double penalty_alpha = 10.0);

  double operator()(const Eigen::VectorXd& x) const;

  int input_dim() const { return static_cast<int>(col_lo_.size()); }
  double penalty_alpha() const { return penalty_alpha_; }
  /// Column-wise min/max box of the training inputs.
  BoxDomain data_box() const;

 private:
  RbfSurrogate() = default;

  Eigen::MatrixXd centers_;  // scaled training inputs, one row per sample
  Eigen::VectorXd weights_;
  Eigen::VectorXd tail_;  // empty for kernels without a polynomial part
  RbfKernel kernel_ = RbfKernel::gaussian;
  double shape_ = 1.0;
  double penalty_alpha_ = 10.0;
  Eigen::VectorXd col_lo_, col_hi_;
};

/// Piecewise objective: surrogate value inside the (closed) domain, the
/// constant penalty outside.
double penalized(const RbfSurrogate& surrogate, const BoxDomain& domain, const Eigen::VectorXd& x);

/// Objective spec wrapping an RBF surrogate with the penalty rule over its
/// data box.
ObjectiveSpec make_rbf_objective(const RbfSurrogate& surrogate);

struct SampleDataset {
  Eigen::MatrixXd inputs;   // n x k
  Eigen::VectorXd outputs;  // n
};

/// CSV reader: one sample per row, k input columns then one output column.
/// A non-numeric first row is treated as a header and skipped.
SampleDataset read_sample_csv(const std::string& path);

}  // namespace asga
