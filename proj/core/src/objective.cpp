#include "asga/objective.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace asga {

BoxDomain::BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() < 1) {
    throw std::invalid_argument("BoxDomain: bounds must share a positive dimension");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i])) {
      throw std::invalid_argument("BoxDomain: requires lower[i] < upper[i] and finite bounds");
    }
  }
}

BoxDomain BoxDomain::cube(int dim, double lo, double hi) {
  return BoxDomain(Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi));
}

bool BoxDomain::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  }
  return true;
}

Eigen::VectorXd BoxDomain::clip(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

double evaluate(const ObjectiveSpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.dimension) {
    throw std::invalid_argument("evaluate: point dimension " + std::to_string(x.size()) +
                                " does not match objective '" + spec.name + "' dimension " +
                                std::to_string(spec.dimension));
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw std::invalid_argument("evaluate: non-finite component at index " + std::to_string(i));
    }
  }
  return spec.fn(x);
}

double rosenbrock(const Eigen::VectorXd& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    sum += 100.0 * a * a + b * b;
  }
  return sum;
}

double ackley(const Eigen::VectorXd& x) {
  const double a = 20.0, b = 0.2, c = 2.0 * M_PI;
  const double d = static_cast<double>(x.size());
  double sq = 0.0, cs = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sq += x[i] * x[i];
    cs += std::cos(c * x[i]);
  }
  return -a * std::exp(-b * std::sqrt(sq / d)) - std::exp(cs / d) + a + std::exp(1.0);
}

double bohachevsky(const Eigen::VectorXd& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    sum += x[i] * x[i] + 2.0 * x[i + 1] * x[i + 1] - 0.3 * std::cos(3.0 * M_PI * x[i]) -
           0.4 * std::cos(4.0 * M_PI * x[i + 1]) + 0.7;
  }
  return sum;
}

double rastrigin(const Eigen::VectorXd& x) {
  double sum = 10.0 * static_cast<double>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum += x[i] * x[i] - 10.0 * std::cos(2.0 * M_PI * x[i]);
  }
  return sum;
}

double schaffer7(const Eigen::VectorXd& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double s = x[i] * x[i] + x[i + 1] * x[i + 1];
    if (s == 0.0) continue;  // limit value of the summand
    const double sn = std::sin(50.0 * std::pow(s, 0.10));
    sum += std::pow(s, 0.25) * (sn * sn + 1.0);
  }
  return sum;
}

double zakharov(const Eigen::VectorXd& x) {
  double sq = 0.0, lin = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = x[i] + 10.0;  // shifted form, minimum at -10
    sq += t * t;
    lin += 0.5 * static_cast<double>(i + 1) * t;
  }
  return sq + lin * lin + lin * lin * lin * lin;
}

namespace {

struct BenchmarkDef {
  const char* name;
  double (*fn)(const Eigen::VectorXd&);
  double lo, hi;
  double optimum_coord;
};

constexpr BenchmarkDef kBenchmarks[] = {
    {"rosenbrock", &rosenbrock, -5.0, 10.0, 1.0},
    {"ackley", &ackley, -15.0, 30.0, 0.0},
    {"bohachevsky", &bohachevsky, -100.0, 100.0, 0.0},
    {"rastrigin", &rastrigin, -5.12, 5.12, 0.0},
    {"schaffer7", &schaffer7, -100.0, 100.0, 0.0},
    {"zakharov", &zakharov, -15.0, 0.0, -10.0},
};

}  // namespace

ObjectiveSpec make_benchmark(const std::string& name, int dim) {
  if (dim < 1) throw std::invalid_argument("make_benchmark: dim must be >= 1");
  for (const auto& def : kBenchmarks) {
    if (name == def.name) {
      ObjectiveSpec spec{def.name, dim, BoxDomain::cube(dim, def.lo, def.hi), def.fn, 0.0,
                         Eigen::VectorXd::Constant(dim, def.optimum_coord)};
      return spec;
    }
  }
  throw std::invalid_argument("make_benchmark: unknown function '" + name + "'");
}

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& def : kBenchmarks) v.emplace_back(def.name);
    return v;
  }();
  return names;
}

RbfKernel rbf_kernel_from_name(const std::string& name) {
  if (name == "gaussian") return RbfKernel::gaussian;
  if (name == "multiquadric") return RbfKernel::multiquadric;
  if (name == "thin_plate") return RbfKernel::thin_plate;
  throw std::invalid_argument("unknown RBF kernel '" + name + "'");
}

namespace {

double kernel_value(RbfKernel kernel, double shape, double r) {
  switch (kernel) {
    case RbfKernel::gaussian: {
      const double t = r / shape;
      return std::exp(-t * t);
    }
    case RbfKernel::multiquadric: {
      const double t = r / shape;
      return std::sqrt(1.0 + t * t);
    }
    case RbfKernel::thin_plate:
      return r > 0.0 ? r * r * std::log(r) : 0.0;
  }
  return 0.0;
}

bool kernel_needs_tail(RbfKernel kernel) { return kernel != RbfKernel::gaussian; }

}  // namespace

RbfSurrogate RbfSurrogate::fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                               RbfKernel kernel, double shape_parameter, double penalty_alpha) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index k = inputs.cols();
  if (n != outputs.size()) throw std::invalid_argument("fit_rbf: inputs/outputs row mismatch");
  if (n < k + 1) throw std::invalid_argument("fit_rbf: need at least k+1 samples");
  if (!(shape_parameter > 0.0)) throw std::invalid_argument("fit_rbf: shape_parameter must be > 0");
  if (!std::isfinite(penalty_alpha)) throw std::invalid_argument("fit_rbf: penalty_alpha must be finite");

  RbfSurrogate s;
  s.kernel_ = kernel;
  s.shape_ = shape_parameter;
  s.penalty_alpha_ = penalty_alpha;
  s.col_lo_ = inputs.colwise().minCoeff();
  s.col_hi_ = inputs.colwise().maxCoeff();

  // Column-wise rescale to [-1,1]; constant columns map to 0.
  s.centers_.resize(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double w = s.col_hi_[j] - s.col_lo_[j];
    if (w > 0.0) {
      s.centers_.col(j) = (2.0 * (inputs.col(j).array() - s.col_lo_[j]) / w - 1.0).matrix();
    } else {
      s.centers_.col(j).setZero();
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if ((s.centers_.row(i) - s.centers_.row(j)).norm() < 1e-10) {
        throw std::invalid_argument("fit_rbf: near-duplicate sample rows " + std::to_string(i) +
                                    " and " + std::to_string(j) + " make the system singular");
      }
    }
  }

  const bool tail = kernel_needs_tail(kernel);
  const Eigen::Index m = tail ? n + k + 1 : n;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      sys(i, j) = kernel_value(kernel, shape_parameter, (s.centers_.row(i) - s.centers_.row(j)).norm());
    }
    rhs[i] = outputs[i];
  }
  if (tail) {
    for (Eigen::Index i = 0; i < n; ++i) {
      sys(i, n) = 1.0;
      sys(n, i) = 1.0;
      sys.block(i, n + 1, 1, k) = s.centers_.row(i);
      sys.block(n + 1, i, k, 1) = s.centers_.row(i).transpose();
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  if (!lu.isInvertible()) {
    throw std::runtime_error("fit_rbf: singular interpolation matrix (ill-conditioned sample set)");
  }
  Eigen::VectorXd sol = lu.solve(rhs);
  s.weights_ = sol.head(n);
  if (tail) s.tail_ = sol.tail(k + 1);

  // Interpolation property check at the training points.
  const double scale = std::max(1.0, outputs.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(s(inputs.row(i).transpose()) - outputs[i]) > 1e-6 * scale) {
      throw std::runtime_error("fit_rbf: interpolation residual above 1e-6 relative; "
                               "sample set is too ill-conditioned for this kernel");
    }
  }
  return s;
}

double RbfSurrogate::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != col_lo_.size()) throw std::invalid_argument("RbfSurrogate: dimension mismatch");
  Eigen::VectorXd z(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double w = col_hi_[j] - col_lo_[j];
    z[j] = w > 0.0 ? 2.0 * (x[j] - col_lo_[j]) / w - 1.0 : 0.0;
  }
  double value = 0.0;
  for (Eigen::Index i = 0; i < centers_.rows(); ++i) {
    value += weights_[i] * kernel_value(kernel_, shape_, (centers_.row(i).transpose() - z).norm());
  }
  if (tail_.size() > 0) value += tail_[0] + tail_.tail(x.size()).dot(z);
  return value;
}

BoxDomain RbfSurrogate::data_box() const { return BoxDomain(col_lo_, col_hi_); }

double penalized(const RbfSurrogate& surrogate, const BoxDomain& domain, const Eigen::VectorXd& x) {
  if (x.size() != domain.dim()) throw std::invalid_argument("penalized: dimension mismatch");
  return domain.contains(x) ? surrogate(x) : surrogate.penalty_alpha();
}

ObjectiveSpec make_rbf_objective(const RbfSurrogate& surrogate) {
  const BoxDomain box = surrogate.data_box();
  ObjectiveSpec spec{"rbf", surrogate.input_dim(), box,
                     [surrogate, box](const Eigen::VectorXd& x) { return penalized(surrogate, box, x); },
                     std::nullopt, std::nullopt};
  return spec;
}

SampleDataset read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header row
      throw std::runtime_error("dataset '" + path + "': non-numeric cell at line " +
                               std::to_string(line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("dataset '" + path + "': ragged row at line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().size() < 2) {
    throw std::runtime_error("dataset '" + path + "': need rows with k inputs plus one output");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index k = static_cast<Eigen::Index>(rows.front().size()) - 1;
  SampleDataset ds;
  ds.inputs.resize(n, k);
  ds.outputs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) ds.inputs(i, j) = rows[i][j];
    ds.outputs[i] = rows[i][k];
  }
  return ds;
}

}  // namespace asga
