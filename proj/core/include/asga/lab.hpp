#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "asga/driver.hpp"
#include "asga/evolve.hpp"
#include "asga/subspace.hpp"

namespace asga {

/// One budget row of an experiment plan; crossed with the function list and
/// the method list it defines the experiment cells.
struct PlanBudget {
  int dim = 2;
  int n0 = 200;
  int n = 100;
  int generations = 10;
  int active_dim = 1;
  int backward = 2;
};

struct ExperimentPlan {
  std::vector<std::string> functions;
  std::vector<PlanBudget> budgets;
  std::vector<std::string> methods;  // subset of {"ga", "asga"}
  int runs_per_cell = 5;
  std::uint64_t master_seed = 20210000;
};

/// Small plan that preserves the qualitative GA/ASGA ordering in minutes.
ExperimentPlan desk_plan();
/// Full-size budgets (long-running; the final generation index matches the
/// gain indices of the reference table).
ExperimentPlan paper_plan();

struct CellResult {
  std::string function;
  std::string method;
  PlanBudget budget;
  std::vector<RunRecord> runs;
};

/// Executes every (function, budget, method, run) combination of the plan.
/// Runs are independent and fan out over `threads` workers; the RNG stream
/// of run i in cell c is derived from (master_seed, fnv1a(c), i), so results
/// do not depend on scheduling and adding cells never shifts existing ones.
std::vector<CellResult> run_plan(const ExperimentPlan& plan, int threads,
                                 std::ostream* progress = nullptr);

/// Relative gain G(k): best fitness of generation 0 over best fitness of
/// generation k. Throws when k is out of range or the denominator is zero.
double gain(const RunRecord& record, int k);
/// Mean of gain(record, k) over the runs.
double mean_gain(const std::vector<RunRecord>& records, int k);

struct AggregateCurve {
  std::vector<double> mean, min, max;  // one entry per generation
};

/// Element-wise mean/min/max of the best-fitness curves; records must share
/// the generation count.
AggregateCurve aggregate(const std::vector<RunRecord>& records);

struct TracePoint {
  double f_dist = 0.0;  // |f_best - f*|
  double x_dist = 0.0;  // ||x_best - x*||_2
};

/// Per-generation distance of the best individual to a known optimum.
std::vector<TracePoint> convergence_trace(const RunRecord& record,
                                          const Eigen::VectorXd& optimum_point, double optimum_value);

// ---- CSV surfaces -------------------------------------------------------
// Every file the tool emits is written and read here; doubles are printed
// with %.17g so values survive the round trip bit-exactly.

struct CurveRow {
  std::string method, function;
  int dim = 0;
  int generation = 0;
  double mean = 0.0, min = 0.0, max = 0.0;
};

struct GainRow {
  std::string function, method;
  int dim = 0;
  double g0 = 1.0, g1 = 0.0, gfinal = 0.0;
};

struct EigRow {
  int index = 0;
  double eigenvalue = 0.0, boot_low = 0.0, boot_high = 0.0;
};

std::vector<CurveRow> curve_table(const std::vector<CellResult>& cells);
std::vector<GainRow> gain_table(const std::vector<CellResult>& cells);
/// Groups loose run records by (objective, dim, method), ordered
/// lexicographically; used by the report command.
std::vector<GainRow> gain_table_from_records(const std::vector<RunRecord>& records);

void write_run_csv(const std::string& path, const RunRecord& record);
RunRecord read_run_csv(const std::string& path);

void write_curve_csv(const std::string& path, const std::vector<CurveRow>& rows);
std::vector<CurveRow> read_curve_csv(const std::string& path);

void write_gain_csv(const std::string& path, const std::vector<GainRow>& rows);
std::vector<GainRow> read_gain_csv(const std::string& path);

void write_trace_csv(const std::string& path, const RunRecord& record,
                     const Eigen::VectorXd& optimum_point, double optimum_value);

void write_eigs_csv(const std::string& path, const BootstrapResult& result);
std::vector<EigRow> read_eigs_csv(const std::string& path);

/// %.17g rendering used by all writers.
std::string format_double(double value);

std::uint64_t fnv1a(std::string_view text);

}  // namespace asga
