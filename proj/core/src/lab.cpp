#include "asga/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "asga/parallel.hpp"

namespace asga {

ExperimentPlan desk_plan() {
  ExperimentPlan plan;
  plan.functions = benchmark_names();
  plan.budgets = {
      {2, 200, 100, 10, 1, 2},
      {15, 500, 100, 15, 1, 2},
  };
  plan.methods = {"ga", "asga"};
  plan.runs_per_cell = 5;
  return plan;
}

ExperimentPlan paper_plan() {
  ExperimentPlan plan;
  plan.functions = benchmark_names();
  plan.budgets = {
      {2, 200, 100, 9, 1, 2},
      {15, 2000, 200, 29, 1, 2},
      {40, 5000, 1000, 49, 1, 2},
  };
  plan.methods = {"ga", "asga"};
  plan.runs_per_cell = 15;
  return plan;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

namespace {

RunRecord run_one(const std::string& function, const std::string& method, const PlanBudget& budget,
                  std::uint64_t master_seed, int run_index) {
  const ObjectiveSpec objective = make_benchmark(function, budget.dim);
  const std::string cell = function + "|" + std::to_string(budget.dim) + "|" + method;
  const Rng stream = Rng(master_seed).derive(fnv1a(cell), static_cast<std::uint64_t>(run_index));

  EvolutionConfig base;
  base.initial_size = budget.n0;
  base.offspring_size = budget.n;
  base.generations = budget.generations;
  base.seed = stream.stream_id();

  if (method == "ga") return run_ga(objective, base, stream);
  if (method == "asga") {
    AsgaConfig config;
    config.base = base;
    config.active_dim = budget.active_dim;
    config.backward_count = budget.backward;
    return run_asga(objective, config, stream);
  }
  throw std::invalid_argument("run_plan: unknown method '" + method + "'");
}

}  // namespace

std::vector<CellResult> run_plan(const ExperimentPlan& plan, int threads, std::ostream* progress) {
  if (plan.runs_per_cell < 1) throw std::invalid_argument("run_plan: runs_per_cell must be >= 1");

  struct Task {
    std::size_t cell;
    int run;
  };
  std::vector<CellResult> cells;
  std::vector<Task> tasks;
  for (const auto& function : plan.functions) {
    for (const auto& budget : plan.budgets) {
      for (const auto& method : plan.methods) {
        CellResult cell{function, method, budget, {}};
        cell.runs.resize(plan.runs_per_cell);
        for (int r = 0; r < plan.runs_per_cell; ++r) tasks.push_back({cells.size(), r});
        cells.push_back(std::move(cell));
      }
    }
  }

  std::mutex progress_mutex;
  parallel_for(tasks.size(), threads, [&](std::size_t t) {
    CellResult& cell = cells[tasks[t].cell];
    cell.runs[tasks[t].run] =
        run_one(cell.function, cell.method, cell.budget, plan.master_seed, tasks[t].run);
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      (*progress) << cell.method << " " << cell.function << " d" << cell.budget.dim << " run "
                  << tasks[t].run << " done\n";
    }
  });
  return cells;
}

double gain(const RunRecord& record, int k) {
  if (k < 0 || k > record.generations()) {
    throw std::invalid_argument("gain: generation index out of range");
  }
  const double initial = record.history.front().best_fitness;
  const double at_k = record.history[k].best_fitness;
  if (initial == 0.0) throw std::domain_error("gain: initial best fitness is zero");
  if (at_k == 0.0) throw std::domain_error("gain: best fitness at generation k is zero");
  return initial / at_k;
}

double mean_gain(const std::vector<RunRecord>& records, int k) {
  if (records.empty()) throw std::invalid_argument("mean_gain: no records");
  double sum = 0.0;
  for (const auto& record : records) sum += gain(record, k);
  return sum / static_cast<double>(records.size());
}

AggregateCurve aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  const std::size_t length = records.front().history.size();
  for (const auto& record : records) {
    if (record.history.size() != length) {
      throw std::invalid_argument("aggregate: records disagree on the generation count");
    }
  }
  AggregateCurve curve;
  curve.mean.assign(length, 0.0);
  curve.min.assign(length, std::numeric_limits<double>::infinity());
  curve.max.assign(length, -std::numeric_limits<double>::infinity());
  for (const auto& record : records) {
    for (std::size_t g = 0; g < length; ++g) {
      const double f = record.history[g].best_fitness;
      curve.mean[g] += f;
      curve.min[g] = std::min(curve.min[g], f);
      curve.max[g] = std::max(curve.max[g], f);
    }
  }
  for (auto& m : curve.mean) m /= static_cast<double>(records.size());
  return curve;
}

std::vector<TracePoint> convergence_trace(const RunRecord& record,
                                          const Eigen::VectorXd& optimum_point, double optimum_value) {
  std::vector<TracePoint> trace;
  trace.reserve(record.history.size());
  for (const auto& entry : record.history) {
    trace.push_back({std::abs(entry.best_fitness - optimum_value),
                     (entry.best_genes - optimum_point).norm()});
  }
  return trace;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return in;
}

double parse_double(const std::string& cell) { return std::stod(cell); }

}  // namespace

std::vector<CurveRow> curve_table(const std::vector<CellResult>& cells) {
  std::vector<CurveRow> rows;
  for (const auto& cell : cells) {
    const AggregateCurve curve = aggregate(cell.runs);
    for (std::size_t g = 0; g < curve.mean.size(); ++g) {
      rows.push_back({cell.method, cell.function, cell.budget.dim, static_cast<int>(g), curve.mean[g],
                      curve.min[g], curve.max[g]});
    }
  }
  return rows;
}

namespace {

GainRow make_gain_row(const std::string& function, const std::string& method, int dim,
                      const std::vector<RunRecord>& runs) {
  GainRow row{function, method, dim, mean_gain(runs, 0), 0.0, 0.0};
  const int last = runs.front().generations();
  row.g1 = last >= 1 ? mean_gain(runs, 1) : std::numeric_limits<double>::quiet_NaN();
  row.gfinal = mean_gain(runs, last);
  return row;
}

}  // namespace

std::vector<GainRow> gain_table(const std::vector<CellResult>& cells) {
  std::vector<GainRow> rows;
  rows.reserve(cells.size());
  for (const auto& cell : cells) {
    rows.push_back(make_gain_row(cell.function, cell.method, cell.budget.dim, cell.runs));
  }
  return rows;
}

std::vector<GainRow> gain_table_from_records(const std::vector<RunRecord>& records) {
  std::map<std::tuple<std::string, int, std::string>, std::vector<RunRecord>> groups;
  for (const auto& record : records) {
    groups[{record.objective, record.dimension, record.method}].push_back(record);
  }
  std::vector<GainRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, runs] : groups) {
    rows.push_back(make_gain_row(std::get<0>(key), std::get<2>(key), std::get<1>(key), runs));
  }
  return rows;
}

void write_run_csv(const std::string& path, const RunRecord& record) {
  auto out = open_out(path);
  out << "method,function,dim,seed,generation,best_fitness,evaluations";
  for (int j = 0; j < record.dimension; ++j) out << ",x" << j;
  out << "\n";
  for (const auto& entry : record.history) {
    out << record.method << "," << record.objective << "," << record.dimension << "," << record.seed
        << "," << entry.generation << "," << format_double(entry.best_fitness) << ","
        << entry.evaluations;
    for (int j = 0; j < record.dimension; ++j) out << "," << format_double(entry.best_genes[j]);
    out << "\n";
  }
}

RunRecord read_run_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("run csv '" + path + "' is empty");
  RunRecord record;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < 7) throw std::runtime_error("run csv '" + path + "': short row");
    const int dim = std::stoi(cells[2]);
    if (first) {
      record.method = cells[0];
      record.objective = cells[1];
      record.dimension = dim;
      record.seed = std::stoull(cells[3]);
      first = false;
    }
    GenerationRecord entry;
    entry.generation = std::stoi(cells[4]);
    entry.best_fitness = parse_double(cells[5]);
    entry.evaluations = std::stoll(cells[6]);
    if (static_cast<int>(cells.size()) != 7 + dim) {
      throw std::runtime_error("run csv '" + path + "': row width does not match dim");
    }
    entry.best_genes.resize(dim);
    for (int j = 0; j < dim; ++j) entry.best_genes[j] = parse_double(cells[7 + j]);
    record.history.push_back(std::move(entry));
  }
  if (first) throw std::runtime_error("run csv '" + path + "' has no data rows");
  return record;
}

void write_curve_csv(const std::string& path, const std::vector<CurveRow>& rows) {
  auto out = open_out(path);
  out << "method,function,dim,generation,mean,min,max\n";
  for (const auto& row : rows) {
    out << row.method << "," << row.function << "," << row.dim << "," << row.generation << ","
        << format_double(row.mean) << "," << format_double(row.min) << "," << format_double(row.max)
        << "\n";
  }
}

std::vector<CurveRow> read_curve_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::vector<CurveRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 7) throw std::runtime_error("curve csv '" + path + "': bad row");
    rows.push_back({cells[0], cells[1], std::stoi(cells[2]), std::stoi(cells[3]),
                    parse_double(cells[4]), parse_double(cells[5]), parse_double(cells[6])});
  }
  return rows;
}

void write_gain_csv(const std::string& path, const std::vector<GainRow>& rows) {
  auto out = open_out(path);
  out << "function,method,dim,g0,g1,gfinal\n";
  for (const auto& row : rows) {
    out << row.function << "," << row.method << "," << row.dim << "," << format_double(row.g0) << ","
        << format_double(row.g1) << "," << format_double(row.gfinal) << "\n";
  }
}

std::vector<GainRow> read_gain_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::vector<GainRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 6) throw std::runtime_error("gain csv '" + path + "': bad row");
    rows.push_back({cells[0], cells[1], std::stoi(cells[2]), parse_double(cells[3]),
                    parse_double(cells[4]), parse_double(cells[5])});
  }
  return rows;
}

void write_trace_csv(const std::string& path, const RunRecord& record,
                     const Eigen::VectorXd& optimum_point, double optimum_value) {
  const auto trace = convergence_trace(record, optimum_point, optimum_value);
  auto out = open_out(path);
  out << "generation,f_dist,x_dist";
  for (int j = 0; j < record.dimension; ++j) out << ",x" << j;
  out << "\n";
  for (std::size_t g = 0; g < trace.size(); ++g) {
    out << record.history[g].generation << "," << format_double(trace[g].f_dist) << ","
        << format_double(trace[g].x_dist);
    for (int j = 0; j < record.dimension; ++j) {
      out << "," << format_double(record.history[g].best_genes[j]);
    }
    out << "\n";
  }
}

void write_eigs_csv(const std::string& path, const BootstrapResult& result) {
  auto out = open_out(path);
  out << "index,eigenvalue,boot_low,boot_high\n";
  for (Eigen::Index i = 0; i < result.eigenvalues.size(); ++i) {
    out << i << "," << format_double(result.eigenvalues[i]) << ","
        << format_double(result.intervals[i].low) << "," << format_double(result.intervals[i].high)
        << "\n";
  }
}

std::vector<EigRow> read_eigs_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::vector<EigRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw std::runtime_error("eigs csv '" + path + "': bad row");
    rows.push_back({std::stoi(cells[0]), parse_double(cells[1]), parse_double(cells[2]),
                    parse_double(cells[3])});
  }
  return rows;
}

}  // namespace asga
