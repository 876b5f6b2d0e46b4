// Command line front end: single optimization runs, the benchmark suite,
// eigenvalue dumps and gain-table reports. Progress goes to stderr; data
// goes to CSV files under the output directory (or stdout summaries).

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "asga/driver.hpp"
#include "asga/evolve.hpp"
#include "asga/geometry.hpp"
#include "asga/lab.hpp"
#include "asga/objective.hpp"
#include "asga/subspace.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::string default_out_dir() {
  if (const char* env = std::getenv("ASGA_OUT_DIR"); env && *env) return env;
  return "out";
}

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void add_config_file(CLI::App* cmd) {
  cmd->set_config("--config", "", "Key=value file with the same names as the long flags");
  cmd->allow_config_extras(false);
}

int parse_active_dim(const std::string& text) {
  if (text == "auto") return 0;
  try {
    size_t pos = 0;
    const int value = std::stoi(text, &pos);
    if (pos == text.size() && value >= 1) return value;
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("--active-dim", "expected a positive integer or 'auto'");
}

struct OptimizeArgs {
  std::string function = "rosenbrock";
  std::string dataset;
  std::string kernel = "gaussian";
  double shape = 1.0;
  double penalty = 10.0;
  int dim = 2;
  std::string method = "ga";
  int n0 = 200;
  int n = 100;
  int generations = 10;
  double mate_prob = 0.5;
  double mutation_prob = 0.5;
  double blx_alpha = 1.0;
  double sigma2 = 0.1;
  bool no_elitism = false;
  std::string active_dim = "1";
  int backward = 2;
  std::uint64_t seed = 0;
  std::string out_dir = default_out_dir();
  int threads = default_threads();
};

asga::ObjectiveSpec build_objective(const OptimizeArgs& args) {
  if (args.function == "rbf") {
    if (args.dataset.empty()) {
      throw std::invalid_argument("--dataset is required when --function rbf");
    }
    const asga::SampleDataset data = asga::read_sample_csv(args.dataset);
    const asga::RbfSurrogate surrogate =
        asga::RbfSurrogate::fit(data.inputs, data.outputs, asga::rbf_kernel_from_name(args.kernel),
                                args.shape, args.penalty);
    return asga::make_rbf_objective(surrogate);
  }
  return asga::make_benchmark(args.function, args.dim);
}

int cmd_optimize(const OptimizeArgs& args) {
  const asga::ObjectiveSpec objective = build_objective(args);

  asga::EvolutionConfig base;
  base.initial_size = args.n0;
  base.offspring_size = args.n;
  base.generations = args.generations;
  base.mate_probability = args.mate_prob;
  base.mutation_probability = args.mutation_prob;
  base.blx_alpha = args.blx_alpha;
  base.mutation_sigma2 = args.sigma2;
  base.elitism = !args.no_elitism;
  base.seed = args.seed;
  base.threads = args.threads;

  asga::RunRecord record;
  const asga::Rng rng(args.seed);
  const auto started = std::chrono::steady_clock::now();
  if (args.method == "ga") {
    base.validate();
    record = asga::run_ga(objective, base, rng);
  } else if (args.method == "asga") {
    asga::AsgaConfig config;
    config.base = base;
    config.active_dim = parse_active_dim(args.active_dim);
    config.backward_count = args.backward;
    config.validate(objective.dimension);
    record = asga::run_asga(objective, config, rng);
  } else {
    throw std::invalid_argument("--method must be 'ga' or 'asga'");
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  fs::create_directories(args.out_dir);
  const std::string stem = "run_" + record.method + "_" + record.objective + "_d" +
                           std::to_string(record.dimension) + "_seed" + std::to_string(record.seed);
  const std::string run_path = (fs::path(args.out_dir) / (stem + ".csv")).string();
  asga::write_run_csv(run_path, record);
  std::cerr << "wrote " << run_path << "\n";

  if (objective.known_optimum_point && objective.known_optimum_value) {
    const std::string trace_path = (fs::path(args.out_dir) / ("trace_" + stem + ".csv")).string();
    asga::write_trace_csv(trace_path, record, *objective.known_optimum_point,
                          *objective.known_optimum_value);
    std::cerr << "wrote " << trace_path << "\n";
  }
  if (record.repair_count > 0) {
    std::cerr << "feasibility repairs: " << record.repair_count << "\n";
  }

  std::cout << "method=" << record.method << " function=" << record.objective
            << " dim=" << record.dimension << " final_best="
            << asga::format_double(record.best().best_fitness)
            << " evaluations=" << asga::evaluation_budget(record)
            << " wall_time_s=" << asga::format_double(elapsed) << "\n";
  return kExitOk;
}

struct BenchArgs {
  std::string plan = "desk";
  std::uint64_t seed = 20210000;
  int runs = 0;  // 0 keeps the plan default
  std::string out_dir = default_out_dir();
  int threads = default_threads();
};

int cmd_bench(const BenchArgs& args) {
  asga::ExperimentPlan plan;
  if (args.plan == "desk") {
    plan = asga::desk_plan();
  } else if (args.plan == "paper") {
    plan = asga::paper_plan();
  } else {
    throw std::invalid_argument("--plan must be 'desk' or 'paper'");
  }
  plan.master_seed = args.seed;
  if (args.runs > 0) plan.runs_per_cell = args.runs;

  const auto cells = asga::run_plan(plan, args.threads, &std::cerr);

  fs::create_directories(fs::path(args.out_dir) / "runs");
  for (const auto& cell : cells) {
    for (std::size_t r = 0; r < cell.runs.size(); ++r) {
      const std::string name = "run_" + cell.method + "_" + cell.function + "_d" +
                               std::to_string(cell.budget.dim) + "_r" + std::to_string(r) + ".csv";
      asga::write_run_csv((fs::path(args.out_dir) / "runs" / name).string(), cell.runs[r]);
    }
  }
  asga::write_curve_csv((fs::path(args.out_dir) / "curves.csv").string(), asga::curve_table(cells));
  asga::write_gain_csv((fs::path(args.out_dir) / "gains.csv").string(), asga::gain_table(cells));
  std::cerr << "wrote " << (fs::path(args.out_dir) / "curves.csv").string() << " and "
            << (fs::path(args.out_dir) / "gains.csv").string() << "\n";
  return kExitOk;
}

struct EigsArgs {
  std::string function = "rosenbrock";
  int dim = 15;
  int samples = 500;
  int nboot = 100;
  std::uint64_t seed = 0;
  std::string out_dir = default_out_dir();
};

int cmd_eigs(const EigsArgs& args) {
  const asga::ObjectiveSpec objective = asga::make_benchmark(args.function, args.dim);
  asga::Rng rng(args.seed);
  asga::Rng sample_rng = rng.derive(1);
  asga::Rng boot_rng = rng.derive(2);

  asga::Population pop = asga::random_population(objective.domain, args.samples, sample_rng);
  asga::SampleStore store;
  for (const auto& member : pop.members) {
    store.append(member.genes, asga::evaluate(objective, member.genes));
  }
  const asga::BootstrapResult result =
      asga::bootstrap_eigenvalues(store, objective.domain, args.nboot, boot_rng);

  fs::create_directories(args.out_dir);
  const std::string path =
      (fs::path(args.out_dir) / ("eigs_" + args.function + "_d" + std::to_string(args.dim) + ".csv"))
          .string();
  asga::write_eigs_csv(path, result);
  std::cerr << "wrote " << path << "\n";
  return kExitOk;
}

struct ReportArgs {
  std::string in_dir;
  std::string out_dir = default_out_dir();
};

int cmd_report(const ReportArgs& args) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(args.in_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".csv") {
      paths.push_back(entry.path().string());
    }
  }
  if (paths.empty()) {
    throw std::runtime_error("report: no run_*.csv files under '" + args.in_dir + "'");
  }
  std::sort(paths.begin(), paths.end());

  std::vector<asga::RunRecord> records;
  records.reserve(paths.size());
  for (const auto& path : paths) records.push_back(asga::read_run_csv(path));

  fs::create_directories(args.out_dir);
  const std::string out = (fs::path(args.out_dir) / "gains.csv").string();
  asga::write_gain_csv(out, asga::gain_table_from_records(records));
  std::cerr << "wrote " << out << " from " << records.size() << " runs\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genetic optimization in a data-driven active subspace"};
  app.require_subcommand(1);

  OptimizeArgs opt;
  CLI::App* optimize = app.add_subcommand("optimize", "Run one GA or ASGA optimization");
  optimize->add_option("--function", opt.function,
                       "Benchmark name or 'rbf' for a surrogate from --dataset");
  optimize->add_option("--dim", opt.dim, "Input dimension (benchmarks only)");
  optimize->add_option("--dataset", opt.dataset, "CSV with k input columns then one output column");
  optimize->add_option("--kernel", opt.kernel, "RBF kernel: gaussian|multiquadric|thin_plate");
  optimize->add_option("--shape", opt.shape, "RBF shape parameter");
  optimize->add_option("--penalty", opt.penalty, "Penalty value outside the surrogate domain");
  optimize->add_option("--method", opt.method, "ga or asga");
  optimize->add_option("--n0", opt.n0, "Initial population size");
  optimize->add_option("--n", opt.n, "Offspring size per generation");
  optimize->add_option("--generations", opt.generations, "Number of evolution steps");
  optimize->add_option("--mate-prob", opt.mate_prob, "Mate probability");
  optimize->add_option("--mutation-prob", opt.mutation_prob, "Mutation probability");
  optimize->add_option("--blx-alpha", opt.blx_alpha, "BLX-alpha blend range");
  optimize->add_option("--sigma2", opt.sigma2, "Mutation variance");
  optimize->add_flag("--no-elitism", opt.no_elitism, "Disable carrying the best individual forward");
  optimize->add_option("--active-dim", opt.active_dim, "Active dimension M, or 'auto'");
  optimize->add_option("--backward", opt.backward, "Back-mapped points B per reduced individual");
  optimize->add_option("--seed", opt.seed, "Run seed");
  optimize->add_option("--out", opt.out_dir, "Output directory (env ASGA_OUT_DIR overrides default)");
  optimize->add_option("--threads", opt.threads, "Worker threads for fitness evaluation");
  add_config_file(optimize);

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run an experiment plan and write curve/gain CSVs");
  bench_cmd->add_option("--plan", bench.plan, "desk or paper");
  bench_cmd->add_option("--seed", bench.seed, "Master seed for the whole plan");
  bench_cmd->add_option("--runs", bench.runs, "Override runs per cell");
  bench_cmd->add_option("--out", bench.out_dir, "Output directory");
  bench_cmd->add_option("--threads", bench.threads, "Parallel runs");
  add_config_file(bench_cmd);

  EigsArgs eigs;
  CLI::App* eigs_cmd =
      app.add_subcommand("eigs", "Sample a benchmark and dump eigenvalues with bootstrap intervals");
  eigs_cmd->add_option("--function", eigs.function, "Benchmark name");
  eigs_cmd->add_option("--dim", eigs.dim, "Input dimension");
  eigs_cmd->add_option("--samples", eigs.samples, "Uniform samples to draw");
  eigs_cmd->add_option("--nboot", eigs.nboot, "Bootstrap resamples");
  eigs_cmd->add_option("--seed", eigs.seed, "Seed");
  eigs_cmd->add_option("--out", eigs.out_dir, "Output directory");
  add_config_file(eigs_cmd);

  ReportArgs report;
  CLI::App* report_cmd = app.add_subcommand("report", "Aggregate run CSVs into the gain table");
  report_cmd->add_option("--in", report.in_dir, "Directory scanned for run_*.csv")->required();
  report_cmd->add_option("--out", report.out_dir, "Output directory");
  add_config_file(report_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(opt);
    if (bench_cmd->parsed()) return cmd_bench(bench);
    if (eigs_cmd->parsed()) return cmd_eigs(eigs);
    if (report_cmd->parsed()) return cmd_report(report);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
