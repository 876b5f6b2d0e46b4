#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asga/objective.hpp"
#include "asga/rng.hpp"

namespace asga {

struct Individual {
  Eigen::VectorXd genes;
  std::optional<double> fitness;
};

struct Population {
  std::vector<Individual> members;
  int generation = 0;

  std::size_t size() const { return members.size(); }
};

/// Shared settings for the evolutionary loops. The defaults are the
/// operator parameters used throughout the experiments: BLX-alpha 1.0 and
/// multiplicative Gaussian noise with sigma^2 = 0.1, both fired with
/// probability 0.5.
struct EvolutionConfig {
  int initial_size = 200;    // N0
  int offspring_size = 100;  // N, must be <= N0
  int generations = 10;
  double mate_probability = 0.5;
  double mutation_probability = 0.5;
  double blx_alpha = 1.0;
  double mutation_sigma2 = 0.1;
  bool elitism = true;
  std::uint64_t seed = 0;
  int threads = 1;  // fitness evaluation fan-out; never affects the draws

  void validate() const;
};

/// count individuals drawn uniformly from the box; fitness unset.
Population random_population(const BoxDomain& domain, int count, Rng& rng);

/// The count members with smallest fitness, stable on (fitness, index).
/// Throws if any member is unevaluated or count exceeds the population.
Population select_best(const Population& pop, int count);

/// BLX-alpha blend crossover on adjacent pairs (0,1), (2,3), ... Each pair
/// mates with the given probability using a single gamma drawn uniformly
/// from [-alpha, 1+alpha); children are
///   a' = (1-gamma) a + gamma b,   b' = gamma a + (1-gamma) b.
/// Fitness is dropped for members whose genes changed; an odd trailing
/// member passes through.
Population mate_blx(Population pop, double probability, double blx_alpha, Rng& rng);

/// Multiplicative Gaussian mutation: with the given probability per
/// individual, x <- x + eps .* x with eps_i ~ N(0, sigma2) i.i.d. per gene.
Population mutate_gaussian(Population pop, double probability, double sigma2, Rng& rng);

struct GenerationRecord {
  int generation = 0;
  double best_fitness = 0.0;
  Eigen::VectorXd best_genes;
  std::int64_t evaluations = 0;  // cumulative objective calls
};

/// Immutable trace of one optimization run; history[0] is the initial
/// population, one entry per generation after that.
struct RunRecord {
  std::string method;
  std::string objective;
  int dimension = 0;
  std::uint64_t seed = 0;
  std::vector<GenerationRecord> history;
  int repair_count = 0;          // infeasible-polytope repairs (asga only)
  int degenerate_fit_count = 0;  // rank-deficient local gradient fits (asga only)

  int generations() const { return static_cast<int>(history.size()) - 1; }
  const GenerationRecord& best() const { return history.back(); }
};

/// Standard GA: random init, then per generation select the N best, mate,
/// mutate, clip to the domain and re-evaluate. With elitism on, the best
/// individual seen so far replaces the worst offspring each generation.
RunRecord run_ga(const ObjectiveSpec& objective, const EvolutionConfig& config, const Rng& rng);

namespace detail {

/// Evaluates every member (unconditionally, so budgets stay exact across
/// methods) and bumps the cumulative call counter. Fan-out across threads
/// when threads > 1; draws no random numbers.
void evaluate_population(Population& pop, const ObjectiveSpec& objective, std::int64_t& evaluations,
                         int threads);

/// Index of the best member by (fitness, index).
std::size_t best_index(const Population& pop);

/// Replaces the worst member with the stored elite when the elite beats it.
void inject_elite(Population& pop, const Individual& elite);

}  // namespace detail

}  // namespace asga
