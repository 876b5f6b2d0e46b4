#include "asga/driver.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "asga/geometry.hpp"
#include "asga/parallel.hpp"
#include "asga/subspace.hpp"

namespace asga {

void AsgaConfig::validate(int input_dim) const {
  base.validate();
  if (backward_count < 1) throw std::invalid_argument("backward must be >= 1");
  if (base.offspring_size % backward_count != 0) {
    throw std::invalid_argument("backward must divide n (offspring size after back-mapping must be n)");
  }
  if (base.offspring_size / backward_count < 2) {
    throw std::invalid_argument("n / backward must be >= 2 so the reduced population can mate");
  }
  if (active_dim < 0) throw std::invalid_argument("active_dim must be >= 1, or 0 for automatic");
  if (active_dim >= input_dim) {
    throw std::invalid_argument("active_dim must be < the input dimension " + std::to_string(input_dim));
  }
  if (base.initial_size < input_dim + 2) {
    throw std::invalid_argument("n0 must be >= dim + 2 so the first subspace build has enough samples");
  }
}

namespace {

// Halve the active point toward the forward image of the domain center
// (the origin of the scaled space, always feasible) until the polytope
// admits a Chebyshev center.
Eigen::VectorXd repair_active_point(const ActiveSubspace& subspace, Eigen::VectorXd mu_star,
                                    int* repair_count) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    if (chebyshev_center(inactive_polytope(subspace, mu_star)).status == LpStatus::optimal) {
      return mu_star;
    }
    if (attempt == 0) ++*repair_count;
    mu_star *= 0.5;
  }
  return Eigen::VectorXd::Zero(mu_star.size());
}

void record_generation(RunRecord& record, const Population& pop, std::int64_t evaluations) {
  const std::size_t best = detail::best_index(pop);
  record.history.push_back(
      {pop.generation, *pop.members[best].fitness, pop.members[best].genes, evaluations});
}

}  // namespace

RunRecord run_asga(const ObjectiveSpec& objective, const AsgaConfig& config, const Rng& rng) {
  config.validate(objective.dimension);
  if (objective.dimension != objective.domain.dim()) {
    throw std::invalid_argument("run_asga: objective dimension does not match its domain");
  }
  const EvolutionConfig& base = config.base;
  const int reduced_size = base.offspring_size / config.backward_count;

  RunRecord record;
  record.method = "asga";
  record.objective = objective.name;
  record.dimension = objective.dimension;
  record.seed = base.seed;

  std::int64_t evaluations = 0;
  Rng init_rng = rng.derive(1);
  Population pop = random_population(objective.domain, base.initial_size, init_rng);
  detail::evaluate_population(pop, objective, evaluations, base.threads);
  Individual elite = pop.members[detail::best_index(pop)];
  record_generation(record, pop, evaluations);

  SampleStore store;
  for (const auto& member : pop.members) store.append(member.genes, *member.fitness);

  for (int g = 1; g <= base.generations; ++g) {
    Rng gen_rng = rng.derive(2, static_cast<std::uint64_t>(g));
    Rng mate_rng = gen_rng.derive(1);
    Rng mutate_rng = gen_rng.derive(2);

    const Population selected = select_best(pop, reduced_size);

    // The subspace is rebuilt from scratch on everything evaluated so far.
    GradientDiagnostics diag;
    ActiveSubspace subspace = config.active_dim == 0
                                  ? build_subspace(store, objective.domain, 1, &diag)
                                  : build_subspace(store, objective.domain, config.active_dim, &diag);
    if (config.active_dim == 0) {
      subspace.active_dim = choose_active_dim(subspace.eigenvalues);
    }
    record.degenerate_fit_count += diag.rank_deficient_fits;

    Population reduced;
    reduced.generation = selected.generation;
    reduced.members.reserve(selected.size());
    for (const auto& member : selected.members) {
      reduced.members.push_back({subspace.forward(member.genes), std::nullopt});
    }
    reduced = mate_blx(std::move(reduced), base.mate_probability, base.blx_alpha, mate_rng);
    reduced = mutate_gaussian(std::move(reduced), base.mutation_probability, base.mutation_sigma2,
                              mutate_rng);

    Population offspring;
    offspring.generation = g;
    offspring.members.resize(base.offspring_size);
    std::vector<int> repairs(reduced.size(), 0);
    parallel_for(reduced.size(), base.threads, [&](std::size_t j) {
      Rng backward_rng = gen_rng.derive(3, static_cast<std::uint64_t>(j));
      const Eigen::VectorXd mu_star =
          repair_active_point(subspace, reduced.members[j].genes, &repairs[j]);
      const auto points = backward(subspace, mu_star, config.backward_count, backward_rng);
      for (int i = 0; i < config.backward_count; ++i) {
        offspring.members[j * config.backward_count + i] = {points[i], std::nullopt};
      }
    });
    for (int r : repairs) record.repair_count += r;

    detail::evaluate_population(offspring, objective, evaluations, base.threads);
    if (base.elitism) detail::inject_elite(offspring, elite);
    const Individual& best = offspring.members[detail::best_index(offspring)];
    if (*best.fitness < *elite.fitness) elite = best;

    for (const auto& member : offspring.members) store.append(member.genes, *member.fitness);
    record_generation(record, offspring, evaluations);
    pop = std::move(offspring);
  }
  return record;
}

std::int64_t evaluation_budget(const RunRecord& record) {
  return record.history.empty() ? 0 : record.history.back().evaluations;
}

}  // namespace asga
