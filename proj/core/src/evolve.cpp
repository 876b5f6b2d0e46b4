#include "asga/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "asga/parallel.hpp"

namespace asga {

void EvolutionConfig::validate() const {
  if (initial_size < 1) throw std::invalid_argument("n0 must be >= 1");
  if (offspring_size < 1) throw std::invalid_argument("n must be >= 1");
  if (offspring_size > initial_size) throw std::invalid_argument("n must not exceed n0");
  if (generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (mate_probability < 0.0 || mate_probability > 1.0)
    throw std::invalid_argument("mate_probability must be in [0,1]");
  if (mutation_probability < 0.0 || mutation_probability > 1.0)
    throw std::invalid_argument("mutation_probability must be in [0,1]");
  if (blx_alpha < 0.0) throw std::invalid_argument("blx_alpha must be >= 0");
  if (!(mutation_sigma2 > 0.0)) throw std::invalid_argument("mutation_sigma2 must be > 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

Population random_population(const BoxDomain& domain, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("random_population: count must be >= 1");
  Population pop;
  pop.members.resize(count);
  for (auto& member : pop.members) {
    member.genes.resize(domain.dim());
    for (int j = 0; j < domain.dim(); ++j) {
      member.genes[j] = rng.uniform(domain.lower()[j], domain.upper()[j]);
    }
  }
  return pop;
}

Population select_best(const Population& pop, int count) {
  if (count < 0 || static_cast<std::size_t>(count) > pop.size()) {
    throw std::invalid_argument("select_best: count exceeds population size");
  }
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (!pop.members[i].fitness) {
      throw std::invalid_argument("select_best: member " + std::to_string(i) + " is unevaluated");
    }
  }
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *pop.members[a].fitness < *pop.members[b].fitness;
  });
  Population out;
  out.generation = pop.generation;
  out.members.reserve(count);
  for (int i = 0; i < count; ++i) out.members.push_back(pop.members[order[i]]);
  return out;
}

Population mate_blx(Population pop, double probability, double blx_alpha, Rng& rng) {
  for (std::size_t i = 0; i + 1 < pop.size(); i += 2) {
    if (rng.uniform() >= probability) continue;
    const double gamma = rng.uniform(-blx_alpha, 1.0 + blx_alpha);
    Individual& a = pop.members[i];
    Individual& b = pop.members[i + 1];
    const Eigen::VectorXd child_a = (1.0 - gamma) * a.genes + gamma * b.genes;
    const Eigen::VectorXd child_b = gamma * a.genes + (1.0 - gamma) * b.genes;
    if (child_a != a.genes) a.fitness.reset();
    if (child_b != b.genes) b.fitness.reset();
    a.genes = child_a;
    b.genes = child_b;
  }
  return pop;
}

Population mutate_gaussian(Population pop, double probability, double sigma2, Rng& rng) {
  const double sigma = std::sqrt(sigma2);
  for (auto& member : pop.members) {
    if (rng.uniform() >= probability) continue;
    bool changed = false;
    for (Eigen::Index j = 0; j < member.genes.size(); ++j) {
      const double eps = rng.normal(0.0, sigma);
      const double next = member.genes[j] + eps * member.genes[j];
      if (next != member.genes[j]) changed = true;
      member.genes[j] = next;
    }
    if (changed) member.fitness.reset();
  }
  return pop;
}

namespace detail {

void evaluate_population(Population& pop, const ObjectiveSpec& objective, std::int64_t& evaluations,
                         int threads) {
  parallel_for(pop.size(), threads,
               [&](std::size_t i) { pop.members[i].fitness = evaluate(objective, pop.members[i].genes); });
  evaluations += static_cast<std::int64_t>(pop.size());
}

std::size_t best_index(const Population& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (*pop.members[i].fitness < *pop.members[best].fitness) best = i;
  }
  return best;
}

void inject_elite(Population& pop, const Individual& elite) {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (*pop.members[i].fitness >= *pop.members[worst].fitness) worst = i;
  }
  if (*elite.fitness < *pop.members[worst].fitness) pop.members[worst] = elite;
}

}  // namespace detail

namespace {

void record_generation(RunRecord& record, const Population& pop, std::int64_t evaluations) {
  const std::size_t best = detail::best_index(pop);
  record.history.push_back(
      {pop.generation, *pop.members[best].fitness, pop.members[best].genes, evaluations});
}

}  // namespace

RunRecord run_ga(const ObjectiveSpec& objective, const EvolutionConfig& config, const Rng& rng) {
  config.validate();
  if (objective.dimension != objective.domain.dim()) {
    throw std::invalid_argument("run_ga: objective dimension does not match its domain");
  }

  RunRecord record;
  record.method = "ga";
  record.objective = objective.name;
  record.dimension = objective.dimension;
  record.seed = config.seed;

  std::int64_t evaluations = 0;
  Rng init_rng = rng.derive(1);
  Population pop = random_population(objective.domain, config.initial_size, init_rng);
  detail::evaluate_population(pop, objective, evaluations, config.threads);
  Individual elite = pop.members[detail::best_index(pop)];
  record_generation(record, pop, evaluations);

  for (int g = 1; g <= config.generations; ++g) {
    Rng gen_rng = rng.derive(2, static_cast<std::uint64_t>(g));
    Rng mate_rng = gen_rng.derive(1);
    Rng mutate_rng = gen_rng.derive(2);

    pop = select_best(pop, config.offspring_size);
    pop = mate_blx(std::move(pop), config.mate_probability, config.blx_alpha, mate_rng);
    pop = mutate_gaussian(std::move(pop), config.mutation_probability, config.mutation_sigma2,
                          mutate_rng);
    for (auto& member : pop.members) {
      Eigen::VectorXd clipped = objective.domain.clip(member.genes);
      if (clipped != member.genes) {
        member.genes = std::move(clipped);
        member.fitness.reset();
      }
    }
    pop.generation = g;
    detail::evaluate_population(pop, objective, evaluations, config.threads);
    if (config.elitism) detail::inject_elite(pop, elite);
    const Individual& best = pop.members[detail::best_index(pop)];
    if (*best.fitness < *elite.fitness) elite = best;
    record_generation(record, pop, evaluations);
  }
  return record;
}

}  // namespace asga
