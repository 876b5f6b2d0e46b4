#pragma once

#include <cstdint>

#include "asga/evolve.hpp"
#include "asga/objective.hpp"
#include "asga/rng.hpp"

namespace asga {

/// GA settings extended with the two subspace hyper-parameters: the active
/// dimension M (0 = re-chosen every generation from the spectral gap) and
/// the number of back-mapped points B per reduced individual.
struct AsgaConfig {
  EvolutionConfig base;
  int active_dim = 1;     // M; 0 selects the spectral-gap choice per generation
  int backward_count = 2;  // B; must divide N

  void validate(int input_dim) const;
};

/// Subspace-accelerated GA: each generation selects the N/B best, rebuilds
/// the active subspace from every evaluated sample so far, projects the
/// selection, mates and mutates in the reduced space, back-maps B points per
/// reduced individual and evaluates the resulting N offspring.
RunRecord run_asga(const ObjectiveSpec& objective, const AsgaConfig& config, const Rng& rng);

/// Total objective calls recorded by a run (N0 + generations * N for both
/// loop variants under default settings).
std::int64_t evaluation_budget(const RunRecord& record);

}  // namespace asga
