#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "tikreg/filters.hpp"
#include "tikreg/sequence_model.hpp"

namespace tikreg {

/// Runs body(i) for i in [0, n) on `threads` workers with static contiguous
/// chunks. body must only write to per-index state.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

struct McSummary {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t replications = 0;
};

/// Mean and standard error of per-replication values, accumulated in index
/// order so the result does not depend on how the values were produced.
McSummary summarize(std::span<const double> values);

/// Empirical E ||apply_filter(w, y) - x||^2 over replications 0..replications-1.
McSummary monte_carlo_risk(const SequenceProblem& problem, const FilterWeights& weights, const Signal& signal,
                           std::size_t replications, std::uint64_t seed, unsigned threads = 1);

}  // namespace tikreg
