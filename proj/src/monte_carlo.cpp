#include "tikreg/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "tikreg/errors.hpp"
#include "tikreg/numeric.hpp"

namespace tikreg {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

McSummary summarize(std::span<const double> values) {
  McSummary out;
  out.replications = values.size();
  if (values.empty()) return out;
  // shifted accumulation keeps identical inputs exact
  const double shift = values.front();
  CompensatedSum dev;
  for (double v : values) dev.add(v - shift);
  const double n = static_cast<double>(values.size());
  out.mean = shift + dev.value() / n;
  if (values.size() < 2) return out;
  CompensatedSum sq;
  for (double v : values) {
    const double d = v - out.mean;
    sq.add(d * d);
  }
  out.std_error = std::sqrt(sq.value() / (n - 1.0) / n);
  return out;
}

McSummary monte_carlo_risk(const SequenceProblem& problem, const FilterWeights& weights, const Signal& signal,
                           std::size_t replications, std::uint64_t seed, unsigned threads) {
  if (replications < 2) throw PreconditionError("monte_carlo_risk needs replications >= 2");
  if (weights.size() != problem.size()) throw DimensionError("weights length does not match problem N");
  std::vector<double> losses(replications);
  parallel_for(replications, threads, [&](std::size_t rep) {
    const auto y = simulate_observation(problem, signal, seed, rep);
    const auto estimate = apply_filter(weights, y);
    CompensatedSum loss;
    for (std::size_t i = 0; i < signal.size(); ++i) {
      const double d = estimate.coeffs[i] - signal.coeffs[i];
      loss.add(d * d);
    }
    losses[rep] = loss.value();
  });
  return summarize(losses);
}

}  // namespace tikreg
