#include "cmlab/sampling/search.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/rng.hpp"

namespace cmlab {

SamplePlan greedy_timepoint_search(const ConsistencyMap& model, double epsilon, double horizon,
                                   const SampleMetric& metric, const SearchConfig& cfg) {
  SamplePlan plan;

  auto objective = [&](const SamplePlan& candidate) {
    RandomStream rng(cfg.noise_seed);
    const Batch samples =
        sample_multistep(model, candidate, epsilon, horizon, cfg.eval_count, rng);
    const double value = metric(samples);
    if (!std::isfinite(value)) throw numeric_error("greedy_timepoint_search: non-finite metric");
    return value;
  };

  for (int step = 1; step < cfg.max_steps; ++step) {
    const double upper = plan.timepoints.empty() ? horizon : plan.timepoints.back();
    double lo = epsilon;
    double hi = upper;
    SamplePlan candidate = plan;
    candidate.timepoints.push_back(0.0);
    for (int it = 0; it < cfg.iterations; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      candidate.timepoints.back() = m1;
      const double f1 = objective(candidate);
      candidate.timepoints.back() = m2;
      const double f2 = objective(candidate);
      if (f1 < f2) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    candidate.timepoints.back() = 0.5 * (lo + hi);
    plan = std::move(candidate);
  }
  return plan;
}

}  // namespace cmlab
