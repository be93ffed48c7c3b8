#pragma once

#include <cstdint>
#include <functional>

#include "cmlab/sampling/sampler.hpp"

namespace cmlab {

// Maps a sample batch to a scalar, lower is better.
using SampleMetric = std::function<double(const Batch&)>;

struct SearchConfig {
  int max_steps = 2;        // total sampling steps; max_steps-1 points searched
  int iterations = 30;      // ternary-search iterations per point
  int eval_count = 1024;    // samples per metric evaluation
  std::uint64_t noise_seed = 7;  // fixed evaluation noise (common random numbers)
};

// Greedy multistep-plan optimizer: time points are pinpointed one at a time
// with ternary search over (epsilon, previous point), earlier points held
// fixed. Assumes the metric is unimodal in the next point. The metric is
// evaluated on samples drawn with a fixed seed, so the objective each search
// sees is deterministic. Throws on non-finite metric values.
SamplePlan greedy_timepoint_search(const ConsistencyMap& model, double epsilon, double horizon,
                                   const SampleMetric& metric, const SearchConfig& cfg);

}  // namespace cmlab
