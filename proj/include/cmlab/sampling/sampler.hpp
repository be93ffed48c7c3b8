#pragma once

#include <vector>

#include "cmlab/consistency/model.hpp"
#include "cmlab/core/vec.hpp"

namespace cmlab {

class RandomStream;

// Decreasing intermediate time points tau_1 > ... > tau_{N-1} in
// (epsilon, T). An empty plan is plain one-step generation.
struct SamplePlan {
  std::vector<double> timepoints;

  int steps() const { return static_cast<int>(timepoints.size()) + 1; }
  void validate(double epsilon, double horizon) const;
};

// x_hat_T ~ N(0, T^2 I), returns f(x_hat_T, T) per sample.
Batch sample_one_step(const ConsistencyMap& model, double horizon, int count, RandomStream& rng);

// Multistep sampling: after the initial full step, alternate noise injection
// x + sqrt(tau_n^2 - eps^2) z with denoising f(., tau_n). With the same rng
// stream and an empty plan this is bit-identical to sample_one_step.
Batch sample_multistep(const ConsistencyMap& model, const SamplePlan& plan, double epsilon,
                       double horizon, int count, RandomStream& rng);

}  // namespace cmlab
