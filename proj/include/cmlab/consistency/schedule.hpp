#pragma once

#include <optional>

namespace cmlab {

// Progressive discretization / EMA-decay schedules for consistency training:
//   N(k) = ceil(sqrt(k/K ((s1+1)^2 - s0^2) + s0^2) - 1) + 1
//   mu(k) = exp(s0 log mu0 / N(k))
// The overrides reproduce the fixed-constant baseline runs.
struct TrainSchedule {
  long total_steps = 50000;  // K
  int s0 = 2;
  int s1 = 150;
  double mu0 = 0.9;
  std::optional<int> fixed_steps;    // override N(k)
  std::optional<double> fixed_mu;    // override mu(k)

  void validate() const;
};

int n_schedule(long k, const TrainSchedule& sched);
double mu_schedule(long k, const TrainSchedule& sched);

}  // namespace cmlab
