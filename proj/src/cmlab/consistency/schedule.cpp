#include "cmlab/consistency/schedule.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"

namespace cmlab {

void TrainSchedule::validate() const {
  if (s0 < 2 || s0 >= s1) throw input_error("TrainSchedule: need 2 <= s0 < s1");
  if (!(mu0 > 0.0) || !(mu0 < 1.0)) throw input_error("TrainSchedule: need 0 < mu0 < 1");
  if (total_steps <= 0) throw input_error("TrainSchedule: need K > 0");
  if (fixed_steps && *fixed_steps < 2) throw input_error("TrainSchedule: fixed N must be >= 2");
  if (fixed_mu && (!(*fixed_mu >= 0.0) || !(*fixed_mu < 1.0)))
    throw input_error("TrainSchedule: fixed mu must be in [0, 1)");
}

int n_schedule(long k, const TrainSchedule& sched) {
  if (sched.fixed_steps) return *sched.fixed_steps;
  const double s02 = static_cast<double>(sched.s0) * sched.s0;
  const double s1p = static_cast<double>(sched.s1) + 1.0;
  const double inside = static_cast<double>(k) / sched.total_steps * (s1p * s1p - s02) + s02;
  return static_cast<int>(std::ceil(std::sqrt(inside) - 1.0)) + 1;
}

double mu_schedule(long k, const TrainSchedule& sched) {
  if (sched.fixed_mu) return *sched.fixed_mu;
  const int n = n_schedule(k, sched);
  return std::exp(sched.s0 * std::log(sched.mu0) / n);
}

}  // namespace cmlab
