#pragma once

#include <vector>

namespace cmlab {

// Discretization t_1 = epsilon < ... < t_N = T of the sampling horizon.
struct TimeGrid {
  double epsilon = 0.0;
  double horizon = 0.0;  // T
  double rho = 7.0;
  int steps = 0;  // N
  std::vector<double> boundaries;

  double max_dt() const;
};

// Power-warped boundaries t_i = (eps^{1/rho} + (i-1)/(N-1) (T^{1/rho} - eps^{1/rho}))^rho.
// Endpoints are pinned exactly; regeneration with the same inputs is
// bit-identical.
TimeGrid karras_grid(double epsilon, double horizon, double rho, int steps);

// Decreasing variant used by the zero-shot editing tasks:
// t_i = (T^{1/rho} + (i-1)/(N-1) (eps^{1/rho} - T^{1/rho}))^rho, so t_1 = T
// and t_N = eps.
std::vector<double> editing_timepoints(double epsilon, double horizon, double rho, int steps);

}  // namespace cmlab
