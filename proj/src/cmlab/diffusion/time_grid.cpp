#include "cmlab/diffusion/time_grid.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"

namespace cmlab {

double TimeGrid::max_dt() const {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i)
    m = std::max(m, boundaries[i + 1] - boundaries[i]);
  return m;
}

TimeGrid karras_grid(double epsilon, double horizon, double rho, int steps) {
  if (!(epsilon > 0.0) || !(epsilon < horizon)) throw input_error("karras_grid: need 0 < epsilon < T");
  if (steps < 2) throw input_error("karras_grid: need N >= 2");
  if (!(rho >= 1.0)) throw input_error("karras_grid: need rho >= 1");

  TimeGrid g;
  g.epsilon = epsilon;
  g.horizon = horizon;
  g.rho = rho;
  g.steps = steps;
  g.boundaries.resize(steps);

  const double lo = std::pow(epsilon, 1.0 / rho);
  const double hi = std::pow(horizon, 1.0 / rho);
  for (int i = 0; i < steps; ++i) {
    const double frac = static_cast<double>(i) / (steps - 1);
    g.boundaries[i] = std::pow(lo + frac * (hi - lo), rho);
  }
  // Endpoints exact by construction.
  g.boundaries.front() = epsilon;
  g.boundaries.back() = horizon;
  return g;
}

std::vector<double> editing_timepoints(double epsilon, double horizon, double rho, int steps) {
  if (!(epsilon > 0.0) || !(epsilon < horizon))
    throw input_error("editing_timepoints: need 0 < epsilon < T");
  if (steps < 2) throw input_error("editing_timepoints: need N >= 2");

  const double lo = std::pow(epsilon, 1.0 / rho);
  const double hi = std::pow(horizon, 1.0 / rho);
  std::vector<double> t(steps);
  for (int i = 0; i < steps; ++i) {
    const double frac = static_cast<double>(i) / (steps - 1);
    t[i] = std::pow(hi + frac * (lo - hi), rho);
  }
  t.front() = horizon;
  t.back() = epsilon;
  return t;
}

}  // namespace cmlab
