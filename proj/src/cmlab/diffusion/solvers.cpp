#include "cmlab/diffusion/solvers.hpp"

#include <cmath>
#include <string>

#include "cmlab/core/errors.hpp"

namespace cmlab {

Vec euler_step(const ScoreField& score, VecView x, double t_from, double t_to) {
  const Vec s = score.eval(x, t_from);
  const double h = t_to - t_from;
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - h * t_from * s[i];
  return y;
}

Vec heun_step(const ScoreField& score, VecView x, double t_from, double t_to) {
  const double h = t_to - t_from;
  const Vec s0 = score.eval(x, t_from);
  Vec xe(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xe[i] = x[i] - h * t_from * s0[i];
  const Vec s1 = score.eval(xe, t_to);
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = x[i] + 0.5 * h * (-t_from * s0[i] - t_to * s1[i]);
  return y;
}

Vec solver_step(SolverKind kind, const ScoreField& score, VecView x, double t_from,
                double t_to) {
  return kind == SolverKind::euler ? euler_step(score, x, t_from, t_to)
                                   : heun_step(score, x, t_from, t_to);
}

std::vector<Vec> solve_pf_ode(const ScoreField& score, const TimeGrid& grid, VecView x_horizon,
                              SolverKind kind) {
  std::vector<Vec> traj;
  traj.reserve(grid.steps);
  traj.emplace_back(x_horizon.begin(), x_horizon.end());
  for (int i = grid.steps - 1; i > 0; --i) {
    Vec next = solver_step(kind, score, traj.back(), grid.boundaries[i], grid.boundaries[i - 1]);
    if (!all_finite(next))
      throw numeric_error("solve_pf_ode: non-finite state at step " +
                          std::to_string(grid.steps - i));
    traj.push_back(std::move(next));
  }
  return traj;
}

Vec gaussian_flow(VecView x, double t_from, double t_to, VecView mean, double variance) {
  const double c = std::sqrt((variance + t_to * t_to) / (variance + t_from * t_from));
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = mean[i] + c * (x[i] - mean[i]);
  return y;
}

}  // namespace cmlab
