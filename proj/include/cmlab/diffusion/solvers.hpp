#pragma once

#include <vector>

#include "cmlab/core/vec.hpp"
#include "cmlab/diffusion/score_field.hpp"
#include "cmlab/diffusion/time_grid.hpp"

namespace cmlab {

enum class SolverKind { euler, heun };

// One Euler step of the empirical PF ODE dx/dt = -t s(x, t), integrating from
// t_from down to t_to: x - (t_to - t_from) t_from s(x, t_from).
Vec euler_step(const ScoreField& score, VecView x, double t_from, double t_to);

// Heun (trapezoid) step: slope at t_from, Euler predictor, slope at t_to,
// average.
Vec heun_step(const ScoreField& score, VecView x, double t_from, double t_to);

Vec solver_step(SolverKind kind, const ScoreField& score, VecView x, double t_from, double t_to);

// Integrates from t_N down to t_1 over the grid boundaries. trajectory[0] is
// the initial state at T, trajectory[N-1] the accepted sample at epsilon.
// Throws numeric_error (with the step index) on non-finite state.
std::vector<Vec> solve_pf_ode(const ScoreField& score, const TimeGrid& grid, VecView x_horizon,
                              SolverKind kind = SolverKind::heun);

// Closed-form PF ODE solution for a single-Gaussian data distribution
// N(mean, var I): x(t_to) = mean + (x - mean) sqrt((var + t_to^2)/(var + t_from^2)).
Vec gaussian_flow(VecView x, double t_from, double t_to, VecView mean, double variance);

}  // namespace cmlab
