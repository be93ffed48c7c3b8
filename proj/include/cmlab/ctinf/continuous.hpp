#pragma once

#include <functional>
#include <vector>

#include "cmlab/consistency/model.hpp"
#include "cmlab/core/vec.hpp"
#include "cmlab/diffusion/score_field.hpp"
#include "cmlab/diffusion/time_grid.hpp"

namespace cmlab {

class RandomStream;

// Linear time reparameterization tau(u) = eps + u (T - eps); its inverse has
// the constant derivative 1/(T - eps), which keeps the (N-1)^p scaling checks
// clean.
struct TimeReparam {
  double epsilon = 0.002;
  double horizon = 80.0;

  double tau(double u) const { return epsilon + u * (horizon - epsilon); }
  double tau_inv_deriv() const { return 1.0 / (horizon - epsilon); }
};

// Grid induced by the reparameterization: t_j = tau((j-1)/(N-1)), j = 1..N.
TimeGrid reparam_grid(const TimeReparam& reparam, int steps);

// Maps u ~ U[0,1) to the 1-based interval index n in {1..N-1} so that a
// discrete loss drawing n and a continuous loss drawing u share randomness.
int coupled_index(double u, int steps);

// Monte Carlo batch over (x ~ p_data, u ~ U[0,1], z ~ N(0,I)); the perturbed
// point is x + tau(u) z.
struct CtInfBatch {
  Batch x;
  Batch z;
  std::vector<double> u;
};

using TimeWeight = std::function<double(double)>;  // empty: lambda(t) = (tau^-1)'(t)

// Continuous-time distillation losses. The bracketed tangent
// df/dt - t (df/dx) s(x_t, t) is one jvp call with tangents (-t s, 1).
// Squared-l2 carries weight lambda / (tau^-1)'^2; l1 carries lambda / (tau^-1)'.
double cd_inf_l2(const ConsistencyMap& f, const ScoreField& score, const CtInfBatch& batch,
                 const TimeReparam& reparam, const TimeWeight& weight = {});
double cd_inf_l1(const ConsistencyMap& f, const ScoreField& score, const CtInfBatch& batch,
                 const TimeReparam& reparam, const TimeWeight& weight = {});

// Same value as cd_inf_l2, assembled through the explicit metric curvature
// G = 2I quadratic form (1/2 lambda/(tau^-1)'^2 w^T G w) instead of the
// norm shortcut.
double cd_inf_l2_via_curvature(const ConsistencyMap& f, const ScoreField& score,
                               const CtInfBatch& batch, const TimeReparam& reparam,
                               const TimeWeight& weight = {});

// Stopgrad pseudo-objectives. Their values are meaningless as convergence
// curves; only the gradient through the online factor matters. When grad is
// non-null it receives d(value)/dtheta; the target path contributes nothing.
double cd_inf_stopgrad_l2(const ConsistencyModel& model, VecView theta,
                          const ConsistencyMap& target, const ScoreField& score,
                          const CtInfBatch& batch, const TimeReparam& reparam,
                          const TimeWeight& weight, Vec* grad);

double ct_inf_stopgrad(const ConsistencyModel& model, VecView theta,
                       const ConsistencyMap& target, const CtInfBatch& batch,
                       const TimeReparam& reparam, const TimeWeight& weight, Vec* grad);

}  // namespace cmlab
