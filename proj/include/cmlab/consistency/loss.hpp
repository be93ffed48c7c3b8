#pragma once

#include <functional>
#include <vector>

#include "cmlab/consistency/model.hpp"
#include "cmlab/core/vec.hpp"
#include "cmlab/diffusion/solvers.hpp"

namespace cmlab {

class RandomStream;

enum class Metric { squared_l2, l1 };

double metric_value(Metric m, VecView a, VecView b);
// d d(a, b) / da. For l1 this is the sign pattern (0 on exact ties).
Vec metric_grad_first(Metric m, VecView a, VecView b);

struct LossConfig {
  Metric metric = Metric::squared_l2;
  SolverKind solver = SolverKind::heun;
  std::function<double(double)> weight;  // lambda(t_n); empty means == 1

  double lambda(double t) const { return weight ? weight(t) : 1.0; }
};

// Adjacent trajectory pair of Algorithm 2: x_next = x + t_{n+1} z with fresh
// z, and x_hat = one solver step of the empirical PF ODE from t_{n+1} down to
// t_n.
struct CdPair {
  Vec x_next;  // x_{t_{n+1}}
  Vec x_hat;   // solver estimate at t_n
};

// n is the paper's 1-based trajectory index, 1 <= n <= N-1.
CdPair cd_pair(const ScoreField& score, VecView x, int n, const TimeGrid& grid,
               SolverKind solver, RandomStream& rng);

// lambda(t_n) d(f_theta(x_next, t_next), f_target(x_hat, t_cur)). The target
// arm is a constant in every gradient computed here (stopgrad).
double cd_loss(const ConsistencyModel& model, VecView theta, VecView theta_target,
               const CdPair& pair, double t_next, double t_cur, const LossConfig& cfg);

// lambda(t_n) d(f_theta(x + t_{n+1} z, t_{n+1}), f_target(x + t_n z, t_n)):
// one shared z in both arms.
double ct_loss(const ConsistencyModel& model, VecView theta, VecView theta_target, VecView x,
               int n, const TimeGrid& grid, VecView z, const LossConfig& cfg);

// Batched forms used by the training loops and the discrete/continuous
// comparisons. Per-sample indices n are supplied by the caller so runs can be
// coupled with common random numbers. Means over the batch; when grad is
// non-null it receives d(mean loss)/dtheta.
struct CdBatch {
  Batch x_next;
  Batch x_hat;
  std::vector<double> t_next;
  std::vector<double> t_cur;
};

double cd_loss_batch(const ConsistencyModel& model, VecView theta, VecView theta_target,
                     const CdBatch& batch, const LossConfig& cfg, Vec* grad);

struct CtBatch {
  Batch x;
  Batch z;
  std::vector<int> n;  // 1-based
};

double ct_loss_batch(const ConsistencyModel& model, VecView theta, VecView theta_target,
                     const CtBatch& batch, const TimeGrid& grid, const LossConfig& cfg,
                     Vec* grad);

}  // namespace cmlab
