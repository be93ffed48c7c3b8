#include "cmlab/consistency/loss.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/parallel.hpp"
#include "cmlab/core/reduce.hpp"
#include "cmlab/core/rng.hpp"

namespace cmlab {

double metric_value(Metric m, VecView a, VecView b) {
  double s = 0.0;
  switch (m) {
    case Metric::squared_l2:
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = a[i] - b[i];
        s += r * r;
      }
      return s;
    case Metric::l1:
      for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
      return s;
  }
  return s;
}

Vec metric_grad_first(Metric m, VecView a, VecView b) {
  Vec g(a.size());
  switch (m) {
    case Metric::squared_l2:
      for (std::size_t i = 0; i < a.size(); ++i) g[i] = 2.0 * (a[i] - b[i]);
      break;
    case Metric::l1:
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = a[i] - b[i];
        g[i] = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
      }
      break;
  }
  return g;
}

CdPair cd_pair(const ScoreField& score, VecView x, int n, const TimeGrid& grid,
               SolverKind solver, RandomStream& rng) {
  if (n < 1 || n > grid.steps - 1) throw input_error("cd_pair: n out of range");
  const double t_cur = grid.boundaries[n - 1];
  const double t_next = grid.boundaries[n];
  Vec z(x.size());
  rng.fill_normal(z.data(), z.size());
  CdPair pair;
  pair.x_next = perturb(x, t_next, z);
  pair.x_hat = solver_step(solver, score, pair.x_next, t_next, t_cur);
  return pair;
}

double cd_loss(const ConsistencyModel& model, VecView theta, VecView theta_target,
               const CdPair& pair, double t_next, double t_cur, const LossConfig& cfg) {
  const Vec online = model.apply_with(theta, pair.x_next, t_next);
  const Vec target = model.apply_with(theta_target, pair.x_hat, t_cur);
  return cfg.lambda(t_cur) * metric_value(cfg.metric, online, target);
}

double ct_loss(const ConsistencyModel& model, VecView theta, VecView theta_target, VecView x,
               int n, const TimeGrid& grid, VecView z, const LossConfig& cfg) {
  if (n < 1 || n > grid.steps - 1) throw input_error("ct_loss: n out of range");
  const double t_cur = grid.boundaries[n - 1];
  const double t_next = grid.boundaries[n];
  const Vec online = model.apply_with(theta, perturb(x, t_next, z), t_next);
  const Vec target = model.apply_with(theta_target, perturb(x, t_cur, z), t_cur);
  return cfg.lambda(t_cur) * metric_value(cfg.metric, online, target);
}

double cd_loss_batch(const ConsistencyModel& model, VecView theta, VecView theta_target,
                     const CdBatch& batch, const LossConfig& cfg, Vec* grad) {
  const std::size_t n = batch.x_next.size();
  GradReducer acc(grad ? theta.size() : 0);

  parallel_chunks(n, acc.chunks(), [&](std::size_t b, std::size_t e, int chunk) {
    Tape tape;
    for (std::size_t i = b; i < e; ++i) {
      const double t_next = batch.t_next[i];
      const double t_cur = batch.t_cur[i];
      const double lam = cfg.lambda(t_cur);
      const Vec target = model.apply_with(theta_target, batch.x_hat[i], t_cur);
      if (grad) {
        const Vec online = model.apply_tape(theta, batch.x_next[i], t_next, tape);
        acc.scalar_chunk(chunk) += lam * metric_value(cfg.metric, online, target);
        Vec df = metric_grad_first(cfg.metric, online, target);
        for (double& v : df) v *= lam;
        model.backward(theta, tape, t_next, df, acc.grad_chunk(chunk));
      } else {
        const Vec online = model.apply_with(theta, batch.x_next[i], t_next);
        acc.scalar_chunk(chunk) += lam * metric_value(cfg.metric, online, target);
      }
    }
  });

  const double inv = 1.0 / static_cast<double>(n);
  if (grad) {
    grad->assign(theta.size(), 0.0);
    return acc.reduce(*grad, inv) * inv;
  }
  return acc.reduce_scalar() * inv;
}

double ct_loss_batch(const ConsistencyModel& model, VecView theta, VecView theta_target,
                     const CtBatch& batch, const TimeGrid& grid, const LossConfig& cfg,
                     Vec* grad) {
  const std::size_t n = batch.x.size();
  GradReducer acc(grad ? theta.size() : 0);

  parallel_chunks(n, acc.chunks(), [&](std::size_t b, std::size_t e, int chunk) {
    Tape tape;
    for (std::size_t i = b; i < e; ++i) {
      const int idx = batch.n[i];
      const double t_cur = grid.boundaries[idx - 1];
      const double t_next = grid.boundaries[idx];
      const double lam = cfg.lambda(t_cur);
      const Vec arm_next = perturb(batch.x[i], t_next, batch.z[i]);
      const Vec arm_cur = perturb(batch.x[i], t_cur, batch.z[i]);
      const Vec target = model.apply_with(theta_target, arm_cur, t_cur);
      if (grad) {
        const Vec online = model.apply_tape(theta, arm_next, t_next, tape);
        acc.scalar_chunk(chunk) += lam * metric_value(cfg.metric, online, target);
        Vec df = metric_grad_first(cfg.metric, online, target);
        for (double& v : df) v *= lam;
        model.backward(theta, tape, t_next, df, acc.grad_chunk(chunk));
      } else {
        const Vec online = model.apply_with(theta, arm_next, t_next);
        acc.scalar_chunk(chunk) += lam * metric_value(cfg.metric, online, target);
      }
    }
  });

  const double inv = 1.0 / static_cast<double>(n);
  if (grad) {
    grad->assign(theta.size(), 0.0);
    return acc.reduce(*grad, inv) * inv;
  }
  return acc.reduce_scalar() * inv;
}

}  // namespace cmlab
