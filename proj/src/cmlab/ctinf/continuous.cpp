#include "cmlab/ctinf/continuous.hpp"

#include <algorithm>
#include <cmath>

#include "cmlab/core/parallel.hpp"
#include "cmlab/core/reduce.hpp"

namespace cmlab {

namespace {

double weight_at(const TimeWeight& weight, const TimeReparam& reparam, double t) {
  return weight ? weight(t) : reparam.tau_inv_deriv();
}

// Tangent (-t s(x_t, t), 1) for the distillation-side objectives.
Vec cd_tangent(const ScoreField& score, VecView x_t, double t) {
  Vec v = score.eval(x_t, t);
  for (double& s : v) s *= -t;
  return v;
}

}  // namespace

TimeGrid reparam_grid(const TimeReparam& reparam, int steps) {
  TimeGrid g;
  g.epsilon = reparam.epsilon;
  g.horizon = reparam.horizon;
  g.rho = 1.0;
  g.steps = steps;
  g.boundaries.resize(steps);
  for (int j = 0; j < steps; ++j)
    g.boundaries[j] = reparam.tau(static_cast<double>(j) / (steps - 1));
  g.boundaries.front() = reparam.epsilon;
  g.boundaries.back() = reparam.horizon;
  return g;
}

int coupled_index(double u, int steps) {
  const int n = 1 + static_cast<int>(u * (steps - 1));
  return std::clamp(n, 1, steps - 1);
}

double cd_inf_l2(const ConsistencyMap& f, const ScoreField& score, const CtInfBatch& batch,
                 const TimeReparam& reparam, const TimeWeight& weight) {
  const std::size_t count = batch.x.size();
  const double inv_deriv = reparam.tau_inv_deriv();
  GradReducer acc(0);
  parallel_chunks(count, acc.chunks(), [&](std::size_t b, std::size_t e, int chunk) {
    for (std::size_t i = b; i < e; ++i) {
      const double t = reparam.tau(batch.u[i]);
      const Vec x_t = perturb(batch.x[i], t, batch.z[i]);
      const Vec v = cd_tangent(score, x_t, t);
      const Vec w = f.jvp_xt(x_t, t, v, 1.0);
      acc.scalar_chunk(chunk) += weight_at(weight, reparam, t) / (inv_deriv * inv_deriv) * dot(w, w);
    }
  });
  return acc.reduce_scalar() / static_cast<double>(count);
}

double cd_inf_l2_via_curvature(const ConsistencyMap& f, const ScoreField& score,
                               const CtInfBatch& batch, const TimeReparam& reparam,
                               const TimeWeight& weight) {
  const std::size_t count = batch.x.size();
  const double inv_deriv = reparam.tau_inv_deriv();
  const int dim = f.dim();
  // [G]_ij for d(x,y) = ||x - y||_2^2 is 2 delta_ij.
  std::vector<double> curvature(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) curvature[i * dim + i] = 2.0;

  GradReducer acc(0);
  parallel_chunks(count, acc.chunks(), [&](std::size_t b, std::size_t e, int chunk) {
    for (std::size_t i = b; i < e; ++i) {
      const double t = reparam.tau(batch.u[i]);
      const Vec x_t = perturb(batch.x[i], t, batch.z[i]);
      const Vec v = cd_tangent(score, x_t, t);
      const Vec w = f.jvp_xt(x_t, t, v, 1.0);
      double quad = 0.0;
      for (int r = 0; r < dim; ++r) {
        double row = 0.0;
        for (int c = 0; c < dim; ++c) row += curvature[r * dim + c] * w[c];
        quad += w[r] * row;
      }
      acc.scalar_chunk(chunk) +=
          0.5 * weight_at(weight, reparam, t) / (inv_deriv * inv_deriv) * quad;
    }
  });
  return acc.reduce_scalar() / static_cast<double>(count);
}

double cd_inf_l1(const ConsistencyMap& f, const ScoreField& score, const CtInfBatch& batch,
                 const TimeReparam& reparam, const TimeWeight& weight) {
  const std::size_t count = batch.x.size();
  const double inv_deriv = reparam.tau_inv_deriv();
  GradReducer acc(0);
  parallel_chunks(count, acc.chunks(), [&](std::size_t b, std::size_t e, int chunk) {
    for (std::size_t i = b; i < e; ++i) {
      const double t = reparam.tau(batch.u[i]);
      const Vec x_t = perturb(batch.x[i], t, batch.z[i]);
      const Vec v = cd_tangent(score, x_t, t);
      const Vec w = f.jvp_xt(x_t, t, v, 1.0);
      acc.scalar_chunk(chunk) += weight_at(weight, reparam, t) / inv_deriv * norm1(w);
    }
  });
  return acc.reduce_scalar() / static_cast<double>(count);
}

namespace {

// Shared body of the two pseudo-objectives: per sample,
//   2 lambda/(tau^-1)' f_theta(x_t, t)^T w_target
// with gradients flowing through the f_theta factor only.
template <class TangentFn>
double pseudo_objective(const ConsistencyModel& model, VecView theta, const CtInfBatch& batch,
                        const TimeReparam& reparam, const TimeWeight& weight, Vec* grad,
                        TangentFn&& tangent_of) {
  const std::size_t count = batch.x.size();
  const double inv_deriv = reparam.tau_inv_deriv();
  GradReducer acc(grad ? theta.size() : 0);

  parallel_chunks(count, acc.chunks(), [&](std::size_t b, std::size_t e, int chunk) {
    Tape tape;
    for (std::size_t i = b; i < e; ++i) {
      const double t = reparam.tau(batch.u[i]);
      const Vec x_t = perturb(batch.x[i], t, batch.z[i]);
      const Vec w = tangent_of(i, x_t, t);
      const double scale = 2.0 * weight_at(weight, reparam, t) / inv_deriv;
      if (grad) {
        const Vec online = model.apply_tape(theta, x_t, t, tape);
        acc.scalar_chunk(chunk) += scale * dot(online, w);
        const Vec df = scaled(w, scale);
        model.backward(theta, tape, t, df, acc.grad_chunk(chunk));
      } else {
        const Vec online = model.apply_with(theta, x_t, t);
        acc.scalar_chunk(chunk) += scale * dot(online, w);
      }
    }
  });

  const double inv = 1.0 / static_cast<double>(count);
  if (grad) {
    grad->assign(theta.size(), 0.0);
    return acc.reduce(*grad, inv) * inv;
  }
  return acc.reduce_scalar() * inv;
}

}  // namespace

double cd_inf_stopgrad_l2(const ConsistencyModel& model, VecView theta,
                          const ConsistencyMap& target, const ScoreField& score,
                          const CtInfBatch& batch, const TimeReparam& reparam,
                          const TimeWeight& weight, Vec* grad) {
  return pseudo_objective(model, theta, batch, reparam, weight, grad,
                          [&](std::size_t, VecView x_t, double t) {
                            const Vec v = cd_tangent(score, x_t, t);
                            return target.jvp_xt(x_t, t, v, 1.0);
                          });
}

double ct_inf_stopgrad(const ConsistencyModel& model, VecView theta,
                       const ConsistencyMap& target, const CtInfBatch& batch,
                       const TimeReparam& reparam, const TimeWeight& weight, Vec* grad) {
  return pseudo_objective(model, theta, batch, reparam, weight, grad,
                          [&](std::size_t i, VecView x_t, double t) {
                            // (x_t - x)/t = z; t >= eps so never divides by 0.
                            Vec v(x_t.size());
                            for (std::size_t j = 0; j < v.size(); ++j)
                              v[j] = (x_t[j] - batch.x[i][j]) / t;
                            return target.jvp_xt(x_t, t, v, 1.0);
                          });
}

}  // namespace cmlab
