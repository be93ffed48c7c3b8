#include "cmlab/diffusion/dsm.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/parallel.hpp"
#include "cmlab/core/reduce.hpp"
#include "cmlab/core/rng.hpp"
#include "cmlab/diffusion/mixture.hpp"

namespace cmlab {

double dsm_objective_term(VecView score_value, double t, VecView z) {
  double acc = 0.0;
  for (std::size_t i = 0; i < score_value.size(); ++i) {
    const double r = t * score_value[i] + z[i];
    acc += r * r;
  }
  return acc;
}

double dsm_loss_batch(const LearnedScore& score, VecView params, const Batch& x_clean,
                      const std::vector<double>& t_levels, const Batch& z, Vec* grad) {
  const std::size_t batch = x_clean.size();
  GradReducer acc(grad ? params.size() : 0);

  parallel_chunks(batch, acc.chunks(), [&](std::size_t b, std::size_t e, int chunk) {
    Tape tape;
    for (std::size_t i = b; i < e; ++i) {
      const double t = t_levels[i];
      const double cs = score.c_skip(t);
      const double co = score.c_out(t);
      const Vec x_t = perturb(x_clean[i], t, z[i]);
      // residual (D(x_t) - x)/t == t s + z
      Vec y = grad ? score.net.forward_tape(params, x_t, t, tape)
                   : score.net.forward_with(params, x_t, t);
      Vec resid(y.size());
      for (std::size_t d = 0; d < y.size(); ++d)
        resid[d] = (cs * x_t[d] + co * y[d] - x_clean[i][d]) / t;
      acc.scalar_chunk(chunk) += dot(resid, resid);
      if (grad) {
        Vec df(resid.size());
        for (std::size_t d = 0; d < resid.size(); ++d) df[d] = 2.0 * resid[d] * co / t;
        score.net.backward(params, tape, df, acc.grad_chunk(chunk));
      }
    }
  });

  const double inv_batch = 1.0 / static_cast<double>(batch);
  if (grad) {
    grad->assign(params.size(), 0.0);
    return acc.reduce(*grad, inv_batch) * inv_batch;
  }
  return acc.reduce_scalar() * inv_batch;
}

DsmResult dsm_train(const MlpConfig& cfg, double sigma_data, const DataSampler& data,
                    int data_dim, const TimeGrid& grid, const DsmConfig& train) {
  MlpConfig net_cfg = cfg;
  net_cfg.input_dim = data_dim;
  LearnedScore score{MlpNet(net_cfg), sigma_data};
  score.net.init(train.seed);

  SgdConfig opt_cfg = train.opt;
  if (opt_cfg.total_steps == 0) opt_cfg.total_steps = train.steps;
  RandomStream rng(train.seed);
  DsmResult result{ScoreField{}, {}};
  result.loss_log.reserve(train.steps);

  Batch x_clean(train.batch), z(train.batch);
  std::vector<double> t_levels(train.batch);
  Vec grad;
  Vec velocity, moment2;
  Vec averaged = score.net.params().values;

  for (long k = 0; k < train.steps; ++k) {
    for (int i = 0; i < train.batch; ++i) {
      x_clean[i] = data(rng);
      const long n = rng.uniform_int(0, grid.steps - 1);
      t_levels[i] = grid.boundaries[n];
      z[i].resize(data_dim);
      rng.fill_normal(z[i].data(), data_dim);
    }
    const double loss =
        dsm_loss_batch(score, score.net.params().values, x_clean, t_levels, z, &grad);
    if (!std::isfinite(loss)) throw training_error("dsm_train: loss diverged", k);
    sgd_apply({score.net.params().values.data(), score.net.params().values.size()}, grad,
              velocity, moment2, opt_cfg, k);
    for (std::size_t i = 0; i < averaged.size(); ++i)
      averaged[i] =
          train.weight_ema * averaged[i] + (1.0 - train.weight_ema) * score.net.params().values[i];
    result.loss_log.push_back(loss);
  }

  score.net.params().values = averaged;
  result.field = ScoreField::learned(std::move(score));
  return result;
}

}  // namespace cmlab
