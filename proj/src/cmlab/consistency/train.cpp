#include "cmlab/consistency/train.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"
#include "cmlab/diffusion/time_grid.hpp"

namespace cmlab {

TrainState make_train_state(const ConsistencyModel& model, std::uint64_t seed) {
  TrainState state;
  state.ema.online = model.params();
  state.ema.target = model.params();  // theta^- <- theta at step 0
  state.velocity.assign(model.params().size(), 0.0);
  state.rng = RandomStream(seed);
  return state;
}

void train_cd_run(ConsistencyModel& model, const ScoreField& score, const DataSampler& data,
                  const TimeGrid& grid, const CdTrainConfig& cfg, long until_step,
                  TrainState& state, std::vector<TrainLogRow>* log,
                  const TrainCallback& callback, long callback_period) {
  CdBatch batch;
  batch.x_next.resize(cfg.batch);
  batch.x_hat.resize(cfg.batch);
  batch.t_next.resize(cfg.batch);
  batch.t_cur.resize(cfg.batch);
  Vec grad;

  for (; state.step < until_step; ++state.step) {
    const long k = state.step;
    for (int i = 0; i < cfg.batch; ++i) {
      const Vec x = data(state.rng);
      const int n = static_cast<int>(state.rng.uniform_int(1, grid.steps - 1));
      CdPair pair = cd_pair(score, x, n, grid, cfg.loss.solver, state.rng);
      batch.x_next[i] = std::move(pair.x_next);
      batch.x_hat[i] = std::move(pair.x_hat);
      batch.t_next[i] = grid.boundaries[n];
      batch.t_cur[i] = grid.boundaries[n - 1];
    }
    const double loss =
        cd_loss_batch(model, state.ema.online.values, state.ema.target.values, batch, cfg.loss,
                      &grad);
    if (!std::isfinite(loss)) throw training_error("train_cd: loss diverged", k);
    sgd_apply({state.ema.online.values.data(), state.ema.online.values.size()}, grad,
              state.velocity, state.moment2, cfg.opt, k);
    ema_update(state.ema, cfg.mu);
    if (log) log->push_back({k, grid.steps, cfg.mu, loss});
    if (callback && callback_period > 0 && (k + 1) % callback_period == 0) {
      if (callback(k + 1, state.ema.online.values)) {
        ++state.step;
        break;
      }
    }
  }
}

void train_ct_run(ConsistencyModel& model, const DataSampler& data, const CtTrainConfig& cfg,
                  long until_step, TrainState& state, std::vector<TrainLogRow>* log,
                  const TrainCallback& callback, long callback_period) {
  cfg.schedule.validate();
  CtBatch batch;
  batch.x.resize(cfg.batch);
  batch.z.resize(cfg.batch);
  batch.n.resize(cfg.batch);
  Vec grad;

  // Grids are cached per N(k); N is nondecreasing so only a handful exist.
  std::vector<TimeGrid> grid_cache;
  const double eps = model.epsilon();
  const double horizon = model.t_max();
  auto grid_for = [&](int n_steps) -> const TimeGrid& {
    for (const TimeGrid& g : grid_cache) {
      if (g.steps == n_steps) return g;
    }
    grid_cache.push_back(karras_grid(eps, horizon, 7.0, n_steps));
    return grid_cache.back();
  };

  const int dim = model.dim();
  for (; state.step < until_step; ++state.step) {
    const long k = state.step;
    const int n_k = n_schedule(k, cfg.schedule);
    const double mu_k = mu_schedule(k, cfg.schedule);
    const TimeGrid& grid = grid_for(n_k);

    for (int i = 0; i < cfg.batch; ++i) {
      batch.x[i] = data(state.rng);
      batch.n[i] = static_cast<int>(state.rng.uniform_int(1, n_k - 1));
      batch.z[i].resize(dim);
      state.rng.fill_normal(batch.z[i].data(), dim);
    }
    const double loss = ct_loss_batch(model, state.ema.online.values, state.ema.target.values,
                                      batch, grid, cfg.loss, &grad);
    if (!std::isfinite(loss)) throw training_error("train_ct: loss diverged", k);
    sgd_apply({state.ema.online.values.data(), state.ema.online.values.size()}, grad,
              state.velocity, state.moment2, cfg.opt, k);
    ema_update(state.ema, mu_k);
    if (log) log->push_back({k, n_k, mu_k, loss});
    if (callback && callback_period > 0 && (k + 1) % callback_period == 0) {
      if (callback(k + 1, state.ema.online.values)) {
        ++state.step;
        break;
      }
    }
  }
}

TrainResult train_cd(ConsistencyModel& model, const ScoreField& score, const DataSampler& data,
                     const TimeGrid& grid, const CdTrainConfig& cfg, long steps) {
  TrainState state = make_train_state(model, cfg.seed);
  TrainResult result;
  train_cd_run(model, score, data, grid, cfg, steps, state, &result.log);
  model.params() = state.ema.online;
  result.ema = std::move(state.ema);
  result.stopped_at = state.step;
  return result;
}

TrainResult train_ct(ConsistencyModel& model, const DataSampler& data, const CtTrainConfig& cfg,
                     long steps, const TrainCallback& callback, long callback_period) {
  TrainState state = make_train_state(model, cfg.seed);
  TrainResult result;
  train_ct_run(model, data, cfg, steps, state, &result.log, callback, callback_period);
  model.params() = state.ema.online;
  result.ema = std::move(state.ema);
  result.stopped_at = state.step;
  return result;
}

}  // namespace cmlab
