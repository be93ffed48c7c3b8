#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cmlab/consistency/loss.hpp"
#include "cmlab/consistency/model.hpp"
#include "cmlab/consistency/schedule.hpp"
#include "cmlab/core/rng.hpp"
#include "cmlab/diffusion/dsm.hpp"
#include "cmlab/nn/optimizer.hpp"

namespace cmlab {

// Everything a training loop mutates. Checkpoints capture this struct whole,
// so an interrupted run resumes bit-identically (the momentum buffer is part
// of it for exactly that reason).
struct TrainState {
  EmaPair ema;
  Vec velocity;
  Vec moment2;  // Adam second moment; empty under plain SGD
  RandomStream rng;
  long step = 0;
};

struct TrainLogRow {
  long k = 0;
  int n_k = 0;
  double mu_k = 0.0;
  double loss = 0.0;
};

// Invoked every `period` steps with the current online parameters; returning
// true stops the run early.
using TrainCallback = std::function<bool(long k, VecView online)>;

struct CdTrainConfig {
  LossConfig loss;
  SgdConfig opt;
  int batch = 256;
  double mu = 0.95;
  std::uint64_t seed = 1;
};

struct CtTrainConfig {
  LossConfig loss;  // solver member unused: no ODE solver anywhere in CT
  SgdConfig opt;
  int batch = 256;
  TrainSchedule schedule;
  std::uint64_t seed = 1;
};

TrainState make_train_state(const ConsistencyModel& model, std::uint64_t seed);

// Algorithm 2: sample x and n, perturb, one solver step against the score
// field, loss, SGD step on theta, EMA update of theta^-. Constant grid,
// constant mu. Runs until state.step == until_step.
void train_cd_run(ConsistencyModel& model, const ScoreField& score, const DataSampler& data,
                  const TimeGrid& grid, const CdTrainConfig& cfg, long until_step,
                  TrainState& state, std::vector<TrainLogRow>* log,
                  const TrainCallback& callback = {}, long callback_period = 0);

// Algorithm 3: per-step N(k) and mu(k), n ~ U{1..N(k)-1} per sample, one
// shared z per sample, no score model anywhere.
void train_ct_run(ConsistencyModel& model, const DataSampler& data, const CtTrainConfig& cfg,
                  long until_step, TrainState& state, std::vector<TrainLogRow>* log,
                  const TrainCallback& callback = {}, long callback_period = 0);

struct TrainResult {
  EmaPair ema;
  std::vector<TrainLogRow> log;
  long stopped_at = 0;
};

// Fresh-run wrappers; the model's own parameters end up holding the trained
// online weights.
TrainResult train_cd(ConsistencyModel& model, const ScoreField& score, const DataSampler& data,
                     const TimeGrid& grid, const CdTrainConfig& cfg, long steps);
TrainResult train_ct(ConsistencyModel& model, const DataSampler& data, const CtTrainConfig& cfg,
                     long steps, const TrainCallback& callback = {}, long callback_period = 0);

}  // namespace cmlab
