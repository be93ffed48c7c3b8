#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cmlab/consistency/schedule.hpp"
#include "cmlab/consistency/train.hpp"
#include "cmlab/diffusion/time_grid.hpp"
#include "cmlab/eval/dataset.hpp"
#include "cmlab/nn/mlp.hpp"
#include "cmlab/nn/optimizer.hpp"

namespace cmlab {

// Full experiment description. Serializes losslessly to JSON; the desk-scale
// defaults below are the CIFAR-10 training profile scaled down (batch 256,
// K = 50k, N = 18, s0 = 2, s1 = 150, mu0 = 0.9), with the source-paper
// values recorded in the README.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "runs/out";

  Dataset dataset = Dataset::gaussian(GaussianMixture::symmetric_pair(0.8, 0.36, 2));

  // Backbone shape; input_dim always follows the dataset and the input
  // preconditioning reference follows sigma_data.
  MlpConfig model = [] {
    MlpConfig m;
    m.precondition_input = true;
    return m;
  }();
  double sigma_data = 0.5;

  double grid_epsilon = 0.002;
  double grid_horizon = 80.0;
  double grid_rho = 7.0;
  int grid_steps = 18;

  Metric metric = Metric::squared_l2;
  SolverKind solver = SolverKind::heun;

  TrainSchedule schedule{50000, 2, 150, 0.9, std::nullopt, std::nullopt};

  SgdConfig optimizer;
  int batch = 256;
  long steps = 50000;
  double mu = 0.95;  // CD EMA decay
  long checkpoint_every = 1000;
  bool init_from_teacher = false;

  // Teacher for distillation: the analytic mixture score, or a train-score
  // checkpoint.
  std::string teacher_kind = "analytic";
  std::string teacher_path;

  TimeGrid grid() const { return karras_grid(grid_epsilon, grid_horizon, grid_rho, grid_steps); }
  MlpConfig backbone_config() const;
  LossConfig loss_config() const;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::string& path);  // input_error on unreadable
};

}  // namespace cmlab
