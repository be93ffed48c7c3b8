#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cmlab/core/vec.hpp"
#include "cmlab/diffusion/score_field.hpp"
#include "cmlab/diffusion/time_grid.hpp"
#include "cmlab/nn/optimizer.hpp"

namespace cmlab {

class RandomStream;

using DataSampler = std::function<Vec(RandomStream&)>;

struct DsmConfig {
  SgdConfig opt = [] {
    SgdConfig c;
    c.adam = true;
    c.lr = 3e-3;
    c.cosine_decay = true;
    return c;
  }();
  int batch = 256;
  long steps = 15000;
  std::uint64_t seed = 1;
  // Polyak averaging of the weights; the returned field uses the averaged
  // parameters, which cuts the SGD noise floor on the learned score.
  double weight_ema = 0.999;
};

// One term of the denoising-score-matching objective,
//   t^2 || s + z/t ||^2,
// for a score value s at a perturbed point x + t z.
double dsm_objective_term(VecView score_value, double t, VecView z);

// Batch objective for a learned field, averaged; when grad is non-null it
// receives d(mean)/dparams. Uses the algebraically identical residual form
// (D(x + t z, t) - x)/t, which is what the backbone gradient flows through.
double dsm_loss_batch(const LearnedScore& score, VecView params, const Batch& x_clean,
                      const std::vector<double>& t_levels, const Batch& z, Vec* grad);

struct DsmResult {
  ScoreField field;
  std::vector<double> loss_log;  // one entry per step
};

// Stochastic gradient descent on the DSM objective with noise levels drawn
// uniformly over the grid boundaries. Throws training_error on a non-finite
// loss.
DsmResult dsm_train(const MlpConfig& cfg, double sigma_data, const DataSampler& data,
                    int data_dim, const TimeGrid& grid, const DsmConfig& train);

}  // namespace cmlab
