#pragma once

#include <vector>

#include "cmlab/core/vec.hpp"

namespace cmlab {

class RandomStream;

// Isotropic Gaussian mixture p_data = sum_k w_k N(mu_k, var_k I). The t-level
// perturbed density p_t = p_data * N(0, t^2 I) is again a mixture with
// component variances var_k + t^2, so score, posterior and log-density are
// closed-form at every noise level.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<Vec> means;
  std::vector<double> variances;

  int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }
  int components() const { return static_cast<int>(weights.size()); }
  void validate() const;

  // log p_t(x); log-sum-exp stabilized (t spans 0.002..80, raw densities
  // underflow).
  double log_density(VecView x, double t) const;

  // grad_x log p_t(x).
  Vec score(VecView x, double t) const;

  // E[x0 | x_t = x] under the t-level posterior. Satisfies
  // score(x, t) = (posterior_mean(x, t) - x) / t^2.
  Vec posterior_mean(VecView x, double t) const;

  Vec sample(RandomStream& rng) const;

  // Per-coordinate-averaged standard deviation of p_data:
  // sqrt(trace(Cov)/dim).
  double data_std() const;
  Vec mean() const;

  static GaussianMixture single(Vec mean, double variance);
  static GaussianMixture symmetric_pair(double offset, double variance, int dim);
};

// Sample of the perturbation kernel: x + t z with z ~ N(0, I) supplied by the
// caller.
Vec perturb(VecView x, double t, VecView z);

}  // namespace cmlab
