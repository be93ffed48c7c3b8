#pragma once

#include "cmlab/consistency/model.hpp"
#include "cmlab/core/vec.hpp"

namespace cmlab {

// Exact consistency function of the PF ODE for p_data = N(mean, var I):
//   f(x, t) = mean + sqrt((var + eps^2)/(var + t^2)) (x - mean).
// Serves as the analytic reference the trained models are compared against,
// and as a drop-in model for sampler/editing tests with closed-form
// push-forwards.
class GaussianConsistencyOracle : public ConsistencyMap {
 public:
  GaussianConsistencyOracle(Vec mean, double variance, double epsilon)
      : mean_(std::move(mean)), variance_(variance), epsilon_(epsilon) {}

  int dim() const override { return static_cast<int>(mean_.size()); }
  double contraction(double t) const;  // sqrt((var + eps^2)/(var + t^2))

  Vec apply(VecView x, double t) const override;
  Vec jvp_xt(VecView x, double t, VecView vx, double vt) const override;

 private:
  Vec mean_;
  double variance_;
  double epsilon_;
};

}  // namespace cmlab
