#pragma once

#include <memory>
#include <variant>

#include "cmlab/core/vec.hpp"
#include "cmlab/diffusion/mixture.hpp"
#include "cmlab/nn/mlp.hpp"

namespace cmlab {

// Learned score in denoiser form: D(x, t) = c_skip(t) x + c_out(t) F(x, t)
// with the variance-balanced coefficients
//   c_skip(t) = sd^2/(sd^2 + t^2),  c_out(t) = sd t / sqrt(sd^2 + t^2),
// and s(x, t) = (D(x, t) - x) / t^2. The balanced form keeps the backbone's
// regression target unit-scale at every noise level.
struct LearnedScore {
  MlpNet net;
  double sigma_data = 0.5;

  double c_skip(double t) const;
  double c_out(double t) const;
  Vec denoised(VecView params, VecView x, double t) const;
  Vec eval(VecView x, double t) const { return eval_with(net.params().values, x, t); }
  Vec eval_with(VecView params, VecView x, double t) const;
};

// Drift-defined field: the PF ODE slope -t s(x, t) equals -drift everywhere,
// i.e. s(x, t) = drift / t. drift = 0 gives the exactly-zero score field.
struct ConstantDrift {
  Vec drift;
};

// s(x, t) ~ grad log p_t(x): closed-form mixture score, a trained denoiser
// net, or a constant-drift stub.
class ScoreField {
 public:
  ScoreField() : body_(GaussianMixture::single({0.0}, 1.0)) {}

  static ScoreField analytic(GaussianMixture gm);
  static ScoreField learned(LearnedScore learned);
  static ScoreField constant_drift(Vec drift);

  Vec eval(VecView x, double t) const;

  bool is_analytic() const { return std::holds_alternative<GaussianMixture>(body_); }
  const GaussianMixture& mixture() const { return std::get<GaussianMixture>(body_); }
  const LearnedScore& learned_body() const { return std::get<LearnedScore>(body_); }
  LearnedScore& learned_body() { return std::get<LearnedScore>(body_); }

 private:
  std::variant<GaussianMixture, LearnedScore, ConstantDrift> body_;
};

}  // namespace cmlab
