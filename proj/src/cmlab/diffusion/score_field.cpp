#include "cmlab/diffusion/score_field.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"

namespace cmlab {

double LearnedScore::c_skip(double t) const {
  const double sd2 = sigma_data * sigma_data;
  return sd2 / (sd2 + t * t);
}

double LearnedScore::c_out(double t) const {
  const double sd2 = sigma_data * sigma_data;
  return sigma_data * t / std::sqrt(sd2 + t * t);
}

Vec LearnedScore::denoised(VecView params, VecView x, double t) const {
  const double cs = c_skip(t);
  const double co = c_out(t);
  Vec y = net.forward_with(params, x, t);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = cs * x[i] + co * y[i];
  return y;
}

Vec LearnedScore::eval_with(VecView params, VecView x, double t) const {
  Vec d = denoised(params, x, t);
  const double inv_t2 = 1.0 / (t * t);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (d[i] - x[i]) * inv_t2;
  return d;
}

ScoreField ScoreField::analytic(GaussianMixture gm) {
  gm.validate();
  ScoreField f;
  f.body_ = std::move(gm);
  return f;
}

ScoreField ScoreField::learned(LearnedScore learned) {
  ScoreField f;
  f.body_ = std::move(learned);
  return f;
}

ScoreField ScoreField::constant_drift(Vec drift) {
  ScoreField f;
  f.body_ = ConstantDrift{std::move(drift)};
  return f;
}

Vec ScoreField::eval(VecView x, double t) const {
  if (const auto* gm = std::get_if<GaussianMixture>(&body_)) return gm->score(x, t);
  if (const auto* ls = std::get_if<LearnedScore>(&body_)) return ls->eval(x, t);
  const ConstantDrift& cd = std::get<ConstantDrift>(body_);
  if (cd.drift.size() != x.size()) throw input_error("ScoreField: drift dimension mismatch");
  Vec s(cd.drift);
  for (double& v : s) v /= t;
  return s;
}

}  // namespace cmlab
