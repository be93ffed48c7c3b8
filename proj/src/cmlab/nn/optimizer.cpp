#include "cmlab/nn/optimizer.hpp"

#include <cmath>

namespace cmlab {

double SgdMomentum::lr_at(long step) const {
  if (!cfg_.cosine_decay || cfg_.total_steps <= 0) return cfg_.lr;
  const double frac = std::min(1.0, static_cast<double>(step) / cfg_.total_steps);
  const double floor = cfg_.lr * cfg_.lr_floor_frac;
  return floor + 0.5 * (cfg_.lr - floor) * (1.0 + std::cos(M_PI * frac));
}

void SgdMomentum::step(std::span<double> params, VecView grad, long k) {
  sgd_apply(params, grad, velocity_, moment2_, cfg_, k);
}

void sgd_apply(std::span<double> params, VecView grad, Vec& velocity, Vec& moment2,
               const SgdConfig& cfg, long k) {
  if (velocity.size() != params.size()) velocity.assign(params.size(), 0.0);
  const double lr = SgdMomentum(cfg).lr_at(k);
  if (!cfg.adam) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      velocity[i] = cfg.momentum * velocity[i] - lr * grad[i];
      params[i] += velocity[i];
    }
    return;
  }
  if (moment2.size() != params.size()) moment2.assign(params.size(), 0.0);
  const double b1 = cfg.momentum;
  const double b2 = cfg.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(k) + 1.0);
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(k) + 1.0);
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity[i] = b1 * velocity[i] + (1.0 - b1) * grad[i];
    moment2[i] = b2 * moment2[i] + (1.0 - b2) * grad[i] * grad[i];
    const double mhat = velocity[i] / corr1;
    const double vhat = moment2[i] / corr2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
  }
}

}  // namespace cmlab
