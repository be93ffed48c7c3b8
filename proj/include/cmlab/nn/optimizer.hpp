#pragma once

#include <span>
#include <string>

#include "cmlab/core/vec.hpp"

namespace cmlab {

// First-order optimizer settings: SGD with momentum by default, Adam when
// `adam` is set (momentum doubles as beta1). Both are deterministic given the
// gradient stream; the choice is recorded in run configs.
struct SgdConfig {
  double lr = 3e-3;
  double momentum = 0.9;
  bool adam = false;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool cosine_decay = false;  // decay lr to lr_floor over total_steps
  double lr_floor_frac = 0.1;
  long total_steps = 0;

  std::string kind_name() const { return adam ? "adam" : "sgd"; }
  std::string decay_name() const { return cosine_decay ? "cosine" : "constant"; }
};

class SgdMomentum {
 public:
  explicit SgdMomentum(SgdConfig cfg) : cfg_(cfg) {}

  double lr_at(long step) const;
  const SgdConfig& config() const { return cfg_; }

  void step(std::span<double> params, VecView grad, long k);

 private:
  SgdConfig cfg_;
  Vec velocity_;
  Vec moment2_;
};

// Stateless form with external optimizer buffers; training loops use this so
// the buffers can live inside checkpointable state. moment2 stays empty for
// plain SGD.
void sgd_apply(std::span<double> params, VecView grad, Vec& velocity, Vec& moment2,
               const SgdConfig& cfg, long k);

}  // namespace cmlab
