#pragma once

#include <memory>

#include "cmlab/core/vec.hpp"
#include "cmlab/nn/mlp.hpp"
#include "cmlab/nn/param_vector.hpp"

namespace cmlab {

// Anything that maps (x_t, t) to an estimate of the trajectory origin x_eps
// and exposes its forward-mode directional derivative. Implemented by the
// trained model below and by the closed-form single-Gaussian map.
class ConsistencyMap {
 public:
  virtual ~ConsistencyMap() = default;
  virtual int dim() const = 0;
  virtual Vec apply(VecView x, double t) const = 0;
  virtual Vec jvp_xt(VecView x, double t, VecView vx, double vt) const = 0;
};

// f(x, t) = c_skip(t) x + c_out(t) F(x, t) with the boundary-exact
// coefficients
//   c_skip(t) = sd^2 / ((t - eps)^2 + sd^2)
//   c_out(t)  = sd (t - eps) / sqrt(sd^2 + t^2)
// so c_skip(eps) = 1 and c_out(eps) = 0 hold exactly and f(x, eps) = x
// bit-for-bit regardless of the backbone.
class ConsistencyModel : public ConsistencyMap {
 public:
  ConsistencyModel(MlpConfig backbone, double sigma_data, double epsilon, double t_max);

  int dim() const override { return net_.config().input_dim; }
  double sigma_data() const { return sigma_data_; }
  double epsilon() const { return epsilon_; }
  double t_max() const { return t_max_; }

  MlpNet& backbone() { return net_; }
  const MlpNet& backbone() const { return net_; }
  ParamVector& params() { return net_.params(); }
  const ParamVector& params() const { return net_.params(); }

  double c_skip(double t) const;
  double c_out(double t) const;
  double c_skip_dot(double t) const;
  double c_out_dot(double t) const;

  // Throws input_error for t outside [epsilon, t_max].
  Vec apply(VecView x, double t) const override { return apply_with(params().values, x, t); }
  Vec apply_with(VecView p, VecView x, double t) const;
  Vec apply_tape(VecView p, VecView x, double t, Tape& tape) const;

  // Accumulates d(df . f)/dparams; only the backbone term carries parameters.
  void backward(VecView p, const Tape& tape, double t, VecView df,
                std::span<double> grad) const;

  Vec jvp_xt(VecView x, double t, VecView vx, double vt) const override {
    return jvp_with(params().values, x, t, vx, vt);
  }
  Vec jvp_with(VecView p, VecView x, double t, VecView vx, double vt) const;

 private:
  void check_time(double t) const;

  MlpNet net_;
  double sigma_data_;
  double epsilon_;
  double t_max_;
};

// Read-only view of a ConsistencyModel evaluated against an external
// parameter array (an EMA target, a finite-difference probe).
class ModelWithParams : public ConsistencyMap {
 public:
  ModelWithParams(const ConsistencyModel& model, VecView params)
      : model_(model), params_(params) {}
  int dim() const override { return model_.dim(); }
  Vec apply(VecView x, double t) const override { return model_.apply_with(params_, x, t); }
  Vec jvp_xt(VecView x, double t, VecView vx, double vt) const override {
    return model_.jvp_with(params_, x, t, vx, vt);
  }

 private:
  const ConsistencyModel& model_;
  VecView params_;
};

// Online / EMA-target parameter pair. The target never enters any gradient
// computation; ema_update is the only thing that writes it.
struct EmaPair {
  ParamVector online;
  ParamVector target;
};

// target <- mu target + (1 - mu) online, elementwise; online untouched.
// Requires 0 <= mu < 1.
void ema_update(EmaPair& pair, double mu);

}  // namespace cmlab
