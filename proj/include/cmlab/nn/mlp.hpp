#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "cmlab/core/vec.hpp"
#include "cmlab/nn/param_vector.hpp"

namespace cmlab {

class RandomStream;

enum class Activation { silu, tanh_act };

// Small dense network over the joint input [x ; fourier(log t)]. The
// activation must be smooth: the continuous-time objectives differentiate
// through it twice. With precondition_input set, x enters the first layer
// scaled by 1/sqrt(sigma_ref^2 + t^2), keeping activations O(1) across the
// whole noise range; the scaling is part of the differentiated function, so
// forward/backward/jvp stay exact.
struct MlpConfig {
  int input_dim = 2;
  std::vector<int> hidden = {64, 64};
  int time_embed_dim = 16;  // even; sin/cos pairs over log t
  Activation activation = Activation::silu;
  double freq_min = 0.25;
  double freq_max = 16.0;
  bool precondition_input = false;
  double sigma_ref = 0.5;

  int embed_pairs() const { return time_embed_dim / 2; }
  int joint_dim() const { return input_dim + time_embed_dim; }
  void validate() const;
  bool operator==(const MlpConfig&) const = default;
};

// Primal values recorded by one forward pass, enough to replay the backward
// pass for that sample.
struct Tape {
  Vec joint;                 // layer-0 input [x ; emb(t)]
  std::vector<Vec> preact;   // z_i per hidden layer
  std::vector<Vec> act;      // activation(z_i) per hidden layer
};

// F(x, t): R^D x [eps, T] -> R^D. Parameters live in a flat ParamVector;
// every evaluation path can also run against an external parameter array of
// the same layout (EMA targets, finite-difference probes).
class MlpNet {
 public:
  explicit MlpNet(MlpConfig cfg);

  const MlpConfig& config() const { return cfg_; }
  ParamVector& params() { return params_; }
  const ParamVector& params() const { return params_; }

  // Fan-in scaled Gaussian weights, zero biases, zero final layer.
  void init(std::uint64_t seed);
  // Same, but the final layer is also Gaussian. Used where a nontrivial
  // output map is wanted immediately.
  void init_dense(std::uint64_t seed);

  Vec forward(VecView x, double t) const { return forward_with(params_.values, x, t); }
  Vec forward_with(VecView p, VecView x, double t) const;
  Vec forward_tape(VecView p, VecView x, double t, Tape& tape) const;

  // Accumulates d(dy . F)/dparams into grad (flat, same layout as params).
  void backward(VecView p, const Tape& tape, VecView dy, std::span<double> grad) const;

  // Forward-mode directional derivative dF . (vx, vt), no finite differencing.
  Vec jvp_xt(VecView p, VecView x, double t, VecView vx, double vt) const {
    return jvp_with(p, x, t, vx, vt);
  }
  Vec jvp_with(VecView p, VecView x, double t, VecView vx, double vt) const;

  static ParamVector make_params(const MlpConfig& cfg);

 private:
  void embed_time(double t, double* out) const;
  void embed_time_dot(double t, double* out, double* dout) const;
  double freq(int pair) const;

  MlpConfig cfg_;
  ParamVector params_;
};

// Reverse-mode gradient of a scalar loss built from network evaluations:
// loss = sum_i local(F(x_i, t_i), i).first, with local also returning
// dLocal/dF. Throws numeric_error on a non-finite loss. Returns the loss and
// fills grad = dLoss/dparams.
double grad_params(const MlpNet& net, VecView params,
                   std::span<const std::pair<Vec, double>> points,
                   const std::function<std::pair<double, Vec>(VecView y, std::size_t i)>& local,
                   Vec& grad);

}  // namespace cmlab
