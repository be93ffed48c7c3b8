#include "cmlab/consistency/model.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"

namespace cmlab {

ConsistencyModel::ConsistencyModel(MlpConfig backbone, double sigma_data, double epsilon,
                                   double t_max)
    : net_(std::move(backbone)), sigma_data_(sigma_data), epsilon_(epsilon), t_max_(t_max) {
  if (!(sigma_data > 0.0)) throw input_error("ConsistencyModel: sigma_data must be positive");
  if (!(epsilon > 0.0) || !(epsilon < t_max))
    throw input_error("ConsistencyModel: need 0 < epsilon < t_max");
}

void ConsistencyModel::check_time(double t) const {
  if (!(t >= epsilon_) || !(t <= t_max_))
    throw input_error("ConsistencyModel: t outside [epsilon, T]");
}

double ConsistencyModel::c_skip(double t) const {
  const double sd2 = sigma_data_ * sigma_data_;
  const double d = t - epsilon_;
  return sd2 / (d * d + sd2);
}

double ConsistencyModel::c_out(double t) const {
  const double sd2 = sigma_data_ * sigma_data_;
  return sigma_data_ * (t - epsilon_) / std::sqrt(sd2 + t * t);
}

double ConsistencyModel::c_skip_dot(double t) const {
  const double sd2 = sigma_data_ * sigma_data_;
  const double d = t - epsilon_;
  const double den = d * d + sd2;
  return -2.0 * sd2 * d / (den * den);
}

double ConsistencyModel::c_out_dot(double t) const {
  const double sd2 = sigma_data_ * sigma_data_;
  return sigma_data_ * (sd2 + epsilon_ * t) / std::pow(sd2 + t * t, 1.5);
}

Vec ConsistencyModel::apply_with(VecView p, VecView x, double t) const {
  check_time(t);
  const double cs = c_skip(t);
  const double co = c_out(t);
  Vec y = net_.forward_with(p, x, t);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = cs * x[i] + co * y[i];
  return y;
}

Vec ConsistencyModel::apply_tape(VecView p, VecView x, double t, Tape& tape) const {
  check_time(t);
  const double cs = c_skip(t);
  const double co = c_out(t);
  Vec y = net_.forward_tape(p, x, t, tape);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = cs * x[i] + co * y[i];
  return y;
}

void ConsistencyModel::backward(VecView p, const Tape& tape, double t, VecView df,
                                std::span<double> grad) const {
  const double co = c_out(t);
  Vec dF(df.size());
  for (std::size_t i = 0; i < df.size(); ++i) dF[i] = co * df[i];
  net_.backward(p, tape, dF, grad);
}

Vec ConsistencyModel::jvp_with(VecView p, VecView x, double t, VecView vx, double vt) const {
  check_time(t);
  const double cs = c_skip(t);
  const double co = c_out(t);
  const double cs_dot = c_skip_dot(t);
  const double co_dot = c_out_dot(t);

  Vec f = net_.forward_with(p, x, t);
  Vec df = net_.jvp_with(p, x, t, vx, vt);
  Vec out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    out[i] = cs * vx[i] + cs_dot * vt * x[i] + co * df[i] + co_dot * vt * f[i];
  return out;
}

void ema_update(EmaPair& pair, double mu) {
  if (!(mu >= 0.0) || !(mu < 1.0)) throw input_error("ema_update: need 0 <= mu < 1");
  if (!pair.online.same_layout(pair.target)) throw input_error("ema_update: layout mismatch");
  const std::size_t n = pair.online.size();
  for (std::size_t i = 0; i < n; ++i)
    pair.target.values[i] = mu * pair.target.values[i] + (1.0 - mu) * pair.online.values[i];
}

}  // namespace cmlab
