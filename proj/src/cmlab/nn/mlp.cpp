#include "cmlab/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/rng.hpp"

namespace cmlab {

namespace {

inline double act_value(Activation a, double z) {
  switch (a) {
    case Activation::silu:
      return z / (1.0 + std::exp(-z));
    case Activation::tanh_act:
      return std::tanh(z);
  }
  return 0.0;
}

inline double act_slope(Activation a, double z) {
  switch (a) {
    case Activation::silu: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 + z * (1.0 - s));
    }
    case Activation::tanh_act: {
      const double th = std::tanh(z);
      return 1.0 - th * th;
    }
  }
  return 0.0;
}

// y = W a + b, W row-major (rows x cols).
inline void affine(VecView w, VecView b, VecView a, Vec& y) {
  const std::size_t rows = b.size();
  const std::size_t cols = a.size();
  y.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w.data() + r * cols;
    double s = b[r];
    for (std::size_t c = 0; c < cols; ++c) s += wr[c] * a[c];
    y[r] = s;
  }
}

// Tangent of an affine layer: dy = W da (bias has zero tangent).
inline void affine_tangent(VecView w, std::size_t rows, VecView da, Vec& dy) {
  const std::size_t cols = da.size();
  dy.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w.data() + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += wr[c] * da[c];
    dy[r] = s;
  }
}

}  // namespace

void MlpConfig::validate() const {
  if (input_dim <= 0) throw input_error("MlpConfig: input_dim must be positive");
  if (time_embed_dim <= 0 || time_embed_dim % 2 != 0)
    throw input_error("MlpConfig: time_embed_dim must be positive and even");
  // hidden may be empty: a single affine output layer is a valid (linear) net.
  for (int h : hidden) {
    if (h <= 0) throw input_error("MlpConfig: hidden widths must be positive");
  }
}

MlpNet::MlpNet(MlpConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  params_ = make_params(cfg_);
}

ParamVector MlpNet::make_params(const MlpConfig& cfg) {
  ParamVector p;
  std::size_t offset = 0;
  auto push = [&](const std::string& name, std::size_t rows, std::size_t cols) {
    p.layout.push_back({name, rows, cols, offset});
    offset += rows * cols;
  };
  std::size_t in = cfg.joint_dim();
  for (std::size_t l = 0; l < cfg.hidden.size(); ++l) {
    const std::size_t out = cfg.hidden[l];
    push("w" + std::to_string(l), out, in);
    push("b" + std::to_string(l), out, 1);
    in = out;
  }
  push("w_out", cfg.input_dim, in);
  push("b_out", cfg.input_dim, 1);
  p.values.assign(offset, 0.0);
  return p;
}

void MlpNet::init(std::uint64_t seed) {
  RandomStream rng(seed);
  params_.values.assign(params_.values.size(), 0.0);
  // All but the last weight matrix: N(0, 1/fan_in). Final layer stays zero so
  // the wrapped consistency model starts at f(x, t) = c_skip(t) x.
  const std::size_t entries = params_.layout.size();
  for (std::size_t e = 0; e + 2 < entries; e += 2) {
    const ParamEntry& w = params_.layout[e];
    const double scale = 1.0 / std::sqrt(static_cast<double>(w.cols));
    auto s = params_.slice(e);
    for (double& v : s) v = scale * rng.normal();
  }
}

void MlpNet::init_dense(std::uint64_t seed) {
  init(seed);
  RandomStream rng(seed ^ 0xd1b54a32d192ed03ull);
  const std::size_t e = params_.layout.size() - 2;
  const ParamEntry& w = params_.layout[e];
  const double scale = 1.0 / std::sqrt(static_cast<double>(w.cols));
  auto s = params_.slice(e);
  for (double& v : s) v = scale * rng.normal();
}

double MlpNet::freq(int pair) const {
  const int n = cfg_.embed_pairs();
  if (n == 1) return cfg_.freq_min;
  const double ratio = cfg_.freq_max / cfg_.freq_min;
  return cfg_.freq_min * std::pow(ratio, static_cast<double>(pair) / (n - 1));
}

void MlpNet::embed_time(double t, double* out) const {
  if (!(t > 0.0)) throw input_error("MlpNet: t must be positive");
  const double u = std::log(t);
  for (int k = 0; k < cfg_.embed_pairs(); ++k) {
    const double a = freq(k) * u;
    out[2 * k] = std::sin(a);
    out[2 * k + 1] = std::cos(a);
  }
}

void MlpNet::embed_time_dot(double t, double* out, double* dout) const {
  if (!(t > 0.0)) throw input_error("MlpNet: t must be positive");
  const double u = std::log(t);
  for (int k = 0; k < cfg_.embed_pairs(); ++k) {
    const double f = freq(k);
    const double a = f * u;
    const double s = std::sin(a);
    const double c = std::cos(a);
    out[2 * k] = s;
    out[2 * k + 1] = c;
    dout[2 * k] = c * f / t;
    dout[2 * k + 1] = -s * f / t;
  }
}

Vec MlpNet::forward_with(VecView p, VecView x, double t) const {
  Tape tape;
  return forward_tape(p, x, t, tape);
}

Vec MlpNet::forward_tape(VecView p, VecView x, double t, Tape& tape) const {
  if (static_cast<int>(x.size()) != cfg_.input_dim)
    throw input_error("MlpNet: input dimension mismatch");
  if (p.size() != params_.size()) throw input_error("MlpNet: parameter length mismatch");

  const double cin =
      cfg_.precondition_input ? 1.0 / std::sqrt(cfg_.sigma_ref * cfg_.sigma_ref + t * t) : 1.0;
  tape.joint.resize(cfg_.joint_dim());
  for (int i = 0; i < cfg_.input_dim; ++i) tape.joint[i] = cin * x[i];
  embed_time(t, tape.joint.data() + cfg_.input_dim);

  const std::size_t layers = cfg_.hidden.size();
  tape.preact.resize(layers);
  tape.act.resize(layers);

  const Vec* a = &tape.joint;
  for (std::size_t l = 0; l < layers; ++l) {
    const ParamEntry& we = params_.layout[2 * l];
    const ParamEntry& be = params_.layout[2 * l + 1];
    affine(p.subspan(we.offset, we.count()), p.subspan(be.offset, be.count()), *a,
           tape.preact[l]);
    Vec& out = tape.act[l];
    out.resize(tape.preact[l].size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = act_value(cfg_.activation, tape.preact[l][i]);
    a = &out;
  }

  const ParamEntry& we = params_.layout[2 * layers];
  const ParamEntry& be = params_.layout[2 * layers + 1];
  Vec y;
  affine(p.subspan(we.offset, we.count()), p.subspan(be.offset, be.count()), *a, y);
  return y;
}

void MlpNet::backward(VecView p, const Tape& tape, VecView dy, std::span<double> grad) const {
  const std::size_t layers = cfg_.hidden.size();
  if (dy.size() != static_cast<std::size_t>(cfg_.input_dim))
    throw input_error("MlpNet: cotangent dimension mismatch");
  if (grad.size() != params_.size()) throw input_error("MlpNet: gradient length mismatch");

  // Output layer: linear.
  const ParamEntry& wo = params_.layout[2 * layers];
  const ParamEntry& bo = params_.layout[2 * layers + 1];
  const Vec& a_last = layers > 0 ? tape.act[layers - 1] : tape.joint;
  Vec da(a_last.size(), 0.0);
  {
    const double* w = p.data() + wo.offset;
    double* gw = grad.data() + wo.offset;
    double* gb = grad.data() + bo.offset;
    const std::size_t cols = a_last.size();
    for (std::size_t r = 0; r < dy.size(); ++r) {
      const double g = dy[r];
      gb[r] += g;
      const double* wr = w + r * cols;
      double* gwr = gw + r * cols;
      for (std::size_t c = 0; c < cols; ++c) {
        gwr[c] += g * a_last[c];
        da[c] += wr[c] * g;
      }
    }
  }

  for (std::size_t l = layers; l-- > 0;) {
    const ParamEntry& we = params_.layout[2 * l];
    const ParamEntry& be = params_.layout[2 * l + 1];
    const Vec& z = tape.preact[l];
    const Vec& a_prev = l > 0 ? tape.act[l - 1] : tape.joint;
    Vec da_prev(a_prev.size(), 0.0);
    const double* w = p.data() + we.offset;
    double* gw = grad.data() + we.offset;
    double* gb = grad.data() + be.offset;
    const std::size_t cols = a_prev.size();
    for (std::size_t r = 0; r < z.size(); ++r) {
      const double g = da[r] * act_slope(cfg_.activation, z[r]);
      if (g == 0.0) continue;
      gb[r] += g;
      const double* wr = w + r * cols;
      double* gwr = gw + r * cols;
      for (std::size_t c = 0; c < cols; ++c) {
        gwr[c] += g * a_prev[c];
        da_prev[c] += wr[c] * g;
      }
    }
    da = std::move(da_prev);
  }
}

double grad_params(const MlpNet& net, VecView params,
                   std::span<const std::pair<Vec, double>> points,
                   const std::function<std::pair<double, Vec>(VecView y, std::size_t i)>& local,
                   Vec& grad) {
  grad.assign(params.size(), 0.0);
  double loss = 0.0;
  Tape tape;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec y = net.forward_tape(params, points[i].first, points[i].second, tape);
    auto [value, dy] = local(y, i);
    loss += value;
    net.backward(params, tape, dy, grad);
  }
  if (!std::isfinite(loss)) throw numeric_error("grad_params: non-finite loss");
  return loss;
}

Vec MlpNet::jvp_with(VecView p, VecView x, double t, VecView vx, double vt) const {
  if (static_cast<int>(x.size()) != cfg_.input_dim ||
      static_cast<int>(vx.size()) != cfg_.input_dim)
    throw input_error("MlpNet: jvp dimension mismatch");
  if (p.size() != params_.size()) throw input_error("MlpNet: parameter length mismatch");

  double cin = 1.0;
  double cin_dot = 0.0;
  if (cfg_.precondition_input) {
    cin = 1.0 / std::sqrt(cfg_.sigma_ref * cfg_.sigma_ref + t * t);
    cin_dot = -t * cin * cin * cin;
  }
  Vec a(cfg_.joint_dim());
  Vec da(cfg_.joint_dim());
  for (int i = 0; i < cfg_.input_dim; ++i) {
    a[i] = cin * x[i];
    da[i] = cin * vx[i] + cin_dot * vt * x[i];
  }
  Vec emb_dot(cfg_.time_embed_dim);
  embed_time_dot(t, a.data() + cfg_.input_dim, emb_dot.data());
  for (int i = 0; i < cfg_.time_embed_dim; ++i) da[cfg_.input_dim + i] = emb_dot[i] * vt;

  const std::size_t layers = cfg_.hidden.size();
  Vec z, dz;
  for (std::size_t l = 0; l < layers; ++l) {
    const ParamEntry& we = params_.layout[2 * l];
    const ParamEntry& be = params_.layout[2 * l + 1];
    affine(p.subspan(we.offset, we.count()), p.subspan(be.offset, be.count()), a, z);
    affine_tangent(p.subspan(we.offset, we.count()), we.rows, da, dz);
    a.resize(z.size());
    da.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      a[i] = act_value(cfg_.activation, z[i]);
      da[i] = act_slope(cfg_.activation, z[i]) * dz[i];
    }
  }

  const ParamEntry& we = params_.layout[2 * layers];
  Vec dy;
  affine_tangent(p.subspan(we.offset, we.count()), we.rows, da, dy);
  return dy;
}

}  // namespace cmlab
