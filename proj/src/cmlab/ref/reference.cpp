#include "cmlab/ref/reference.hpp"

#include <cmath>

namespace cmlab::ref {

Vec forward(const MlpConfig& cfg, VecView params, VecView x, double t) {
  const int pairs = cfg.time_embed_dim / 2;
  double cin = 1.0;
  if (cfg.precondition_input) cin = 1.0 / std::sqrt(cfg.sigma_ref * cfg.sigma_ref + t * t);
  std::vector<double> a;
  a.reserve(cfg.input_dim + cfg.time_embed_dim);
  for (int i = 0; i < cfg.input_dim; ++i) a.push_back(cin * x[i]);
  const double u = std::log(t);
  for (int k = 0; k < pairs; ++k) {
    double f = cfg.freq_min;
    if (pairs > 1)
      f = cfg.freq_min * std::pow(cfg.freq_max / cfg.freq_min, static_cast<double>(k) / (pairs - 1));
    a.push_back(std::sin(f * u));
    a.push_back(std::cos(f * u));
  }

  std::size_t off = 0;
  std::vector<int> widths(cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(cfg.input_dim);
  for (std::size_t layer = 0; layer < widths.size(); ++layer) {
    const int rows = widths[layer];
    const int cols = static_cast<int>(a.size());
    const std::size_t w_off = off;
    const std::size_t b_off = off + static_cast<std::size_t>(rows) * cols;
    std::vector<double> next(rows);
    for (int r = 0; r < rows; ++r) {
      double s = params[b_off + r];
      for (int c = 0; c < cols; ++c) s += params[w_off + static_cast<std::size_t>(r) * cols + c] * a[c];
      next[r] = s;
    }
    off = b_off + rows;
    if (layer + 1 < widths.size()) {
      for (int r = 0; r < rows; ++r) {
        const double z = next[r];
        if (cfg.activation == Activation::silu) {
          next[r] = z / (1.0 + std::exp(-z));
        } else {
          next[r] = std::tanh(z);
        }
      }
    }
    a = std::move(next);
  }
  return a;
}

double mmd_rbf(const Batch& a, const Batch& b, double bandwidth) {
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  auto mean_k = [&](const Batch& p, const Batch& q) {
    double s = 0.0;
    for (const Vec& u : p) {
      for (const Vec& v : q) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) d2 += (u[i] - v[i]) * (u[i] - v[i]);
        s += std::exp(-d2 * inv);
      }
    }
    return s / (static_cast<double>(p.size()) * static_cast<double>(q.size()));
  };
  const double v = mean_k(a, a) + mean_k(b, b) - 2.0 * mean_k(a, b);
  return v > 0.0 ? v : 0.0;
}

double energy_distance(const Batch& a, const Batch& b) {
  auto mean_d = [](const Batch& p, const Batch& q) {
    double s = 0.0;
    for (const Vec& u : p) {
      for (const Vec& v : q) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) d2 += (u[i] - v[i]) * (u[i] - v[i]);
        s += std::sqrt(d2);
      }
    }
    return s / (static_cast<double>(p.size()) * static_cast<double>(q.size()));
  };
  const double v = 2.0 * mean_d(a, b) - mean_d(a, a) - mean_d(b, b);
  return v > 0.0 ? v : 0.0;
}

}  // namespace cmlab::ref
