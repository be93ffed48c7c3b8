#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cmlab {

using Vec = std::vector<double>;
using VecView = std::span<const double>;
using Batch = std::vector<Vec>;

inline double dot(VecView a, VecView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(VecView a) { return std::sqrt(dot(a, a)); }

inline double norm1(VecView a) {
  double s = 0.0;
  for (double v : a) s += std::fabs(v);
  return s;
}

inline void axpy(double alpha, VecView x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vec scaled(VecView x, double alpha) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i];
  return y;
}

inline Vec sum(VecView a, VecView b) {
  Vec y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] + b[i];
  return y;
}

inline Vec diff(VecView a, VecView b) {
  Vec y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] - b[i];
  return y;
}

inline bool all_finite(VecView a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace cmlab
