#include "cmlab/consistency/oracle.hpp"

#include <cmath>

namespace cmlab {

double GaussianConsistencyOracle::contraction(double t) const {
  return std::sqrt((variance_ + epsilon_ * epsilon_) / (variance_ + t * t));
}

Vec GaussianConsistencyOracle::apply(VecView x, double t) const {
  const double c = contraction(t);
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = mean_[i] + c * (x[i] - mean_[i]);
  return y;
}

Vec GaussianConsistencyOracle::jvp_xt(VecView x, double t, VecView vx, double vt) const {
  const double c = contraction(t);
  // d/dt sqrt(a/(var+t^2)) = -t c / (var + t^2)
  const double c_dot = -t * c / (variance_ + t * t);
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = c * vx[i] + c_dot * vt * (x[i] - mean_[i]);
  return y;
}

}  // namespace cmlab
