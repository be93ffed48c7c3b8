#include "cmlab/diffusion/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/rng.hpp"

namespace cmlab {

namespace {

// log N(x; mu, s2 I) up to full normalization.
double log_gauss(VecView x, VecView mu, double s2) {
  const std::size_t d = x.size();
  double q = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double r = x[i] - mu[i];
    q += r * r;
  }
  return -0.5 * q / s2 - 0.5 * d * std::log(2.0 * M_PI * s2);
}

}  // namespace

void GaussianMixture::validate() const {
  if (weights.empty() || weights.size() != means.size() || weights.size() != variances.size())
    throw input_error("GaussianMixture: component count mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw input_error("GaussianMixture: negative weight");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw input_error("GaussianMixture: weights must sum to 1");
  for (double v : variances) {
    if (!(v > 0.0)) throw input_error("GaussianMixture: variances must be positive");
  }
  for (const Vec& m : means) {
    if (m.size() != means[0].size()) throw input_error("GaussianMixture: mean dimension mismatch");
  }
}

double GaussianMixture::log_density(VecView x, double t) const {
  const int k = components();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(k);
  for (int i = 0; i < k; ++i) {
    logs[i] = std::log(weights[i]) + log_gauss(x, means[i], variances[i] + t * t);
    best = std::max(best, logs[i]);
  }
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += std::exp(logs[i] - best);
  return best + std::log(acc);
}

Vec GaussianMixture::score(VecView x, double t) const {
  const int k = components();
  const std::size_t d = x.size();

  std::vector<double> logs(k);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    logs[i] = std::log(weights[i]) + log_gauss(x, means[i], variances[i] + t * t);
    best = std::max(best, logs[i]);
  }
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    logs[i] = std::exp(logs[i] - best);
    total += logs[i];
  }

  Vec s(d, 0.0);
  for (int i = 0; i < k; ++i) {
    const double r = logs[i] / total;
    const double inv = 1.0 / (variances[i] + t * t);
    for (std::size_t j = 0; j < d; ++j) s[j] -= r * (x[j] - means[i][j]) * inv;
  }
  return s;
}

Vec GaussianMixture::posterior_mean(VecView x, double t) const {
  const int k = components();
  const std::size_t d = x.size();
  const double t2 = t * t;

  std::vector<double> logs(k);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    logs[i] = std::log(weights[i]) + log_gauss(x, means[i], variances[i] + t2);
    best = std::max(best, logs[i]);
  }
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    logs[i] = std::exp(logs[i] - best);
    total += logs[i];
  }

  Vec m(d, 0.0);
  for (int i = 0; i < k; ++i) {
    const double r = logs[i] / total;
    const double s2 = variances[i];
    const double a = s2 / (s2 + t2);   // coefficient on x
    const double b = t2 / (s2 + t2);   // coefficient on mu
    for (std::size_t j = 0; j < d; ++j) m[j] += r * (a * x[j] + b * means[i][j]);
  }
  return m;
}

Vec GaussianMixture::sample(RandomStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  int pick = components() - 1;
  for (int i = 0; i < components(); ++i) {
    acc += weights[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  const double sd = std::sqrt(variances[pick]);
  Vec x(dim());
  for (int j = 0; j < dim(); ++j) x[j] = means[pick][j] + sd * rng.normal();
  return x;
}

double GaussianMixture::data_std() const {
  const int d = dim();
  Vec m = mean();
  double trace = 0.0;
  for (int j = 0; j < d; ++j) {
    double second = 0.0;
    for (int i = 0; i < components(); ++i)
      second += weights[i] * (variances[i] + means[i][j] * means[i][j]);
    trace += second - m[j] * m[j];
  }
  return std::sqrt(trace / d);
}

Vec GaussianMixture::mean() const {
  Vec m(dim(), 0.0);
  for (int i = 0; i < components(); ++i) axpy(weights[i], means[i], m);
  return m;
}

GaussianMixture GaussianMixture::single(Vec mean, double variance) {
  GaussianMixture gm;
  gm.weights = {1.0};
  gm.means = {std::move(mean)};
  gm.variances = {variance};
  gm.validate();
  return gm;
}

GaussianMixture GaussianMixture::symmetric_pair(double offset, double variance, int dim) {
  GaussianMixture gm;
  gm.weights = {0.5, 0.5};
  gm.means = {Vec(dim, offset), Vec(dim, -offset)};
  gm.variances = {variance, variance};
  gm.validate();
  return gm;
}

Vec perturb(VecView x, double t, VecView z) {
  if (x.size() != z.size()) throw input_error("perturb: shape mismatch");
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + t * z[i];
  return y;
}

}  // namespace cmlab
