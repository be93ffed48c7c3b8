#include "cmlab/diffusion/estimator.hpp"

#include <cmath>
#include <limits>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/parallel.hpp"
#include "cmlab/core/rng.hpp"

namespace cmlab {

Vec lemma1_estimate(const GaussianMixture& gm, VecView x_t, double t, long sample_count,
                    RandomStream& rng) {
  if (sample_count < 1) throw input_error("lemma1_estimate: need at least one sample");
  const std::size_t d = x_t.size();
  const double t2 = t * t;

  std::vector<Vec> draws(sample_count);
  std::vector<double> logw(sample_count);
  double best = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < sample_count; ++i) {
    draws[i] = gm.sample(rng);
    double q = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double r = x_t[j] - draws[i][j];
      q += r * r;
    }
    logw[i] = -0.5 * q / t2;
    best = std::max(best, logw[i]);
  }
  if (!std::isfinite(best)) throw numeric_error("lemma1_estimate: all importance weights underflow");

  double total = 0.0;
  Vec est(d, 0.0);
  for (long i = 0; i < sample_count; ++i) {
    const double w = std::exp(logw[i] - best);
    total += w;
    for (std::size_t j = 0; j < d; ++j) est[j] -= w * (x_t[j] - draws[i][j]) / t2;
  }
  for (double& v : est) v /= total;
  return est;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

EstimatorReport score_estimator_check(const GaussianMixture& gm, double t,
                                      std::span<const long> sample_counts, int probe_points,
                                      int replicates, std::uint64_t seed) {
  EstimatorReport report;
  report.t = t;
  report.sample_counts.assign(sample_counts.begin(), sample_counts.end());

  RandomStream probe_rng(seed);
  std::vector<Vec> probes(probe_points);
  std::vector<Vec> truth(probe_points);
  for (int p = 0; p < probe_points; ++p) {
    Vec x0 = gm.sample(probe_rng);
    Vec z(gm.dim());
    probe_rng.fill_normal(z.data(), z.size());
    probes[p] = perturb(x0, t, z);
    truth[p] = gm.score(probes[p], t);
  }

  report.mean_error.resize(sample_counts.size());
  for (std::size_t mi = 0; mi < sample_counts.size(); ++mi) {
    const long m = sample_counts[mi];
    const std::size_t jobs = static_cast<std::size_t>(probe_points) * replicates;
    std::vector<double> errors(jobs, 0.0);
    parallel_for(jobs, [&](std::size_t j) {
      const int p = static_cast<int>(j) / replicates;
      RandomStream rng(seed ^ (0x100000001b3ull * (j + 1)) ^ (0x9e37ull * (mi + 1)));
      const Vec est = lemma1_estimate(gm, probes[p], t, m, rng);
      errors[j] = norm2(diff(est, truth[p]));
    });
    double acc = 0.0;
    for (double e : errors) acc += e;
    report.mean_error[mi] = acc / jobs;
  }

  std::vector<double> counts(sample_counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = static_cast<double>(sample_counts[i]);
  report.slope = loglog_slope(counts, report.mean_error);
  return report;
}

}  // namespace cmlab
