#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cmlab/core/vec.hpp"
#include "cmlab/diffusion/mixture.hpp"

namespace cmlab {

class RandomStream;

// Self-normalized importance-sampling estimate of -E[(x_t - x)/t^2 | x_t]
// with proposal x ~ p_data, so the weights are N(x_t; x, t^2 I) evaluated in
// log space. Equals the mixture score in expectation (Lemma-1 identity).
// Throws numeric_error when every weight underflows to -inf.
Vec lemma1_estimate(const GaussianMixture& gm, VecView x_t, double t, long sample_count,
                    RandomStream& rng);

struct EstimatorReport {
  double t = 0.0;
  std::vector<long> sample_counts;
  std::vector<double> mean_error;  // ||estimate - analytic score||, averaged
  double slope = 0.0;              // log-log regression of error vs sample count
};

// Runs the estimator at several probe points x_t ~ p_t across the given
// sample counts and reports how the deviation from the analytic score decays.
EstimatorReport score_estimator_check(const GaussianMixture& gm, double t,
                                      std::span<const long> sample_counts, int probe_points,
                                      int replicates, std::uint64_t seed);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace cmlab
