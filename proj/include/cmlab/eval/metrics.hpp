#pragma once

#include <cstdint>
#include <string>

#include "cmlab/core/vec.hpp"

namespace cmlab {

// Desk-scale stand-ins for FID: all nonnegative, zero on identical sample
// sets, symmetric in (a, b).
struct MetricReport {
  double sliced_wasserstein = 0.0;
  double mmd_rbf = 0.0;
  double energy_distance = 0.0;
  std::size_t count_a = 0;
  std::size_t count_b = 0;
  int projections = 0;
  double bandwidth = 0.0;  // RBF bandwidth actually used (median heuristic)

  std::string to_json() const;
};

// Average over `projections` random unit directions of the 1-D 2-Wasserstein
// distance between the projected samples (sorted-quantile matching).
double sliced_wasserstein(const Batch& a, const Batch& b, int projections, std::uint64_t seed);

// Variant with caller-supplied directions; used by the rotation-invariance
// property, which is exact when the directions co-rotate.
double sliced_wasserstein_dirs(const Batch& a, const Batch& b, const Batch& directions);

// Biased (V-statistic) squared MMD with a Gaussian kernel, clipped at zero.
// bandwidth <= 0 selects the median heuristic over the pooled pairwise
// distances. bandwidth_used, when non-null, receives the bandwidth applied.
double mmd_rbf(const Batch& a, const Batch& b, double bandwidth = 0.0,
               double* bandwidth_used = nullptr);

// Energy distance 2 E||a-b|| - E||a-a'|| - E||b-b'|| (V-statistic, clipped).
double energy_distance(const Batch& a, const Batch& b);

double median_bandwidth(const Batch& a, const Batch& b);

MetricReport metric_report(const Batch& a, const Batch& b, int projections = 128,
                           std::uint64_t projection_seed = 1234);

}  // namespace cmlab
