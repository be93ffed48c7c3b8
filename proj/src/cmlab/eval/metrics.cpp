#include "cmlab/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/parallel.hpp"
#include "cmlab/core/reduce.hpp"
#include "cmlab/core/rng.hpp"

namespace cmlab {

namespace {

void check_pair(const Batch& a, const Batch& b) {
  if (a.empty() || b.empty()) throw input_error("metrics: empty batch");
  if (a[0].size() != b[0].size()) throw input_error("metrics: dimension mismatch");
}

// 1-D 2-Wasserstein between sorted samples via quantile matching. Equal sizes
// reduce to the classic sorted pairing.
double w2_sorted(const Vec& sa, const Vec& sb) {
  const std::size_t k = std::max(sa.size(), sb.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double q = (static_cast<double>(i) + 0.5) / k;
    const double va = sa[std::min(sa.size() - 1, static_cast<std::size_t>(q * sa.size()))];
    const double vb = sb[std::min(sb.size() - 1, static_cast<std::size_t>(q * sb.size()))];
    acc += (va - vb) * (va - vb);
  }
  return std::sqrt(acc / k);
}

double sw_over_dirs(const Batch& a, const Batch& b, const Batch& dirs) {
  GradReducer acc(0);
  parallel_chunks(dirs.size(), acc.chunks(), [&](std::size_t lo, std::size_t hi, int chunk) {
    Vec pa(a.size()), pb(b.size());
    for (std::size_t d = lo; d < hi; ++d) {
      for (std::size_t i = 0; i < a.size(); ++i) pa[i] = dot(a[i], dirs[d]);
      for (std::size_t i = 0; i < b.size(); ++i) pb[i] = dot(b[i], dirs[d]);
      std::sort(pa.begin(), pa.end());
      std::sort(pb.begin(), pb.end());
      acc.scalar_chunk(chunk) += w2_sorted(pa, pb);
    }
  });
  return acc.reduce_scalar() / static_cast<double>(dirs.size());
}

}  // namespace

double sliced_wasserstein(const Batch& a, const Batch& b, int projections, std::uint64_t seed) {
  check_pair(a, b);
  const std::size_t dim = a[0].size();
  RandomStream rng(seed);
  Batch dirs(projections);
  for (int d = 0; d < projections; ++d) {
    Vec v(dim);
    double nrm = 0.0;
    do {
      rng.fill_normal(v.data(), dim);
      nrm = norm2(v);
    } while (!(nrm > 1e-12));
    for (double& x : v) x /= nrm;
    dirs[d] = std::move(v);
  }
  return sw_over_dirs(a, b, dirs);
}

double sliced_wasserstein_dirs(const Batch& a, const Batch& b, const Batch& directions) {
  check_pair(a, b);
  if (directions.empty()) throw input_error("sliced_wasserstein: no directions");
  return sw_over_dirs(a, b, directions);
}

double median_bandwidth(const Batch& a, const Batch& b) {
  // Median heuristic over the pooled sample; deterministically subsampled to
  // bound the quadratic cost.
  constexpr std::size_t kCap = 512;
  Batch pool;
  pool.reserve(std::min(kCap, a.size() + b.size()));
  const std::size_t stride_a = std::max<std::size_t>(1, a.size() * 2 / kCap);
  const std::size_t stride_b = std::max<std::size_t>(1, b.size() * 2 / kCap);
  for (std::size_t i = 0; i < a.size(); i += stride_a) pool.push_back(a[i]);
  for (std::size_t i = 0; i < b.size(); i += stride_b) pool.push_back(b[i]);

  std::vector<double> dists;
  dists.reserve(pool.size() * (pool.size() - 1) / 2);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) dists.push_back(norm2(diff(pool[i], pool[j])));
  }
  if (dists.empty()) return 1.0;
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
  const double med = dists[dists.size() / 2];
  return med > 0.0 ? med : 1.0;
}

namespace {

// Mean kernel value over the full i x j grid (V-statistic), row-parallel.
double mean_kernel(const Batch& a, const Batch& b, double inv_two_h2) {
  GradReducer acc(0);
  parallel_chunks(a.size(), acc.chunks(), [&](std::size_t lo, std::size_t hi, int chunk) {
    for (std::size_t i = lo; i < hi; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        double q = 0.0;
        for (std::size_t d = 0; d < a[i].size(); ++d) {
          const double r = a[i][d] - b[j][d];
          q += r * r;
        }
        row += std::exp(-q * inv_two_h2);
      }
      acc.scalar_chunk(chunk) += row;
    }
  });
  return acc.reduce_scalar() / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double mean_distance(const Batch& a, const Batch& b) {
  GradReducer acc(0);
  parallel_chunks(a.size(), acc.chunks(), [&](std::size_t lo, std::size_t hi, int chunk) {
    for (std::size_t i = lo; i < hi; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        double q = 0.0;
        for (std::size_t d = 0; d < a[i].size(); ++d) {
          const double r = a[i][d] - b[j][d];
          q += r * r;
        }
        row += std::sqrt(q);
      }
      acc.scalar_chunk(chunk) += row;
    }
  });
  return acc.reduce_scalar() / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

double mmd_rbf(const Batch& a, const Batch& b, double bandwidth, double* bandwidth_used) {
  check_pair(a, b);
  const double h = bandwidth > 0.0 ? bandwidth : median_bandwidth(a, b);
  if (bandwidth_used) *bandwidth_used = h;
  const double inv = 1.0 / (2.0 * h * h);
  const double value = mean_kernel(a, a, inv) + mean_kernel(b, b, inv) - 2.0 * mean_kernel(a, b, inv);
  return std::max(0.0, value);
}

double energy_distance(const Batch& a, const Batch& b) {
  check_pair(a, b);
  const double value = 2.0 * mean_distance(a, b) - mean_distance(a, a) - mean_distance(b, b);
  return std::max(0.0, value);
}

MetricReport metric_report(const Batch& a, const Batch& b, int projections,
                           std::uint64_t projection_seed) {
  MetricReport r;
  r.count_a = a.size();
  r.count_b = b.size();
  r.projections = projections;
  r.sliced_wasserstein = sliced_wasserstein(a, b, projections, projection_seed);
  r.mmd_rbf = mmd_rbf(a, b, 0.0, &r.bandwidth);
  r.energy_distance = energy_distance(a, b);
  return r;
}

std::string MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["sliced_wasserstein"] = sliced_wasserstein;
  j["mmd_rbf"] = mmd_rbf;
  j["energy_distance"] = energy_distance;
  j["count_a"] = count_a;
  j["count_b"] = count_b;
  j["projections"] = projections;
  j["bandwidth"] = bandwidth;
  return j.dump(2);
}

}  // namespace cmlab
