#pragma once

#include <span>
#include <vector>

#include "cmlab/core/parallel.hpp"
#include "cmlab/core/vec.hpp"

namespace cmlab {

// Scratch buffers for deterministic parallel reductions: one gradient buffer
// and one scalar cell per chunk, combined serially in chunk order afterwards.
// The chunk count is fixed, so the result is independent of thread count.
class GradReducer {
 public:
  explicit GradReducer(std::size_t dim, int chunks = kReduceChunks)
      : dim_(dim), grads_(chunks, Vec(dim, 0.0)), scalars_(chunks, 0.0) {}

  int chunks() const { return static_cast<int>(grads_.size()); }
  std::span<double> grad_chunk(int c) { return {grads_[c].data(), dim_}; }
  double& scalar_chunk(int c) { return scalars_[c]; }

  void reset() {
    for (Vec& g : grads_) g.assign(dim_, 0.0);
    scalars_.assign(scalars_.size(), 0.0);
  }

  // Sums in chunk order. Returns the scalar total; adds gradient totals into
  // grad_out (scaled by `scale`, typically 1/batch).
  double reduce(std::span<double> grad_out, double scale = 1.0) const {
    for (const Vec& g : grads_) {
      for (std::size_t i = 0; i < dim_; ++i) grad_out[i] += scale * g[i];
    }
    return reduce_scalar();
  }

  double reduce_scalar() const {
    double s = 0.0;
    for (double v : scalars_) s += v;
    return s;
  }

 private:
  std::size_t dim_;
  std::vector<Vec> grads_;
  Vec scalars_;
};

}  // namespace cmlab
