#pragma once

#include <vector>

#include "cmlab/core/vec.hpp"

namespace cmlab {

// Invertible linear map between a flat (h, w, c) image tensor and its
// constraint space. Three constructions cover every Appendix-style editing
// task: identity (inpainting, strokes), an orthogonal channel mixing
// (colorization), and an orthogonal per-patch mixing (super-resolution).
class LinearTransform {
 public:
  static LinearTransform identity(std::size_t size);

  // y[i,j,k] = sum_l x[i,j,l] Q[l,k]; inverse contracts against Q[k,l].
  static LinearTransform channel(std::vector<double> q, int channels, std::size_t size);

  // Regroups each p x p patch (row-major within the patch) and mixes with
  // Q in R^{p^2 x p^2}. Output layout: (h/p, w/p, p^2, c), flattened.
  static LinearTransform patch(std::vector<double> q, int patch, int height, int width,
                               int channels);

  Vec fwd(VecView x) const;
  Vec inv(VecView y) const;
  std::size_t size() const { return size_; }
  bool is_identity() const { return kind_ == Kind::identity; }

  // max |A^{-1}(A(x)) - x| on a deterministic probe vector.
  double roundtrip_error() const;

 private:
  enum class Kind { identity, channel, patch };
  Kind kind_ = Kind::identity;
  std::vector<double> q_;
  int q_dim_ = 0;
  int channels_ = 0;
  int patch_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::size_t size_ = 0;
};

// Orthogonal 3x3 matrix (row-major) whose first column is exactly
// proportional to the luma weights (0.2989, 0.5870, 0.1140); remaining
// columns orthonormalize the matrix printed in the source material, so all
// entries agree with it to ~2e-4 while Q^T Q = I holds to machine precision.
std::vector<double> colorization_q();

// The matrix as printed, for reference checks.
std::vector<double> colorization_q_printed();

// Orthogonal p^2 x p^2 matrix whose first column is exactly (1/p, ..., 1/p).
std::vector<double> patch_mean_q(int patch);

// max |Q^T Q - I| for a row-major square matrix.
double orthogonality_error(const std::vector<double>& q, int dim);

}  // namespace cmlab
