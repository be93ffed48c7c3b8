#pragma once

#include <vector>

#include "cmlab/consistency/model.hpp"
#include "cmlab/core/vec.hpp"
#include "cmlab/editing/image.hpp"
#include "cmlab/editing/transform.hpp"

namespace cmlab {

class RandomStream;

// Zero-shot editing task: reference image, invertible transform into the
// constraint space, binary mask there (1 = free / to generate, 0 = pinned to
// the reference), and the decreasing time points driving the
// denoise/re-noise loop.
struct EditSpec {
  Image reference;
  LinearTransform transform;
  Vec mask;
  std::vector<double> timepoints;

  void validate(double epsilon) const;
};

struct EditResult {
  Image image;      // transform.inv(transformed)
  Vec transformed;  // final constraint-space state; pinned coordinates hold
                    // the reference values bit-for-bit
};

// The iterative replacement procedure: start from N(y, t_1^2 I), denoise with
// the consistency model, re-impose the pinned coordinates in transform space,
// then loop over the remaining time points with N(x, (t_n^2 - eps^2) I)
// noise. The initial draw centers on the caller's reference; the pre-masked
// copy (free coordinates zeroed) only ever feeds the constraint line, where
// the two agree.
EditResult edit(const ConsistencyMap& model, const EditSpec& spec, double epsilon,
                RandomStream& rng);

// Shared time-point defaults for the editing tasks (decreasing grid).
struct EditTimeConfig {
  double epsilon = 0.002;
  double horizon = 80.0;
  double rho = 7.0;
  int steps = 12;
};

// Missing pixels are regenerated; pixel_mask is 1 where missing. A stays the
// identity.
EditSpec inpaint_spec(const Image& reference, const std::vector<int>& pixel_mask,
                      const EditTimeConfig& time);

// Gray reference (all channels equal); the luma coordinate is pinned and the
// two chroma coordinates are regenerated.
EditSpec colorize_spec(const Image& gray, const EditTimeConfig& time);

// Low-resolution reference naively upsampled to full size; per-patch means
// are pinned, the remaining p^2 - 1 coefficients per patch are regenerated.
EditSpec superres_spec(const Image& upsampled, int patch, const EditTimeConfig& time);

// Stroke-guided generation: nothing is pinned; the time points (5.38, 2.24)
// control how far the guide is perturbed.
EditSpec sdedit_spec(const Image& stroke, double t1 = 5.38, double t2 = 2.24);

// f(x, sigma) for sigma in [epsilon, t_max]; out-of-range sigma is an input
// error.
Vec denoise(const ConsistencyMap& model, VecView x, double sigma, double epsilon, double t_max);

// Spherical interpolation of the latent noise, then one model evaluation at
// the horizon. Exactly antiparallel latents are rejected.
Vec slerp(VecView z1, VecView z2, double alpha);
Vec interpolate(const ConsistencyMap& model, VecView z1, VecView z2, double alpha,
                double horizon);

}  // namespace cmlab
