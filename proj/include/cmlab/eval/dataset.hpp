#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cmlab/core/vec.hpp"
#include "cmlab/diffusion/dsm.hpp"
#include "cmlab/diffusion/mixture.hpp"
#include "cmlab/editing/image.hpp"

namespace cmlab {

class RandomStream;

enum class DatasetKind { gaussian_mixture, swiss_roll, checkerboard, procedural_images };

// Tiny procedural RGB images with learnable structure: axis-aligned bars or
// blobs drawn in correlated palette colors on a dark background.
struct ImageSpec {
  int height = 8;
  int width = 8;
  enum class Motif { two_bars, bars, blobs } motif = Motif::two_bars;

  int dim() const { return height * width * 3; }
};

struct Dataset {
  DatasetKind kind = DatasetKind::gaussian_mixture;
  GaussianMixture mixture;  // used by gaussian_mixture
  ImageSpec images;         // used by procedural_images
  double noise = 0.05;      // jitter for swiss_roll

  int dim() const;
  Vec draw(RandomStream& rng) const;
  DataSampler sampler() const;

  // Analytic score is available only for the mixture kind.
  bool has_analytic_score() const { return kind == DatasetKind::gaussian_mixture; }

  static Dataset gaussian(GaussianMixture gm);
  static Dataset swiss_roll(double noise = 0.05);
  static Dataset checkerboard();
  static Dataset procedural(ImageSpec spec);
};

Batch sample_data(const Dataset& ds, int count, RandomStream& rng);

// Exact support test for the checkerboard: cells with even floor(x)+floor(y)
// inside [-2, 2)^2.
bool checkerboard_allows(VecView point);

Image procedural_image(const ImageSpec& spec, RandomStream& rng);

}  // namespace cmlab
