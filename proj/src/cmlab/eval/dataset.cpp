#include "cmlab/eval/dataset.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/rng.hpp"

namespace cmlab {

int Dataset::dim() const {
  switch (kind) {
    case DatasetKind::gaussian_mixture:
      return mixture.dim();
    case DatasetKind::swiss_roll:
    case DatasetKind::checkerboard:
      return 2;
    case DatasetKind::procedural_images:
      return images.dim();
  }
  return 0;
}

Vec Dataset::draw(RandomStream& rng) const {
  switch (kind) {
    case DatasetKind::gaussian_mixture:
      return mixture.sample(rng);
    case DatasetKind::swiss_roll: {
      // Spiral normalized to roughly unit scale, with isotropic jitter.
      const double a = 1.5 * M_PI * (1.0 + 2.0 * rng.uniform());
      Vec p{a * std::cos(a) / (4.5 * M_PI), a * std::sin(a) / (4.5 * M_PI)};
      p[0] += noise * rng.normal();
      p[1] += noise * rng.normal();
      return p;
    }
    case DatasetKind::checkerboard: {
      // Pick one of the 8 allowed cells of [-2,2)^2, then uniform within it.
      const long cell = rng.uniform_int(0, 7);
      const long row = cell / 2;                       // floor(y) + 2 in {0..3}
      const long col = 2 * (cell % 2) + (row % 2);     // parity keeps floor(x)+floor(y) even
      const double x = -2.0 + col + rng.uniform();
      const double y = -2.0 + row + rng.uniform();
      return {x, y};
    }
    case DatasetKind::procedural_images:
      return procedural_image(images, rng).data;
  }
  return {};
}

DataSampler Dataset::sampler() const {
  Dataset copy = *this;
  return [copy](RandomStream& rng) { return copy.draw(rng); };
}

Dataset Dataset::gaussian(GaussianMixture gm) {
  gm.validate();
  Dataset ds;
  ds.kind = DatasetKind::gaussian_mixture;
  ds.mixture = std::move(gm);
  return ds;
}

Dataset Dataset::swiss_roll(double noise) {
  Dataset ds;
  ds.kind = DatasetKind::swiss_roll;
  ds.noise = noise;
  return ds;
}

Dataset Dataset::checkerboard() {
  Dataset ds;
  ds.kind = DatasetKind::checkerboard;
  return ds;
}

Dataset Dataset::procedural(ImageSpec spec) {
  Dataset ds;
  ds.kind = DatasetKind::procedural_images;
  ds.images = spec;
  return ds;
}

Batch sample_data(const Dataset& ds, int count, RandomStream& rng) {
  Batch out(count);
  for (int i = 0; i < count; ++i) out[i] = ds.draw(rng);
  return out;
}

bool checkerboard_allows(VecView point) {
  const double x = point[0];
  const double y = point[1];
  if (x < -2.0 || x >= 2.0 || y < -2.0 || y >= 2.0) return false;
  const long fx = static_cast<long>(std::floor(x));
  const long fy = static_cast<long>(std::floor(y));
  return ((fx + fy) % 2 + 2) % 2 == 0;
}

namespace {

struct Palette {
  double r, g, b;
};

// Correlated colors so the gray channel predicts chroma reasonably well.
constexpr Palette kPalette[4] = {
    {0.9, 0.2, 0.1},
    {0.1, 0.8, 0.2},
    {0.2, 0.3, 0.9},
    {0.9, 0.8, 0.1},
};

void paint_bar(Image& img, bool horizontal, int pos, int thickness, const Palette& color,
               double gain) {
  for (int i = 0; i < img.height; ++i) {
    for (int j = 0; j < img.width; ++j) {
      const int along = horizontal ? i : j;
      if (along >= pos && along < pos + thickness) {
        img.at(i, j, 0) = gain * (2.0 * color.r - 1.0);
        img.at(i, j, 1) = gain * (2.0 * color.g - 1.0);
        img.at(i, j, 2) = gain * (2.0 * color.b - 1.0);
      }
    }
  }
}

}  // namespace

Image procedural_image(const ImageSpec& spec, RandomStream& rng) {
  Image img(spec.height, spec.width, 3);
  for (double& v : img.data) v = -0.8;

  const double gain = 0.85 + 0.15 * rng.uniform();
  switch (spec.motif) {
    case ImageSpec::Motif::two_bars: {
      const Palette& c1 = kPalette[rng.uniform_int(0, 3)];
      const Palette& c2 = kPalette[rng.uniform_int(0, 3)];
      paint_bar(img, true, static_cast<int>(rng.uniform_int(0, spec.height - 2)), 2, c1, gain);
      paint_bar(img, false, static_cast<int>(rng.uniform_int(0, spec.width - 2)), 2, c2, gain);
      break;
    }
    case ImageSpec::Motif::bars: {
      const int bars = static_cast<int>(rng.uniform_int(1, 3));
      for (int b = 0; b < bars; ++b) {
        const bool horizontal = rng.uniform() < 0.5;
        const int extent = horizontal ? spec.height : spec.width;
        const int thickness = static_cast<int>(rng.uniform_int(1, 2));
        paint_bar(img, horizontal, static_cast<int>(rng.uniform_int(0, extent - thickness)),
                  thickness, kPalette[rng.uniform_int(0, 3)], gain);
      }
      break;
    }
    case ImageSpec::Motif::blobs: {
      const Palette& c = kPalette[rng.uniform_int(0, 3)];
      const double ci = 1.0 + rng.uniform() * (spec.height - 3.0);
      const double cj = 1.0 + rng.uniform() * (spec.width - 3.0);
      const double radius = 1.0 + rng.uniform() * 1.5;
      for (int i = 0; i < spec.height; ++i) {
        for (int j = 0; j < spec.width; ++j) {
          const double d2 = (i - ci) * (i - ci) + (j - cj) * (j - cj);
          const double a = std::exp(-0.5 * d2 / (radius * radius));
          img.at(i, j, 0) += a * gain * (2.0 * c.r - 1.0 + 0.8);
          img.at(i, j, 1) += a * gain * (2.0 * c.g - 1.0 + 0.8);
          img.at(i, j, 2) += a * gain * (2.0 * c.b - 1.0 + 0.8);
        }
      }
      for (double& v : img.data) v = std::min(1.0, std::max(-1.0, v));
      break;
    }
  }
  return img;
}

}  // namespace cmlab
