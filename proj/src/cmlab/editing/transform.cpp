#include "cmlab/editing/transform.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"

namespace cmlab {

namespace {

// Modified Gram-Schmidt on the columns of a row-major square matrix; the
// first column is taken as already unit length and kept verbatim.
void orthonormalize_columns(std::vector<double>& m, int dim) {
  for (int c = 0; c < dim; ++c) {
    for (int prev = 0; prev < c; ++prev) {
      double proj = 0.0;
      for (int r = 0; r < dim; ++r) proj += m[r * dim + c] * m[r * dim + prev];
      for (int r = 0; r < dim; ++r) m[r * dim + c] -= proj * m[r * dim + prev];
    }
    double nrm = 0.0;
    for (int r = 0; r < dim; ++r) nrm += m[r * dim + c] * m[r * dim + c];
    nrm = std::sqrt(nrm);
    if (!(nrm > 1e-12)) throw numeric_error("orthonormalize_columns: degenerate basis");
    for (int r = 0; r < dim; ++r) m[r * dim + c] /= nrm;
  }
}

}  // namespace

std::vector<double> colorization_q_printed() {
  return {0.4471, -0.8204, 0.3563,  //
          0.8780, 0.4785,  0.0,     //
          0.1705, -0.3129, -0.9343};
}

std::vector<double> colorization_q() {
  std::vector<double> q = colorization_q_printed();
  const double g[3] = {0.2989, 0.5870, 0.1140};
  const double nrm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  for (int r = 0; r < 3; ++r) q[r * 3 + 0] = g[r] / nrm;
  orthonormalize_columns(q, 3);
  return q;
}

std::vector<double> patch_mean_q(int patch) {
  if (patch < 1) throw input_error("patch_mean_q: patch must be >= 1");
  const int dim = patch * patch;
  std::vector<double> q(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int r = 0; r < dim; ++r) q[r * dim + 0] = 1.0 / patch;
  // Complete with shifted identity columns; Gram-Schmidt makes them
  // orthonormal. Column c starts as e_{c-1}, which is never parallel to the
  // constant first column for dim > 1.
  for (int c = 1; c < dim; ++c) q[(c - 1) * dim + c] = 1.0;
  orthonormalize_columns(q, dim);
  return q;
}

double orthogonality_error(const std::vector<double>& q, int dim) {
  double worst = 0.0;
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      double s = 0.0;
      for (int r = 0; r < dim; ++r) s += q[r * dim + a] * q[r * dim + b];
      worst = std::max(worst, std::fabs(s - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

LinearTransform LinearTransform::identity(std::size_t size) {
  LinearTransform t;
  t.kind_ = Kind::identity;
  t.size_ = size;
  return t;
}

LinearTransform LinearTransform::channel(std::vector<double> q, int channels, std::size_t size) {
  if (size % channels != 0) throw input_error("LinearTransform: size not divisible by channels");
  LinearTransform t;
  t.kind_ = Kind::channel;
  t.q_ = std::move(q);
  t.q_dim_ = channels;
  t.channels_ = channels;
  t.size_ = size;
  return t;
}

LinearTransform LinearTransform::patch(std::vector<double> q, int patch, int height, int width,
                                       int channels) {
  if (height % patch != 0 || width % patch != 0)
    throw input_error("LinearTransform: image dimensions not divisible by patch");
  LinearTransform t;
  t.kind_ = Kind::patch;
  t.q_ = std::move(q);
  t.q_dim_ = patch * patch;
  t.patch_ = patch;
  t.height_ = height;
  t.width_ = width;
  t.channels_ = channels;
  t.size_ = static_cast<std::size_t>(height) * width * channels;
  return t;
}

Vec LinearTransform::fwd(VecView x) const {
  if (x.size() != size_) throw input_error("LinearTransform: size mismatch");
  switch (kind_) {
    case Kind::identity:
      return Vec(x.begin(), x.end());
    case Kind::channel: {
      Vec y(size_);
      const std::size_t pixels = size_ / channels_;
      for (std::size_t p = 0; p < pixels; ++p) {
        const double* xp = x.data() + p * channels_;
        double* yp = y.data() + p * channels_;
        for (int k = 0; k < channels_; ++k) {
          double s = 0.0;
          for (int l = 0; l < channels_; ++l) s += xp[l] * q_[l * q_dim_ + k];
          yp[k] = s;
        }
      }
      return y;
    }
    case Kind::patch: {
      Vec y(size_);
      const int hp = height_ / patch_;
      const int wp = width_ / patch_;
      std::vector<double> gathered(q_dim_);
      for (int i = 0; i < hp; ++i) {
        for (int j = 0; j < wp; ++j) {
          for (int l = 0; l < channels_; ++l) {
            for (int m = 0; m < q_dim_; ++m) {
              const int row = i * patch_ + m / patch_;
              const int col = j * patch_ + m % patch_;
              gathered[m] = x[(static_cast<std::size_t>(row) * width_ + col) * channels_ + l];
            }
            double* yp = y.data() + ((static_cast<std::size_t>(i) * wp + j) * q_dim_) * channels_;
            for (int k = 0; k < q_dim_; ++k) {
              double s = 0.0;
              for (int m = 0; m < q_dim_; ++m) s += gathered[m] * q_[m * q_dim_ + k];
              yp[k * channels_ + l] = s;
            }
          }
        }
      }
      return y;
    }
  }
  return {};
}

Vec LinearTransform::inv(VecView y) const {
  if (y.size() != size_) throw input_error("LinearTransform: size mismatch");
  switch (kind_) {
    case Kind::identity:
      return Vec(y.begin(), y.end());
    case Kind::channel: {
      Vec x(size_);
      const std::size_t pixels = size_ / channels_;
      for (std::size_t p = 0; p < pixels; ++p) {
        const double* yp = y.data() + p * channels_;
        double* xp = x.data() + p * channels_;
        for (int k = 0; k < channels_; ++k) {
          double s = 0.0;
          for (int l = 0; l < channels_; ++l) s += yp[l] * q_[k * q_dim_ + l];
          xp[k] = s;
        }
      }
      return x;
    }
    case Kind::patch: {
      Vec x(size_);
      const int hp = height_ / patch_;
      const int wp = width_ / patch_;
      for (int i = 0; i < hp; ++i) {
        for (int j = 0; j < wp; ++j) {
          for (int l = 0; l < channels_; ++l) {
            const double* yp =
                y.data() + ((static_cast<std::size_t>(i) * wp + j) * q_dim_) * channels_;
            for (int k = 0; k < q_dim_; ++k) {
              double s = 0.0;
              for (int m = 0; m < q_dim_; ++m) s += yp[m * channels_ + l] * q_[k * q_dim_ + m];
              const int row = i * patch_ + k / patch_;
              const int col = j * patch_ + k % patch_;
              x[(static_cast<std::size_t>(row) * width_ + col) * channels_ + l] = s;
            }
          }
        }
      }
      return x;
    }
  }
  return {};
}

double LinearTransform::roundtrip_error() const {
  Vec probe(size_);
  // Deterministic full-rank probe; no rng dependency.
  for (std::size_t i = 0; i < size_; ++i)
    probe[i] = std::sin(0.7 * static_cast<double>(i) + 0.3) + 1e-3 * static_cast<double>(i % 17);
  const Vec back = inv(fwd(probe));
  double worst = 0.0;
  for (std::size_t i = 0; i < size_; ++i) worst = std::max(worst, std::fabs(back[i] - probe[i]));
  return worst;
}

}  // namespace cmlab
