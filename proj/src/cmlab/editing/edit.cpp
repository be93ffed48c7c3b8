#include "cmlab/editing/edit.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/rng.hpp"
#include "cmlab/diffusion/time_grid.hpp"

namespace cmlab {

void EditSpec::validate(double epsilon) const {
  if (mask.size() != transform.size() || reference.size() != transform.size())
    throw input_error("EditSpec: reference/mask/transform sizes disagree");
  for (double m : mask) {
    if (m != 0.0 && m != 1.0) throw input_error("EditSpec: mask entries must be 0 or 1");
  }
  if (timepoints.empty()) throw input_error("EditSpec: need at least one timepoint");
  double prev = timepoints.front();
  for (std::size_t i = 0; i < timepoints.size(); ++i) {
    if (!(timepoints[i] > epsilon)) throw input_error("EditSpec: timepoints must exceed epsilon");
    if (i > 0 && !(timepoints[i] < prev))
      throw input_error("EditSpec: timepoints must strictly decrease");
    prev = timepoints[i];
  }
  if (transform.roundtrip_error() > 1e-10)
    throw input_error("EditSpec: transform fails the inverse round-trip check");
}

EditResult edit(const ConsistencyMap& model, const EditSpec& spec, double epsilon,
                RandomStream& rng) {
  spec.validate(epsilon);
  if (static_cast<std::size_t>(model.dim()) != spec.transform.size())
    throw input_error("edit: model dimension mismatch");

  const std::size_t size = spec.transform.size();
  const Vec w_y = spec.transform.fwd(spec.reference.data);
  // Pinned part of the constraint state; free coordinates zeroed.
  Vec w_ref(size);
  for (std::size_t i = 0; i < size; ++i) w_ref[i] = w_y[i] * (1.0 - spec.mask[i]);

  auto clamp = [&](const Vec& x) {
    const Vec w_x = spec.transform.fwd(x);
    Vec w(size);
    for (std::size_t i = 0; i < size; ++i) w[i] = w_ref[i] + w_x[i] * spec.mask[i];
    return w;
  };

  const double t1 = spec.timepoints.front();
  Vec x(size);
  for (std::size_t i = 0; i < size; ++i) x[i] = spec.reference.data[i] + t1 * rng.normal();

  x = model.apply(x, t1);
  Vec w = clamp(x);
  x = spec.transform.inv(w);

  for (std::size_t n = 1; n < spec.timepoints.size(); ++n) {
    const double t = spec.timepoints[n];
    const double sd = std::sqrt(t * t - epsilon * epsilon);
    for (double& v : x) v += sd * rng.normal();
    x = model.apply(x, t);
    w = clamp(x);
    x = spec.transform.inv(w);
  }

  EditResult result;
  result.image = spec.reference;
  result.image.data = std::move(x);
  result.transformed = std::move(w);
  return result;
}

EditSpec inpaint_spec(const Image& reference, const std::vector<int>& pixel_mask,
                      const EditTimeConfig& time) {
  if (pixel_mask.size() != reference.size()) throw input_error("inpaint_spec: mask size mismatch");
  EditSpec spec;
  spec.reference = reference;
  spec.transform = LinearTransform::identity(reference.size());
  spec.mask.resize(reference.size());
  for (std::size_t i = 0; i < pixel_mask.size(); ++i) spec.mask[i] = pixel_mask[i] ? 1.0 : 0.0;
  spec.timepoints = editing_timepoints(time.epsilon, time.horizon, time.rho, time.steps);
  // The grid runs down to epsilon but evaluations need t > epsilon; drop the
  // terminal boundary.
  spec.timepoints.pop_back();
  return spec;
}

EditSpec colorize_spec(const Image& gray, const EditTimeConfig& time) {
  if (gray.channels != 3) throw input_error("colorize_spec: expected a 3-channel image");
  EditSpec spec;
  spec.reference = gray;
  spec.transform = LinearTransform::channel(colorization_q(), 3, gray.size());
  spec.mask.assign(gray.size(), 0.0);
  for (std::size_t p = 0; p < gray.size() / 3; ++p) {
    spec.mask[p * 3 + 1] = 1.0;
    spec.mask[p * 3 + 2] = 1.0;
  }
  spec.timepoints = editing_timepoints(time.epsilon, time.horizon, time.rho, time.steps);
  spec.timepoints.pop_back();
  return spec;
}

EditSpec superres_spec(const Image& upsampled, int patch, const EditTimeConfig& time) {
  if (upsampled.height % patch != 0 || upsampled.width % patch != 0)
    throw input_error("superres_spec: image dimensions not divisible by patch");
  EditSpec spec;
  spec.reference = upsampled;
  spec.transform = LinearTransform::patch(patch_mean_q(patch), patch, upsampled.height,
                                          upsampled.width, upsampled.channels);
  const int q_dim = patch * patch;
  const int c = upsampled.channels;
  spec.mask.assign(upsampled.size(), 0.0);
  const std::size_t groups = upsampled.size() / (static_cast<std::size_t>(q_dim) * c);
  for (std::size_t g = 0; g < groups; ++g) {
    for (int k = 1; k < q_dim; ++k) {
      for (int l = 0; l < c; ++l) spec.mask[(g * q_dim + k) * c + l] = 1.0;
    }
  }
  spec.timepoints = editing_timepoints(time.epsilon, time.horizon, time.rho, time.steps);
  spec.timepoints.pop_back();
  return spec;
}

EditSpec sdedit_spec(const Image& stroke, double t1, double t2) {
  EditSpec spec;
  spec.reference = stroke;
  spec.transform = LinearTransform::identity(stroke.size());
  spec.mask.assign(stroke.size(), 1.0);
  spec.timepoints = {t1, t2};
  return spec;
}

Vec denoise(const ConsistencyMap& model, VecView x, double sigma, double epsilon, double t_max) {
  if (!(sigma >= epsilon) || !(sigma <= t_max))
    throw input_error("denoise: sigma outside [epsilon, T]");
  return model.apply(x, sigma);
}

Vec slerp(VecView z1, VecView z2, double alpha) {
  const double n1 = norm2(z1);
  const double n2 = norm2(z2);
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw input_error("slerp: zero latent");
  double c = dot(z1, z2) / (n1 * n2);
  c = std::min(1.0, std::max(-1.0, c));
  const double psi = std::acos(c);
  if (psi > M_PI - 1e-8) throw input_error("slerp: antiparallel latents");
  if (psi < 1e-8) {
    // Nearly parallel: slerp degenerates to lerp.
    Vec z(z1.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = (1.0 - alpha) * z1[i] + alpha * z2[i];
    return z;
  }
  const double s = std::sin(psi);
  const double a = std::sin((1.0 - alpha) * psi) / s;
  const double b = std::sin(alpha * psi) / s;
  Vec z(z1.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = a * z1[i] + b * z2[i];
  return z;
}

Vec interpolate(const ConsistencyMap& model, VecView z1, VecView z2, double alpha,
                double horizon) {
  return model.apply(slerp(z1, z2, alpha), horizon);
}

}  // namespace cmlab
