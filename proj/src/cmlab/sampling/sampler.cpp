#include "cmlab/sampling/sampler.hpp"

#include <cmath>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/parallel.hpp"
#include "cmlab/core/rng.hpp"

namespace cmlab {

void SamplePlan::validate(double epsilon, double horizon) const {
  double prev = horizon;
  for (double tau : timepoints) {
    if (!(tau > epsilon)) throw input_error("SamplePlan: timepoint must exceed epsilon");
    if (!(tau < prev)) throw input_error("SamplePlan: timepoints must strictly decrease below T");
    prev = tau;
  }
}

Batch sample_one_step(const ConsistencyMap& model, double horizon, int count, RandomStream& rng) {
  return sample_multistep(model, SamplePlan{}, 0.0, horizon, count, rng);
}

Batch sample_multistep(const ConsistencyMap& model, const SamplePlan& plan, double epsilon,
                       double horizon, int count, RandomStream& rng) {
  plan.validate(epsilon, horizon);
  const int dim = model.dim();

  // All noise is drawn up front, single threaded, so results depend only on
  // (model, plan, seed) and not on the thread count.
  Batch init(count);
  std::vector<Batch> inject(plan.timepoints.size(), Batch(count));
  for (int i = 0; i < count; ++i) {
    init[i].resize(dim);
    rng.fill_normal(init[i].data(), dim);
    for (std::size_t s = 0; s < plan.timepoints.size(); ++s) {
      inject[s][i].resize(dim);
      rng.fill_normal(inject[s][i].data(), dim);
    }
  }

  Batch out(count);
  parallel_for(count, [&](std::size_t i) {
    Vec x = scaled(init[i], horizon);
    x = model.apply(x, horizon);
    for (std::size_t s = 0; s < plan.timepoints.size(); ++s) {
      const double tau = plan.timepoints[s];
      const double sd = std::sqrt(tau * tau - epsilon * epsilon);
      axpy(sd, inject[s][i], x);
      x = model.apply(x, tau);
    }
    out[i] = std::move(x);
  });
  return out;
}

}  // namespace cmlab
