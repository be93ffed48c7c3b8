#pragma once

#include "cmlab/core/vec.hpp"
#include "cmlab/nn/mlp.hpp"

namespace cmlab::ref {

// Independently coded straight-line evaluation of the same weights: walks the
// flat parameter array with its own offset arithmetic, no layout or layer
// machinery. Kept serial; used once as the forward oracle and as the baseline
// side of the kernel benchmark.
Vec forward(const MlpConfig& cfg, VecView params, VecView x, double t);

// Naive quadratic-time single-threaded estimators matching the parallel
// metric kernels.
double mmd_rbf(const Batch& a, const Batch& b, double bandwidth);
double energy_distance(const Batch& a, const Batch& b);

}  // namespace cmlab::ref
