#pragma once

#include <cstdint>
#include <string>

#include "cmlab/consistency/train.hpp"
#include "cmlab/nn/param_vector.hpp"

namespace cmlab {

// Versioned little-endian binary container. Captures everything a training
// loop needs to resume bit-identically: both parameter arrays, the optimizer
// momentum buffer, the rng engine state and the iteration counter, plus an
// echo of the run configuration. Loaders reject unknown major versions.
struct Checkpoint {
  static constexpr std::uint32_t kMajor = 1;
  static constexpr std::uint32_t kMinor = 0;

  enum class ModelKind : std::uint8_t { score = 0, consistency = 1 };

  ModelKind model_kind = ModelKind::consistency;
  std::string config_json;
  std::vector<ParamEntry> layout;
  Vec online;
  Vec target;    // empty for score models
  Vec velocity;
  Vec moment2;   // empty under plain SGD
  std::uint64_t iteration = 0;
  std::string rng_state;

  // Write-temp-rename; the file at `path` is always complete.
  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);  // input_error on malformed/missing

  static Checkpoint from_state(ModelKind kind, const std::string& config_json,
                               const TrainState& state);
  TrainState to_state() const;
};

}  // namespace cmlab
