#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>

namespace cmlab {

// Deterministic random stream. All draws are derived from the mt19937_64
// engine through fixed, stateless transformations, so the full stream state
// is exactly the engine state. std::normal_distribution is avoided on purpose:
// it caches a spare variate, which breaks checkpoint/resume bit-equality.
class RandomStream {
 public:
  RandomStream() : engine_(0x9e3779b97f4a7c15ull) {}
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform();

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform_open();

  // Standard normal via Box-Muller (two fresh uniforms per call, no cache).
  double normal();

  void fill_normal(double* out, std::size_t n);

  // Uniform integer in [lo, hi], inclusive. Rejection sampled, unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  std::uint64_t raw() { return engine_(); }

  // Engine state round trips exactly (standard-mandated text format).
  void save(std::ostream& os) const;
  void load(std::istream& is);

  bool operator==(const RandomStream& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cmlab
