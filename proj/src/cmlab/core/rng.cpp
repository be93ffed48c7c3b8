#include "cmlab/core/rng.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "cmlab/core/errors.hpp"

namespace cmlab {

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
  return 1.0 - uniform();
}

double RandomStream::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * M_PI * u2);
}

void RandomStream::fill_normal(double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = normal();
}

std::int64_t RandomStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw input_error("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1u;
  if (span == 0) return lo + static_cast<std::int64_t>(engine_());  // full 64-bit range
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span + 1u) % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return lo + static_cast<std::int64_t>(x % span);
}

void RandomStream::save(std::ostream& os) const { os << engine_; }

void RandomStream::load(std::istream& is) { is >> engine_; }

}  // namespace cmlab
