#pragma once

#include <stdexcept>
#include <string>

namespace cmlab {

// Bad arguments or malformed inputs (dimension mismatches, out-of-range times,
// unreadable configs). CLI maps this to exit code 2.
class input_error : public std::invalid_argument {
 public:
  explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Non-finite values or degenerate numerics encountered mid-computation.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Divergence inside a training loop. Carries the iteration index. CLI maps
// this to exit code 3.
class training_error : public std::runtime_error {
 public:
  training_error(const std::string& what, long step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace cmlab
