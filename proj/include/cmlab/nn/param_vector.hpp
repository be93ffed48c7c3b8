#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cmlab/core/vec.hpp"

namespace cmlab {

struct ParamEntry {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;  // 1 for bias vectors
  std::size_t offset = 0;

  std::size_t count() const { return rows * cols; }
};

// Flat parameter storage plus a (name, shape) layout describing it.
struct ParamVector {
  Vec values;
  std::vector<ParamEntry> layout;

  std::size_t size() const { return values.size(); }

  std::span<double> slice(std::size_t entry) {
    const ParamEntry& e = layout[entry];
    return {values.data() + e.offset, e.count()};
  }
  VecView slice(std::size_t entry) const {
    const ParamEntry& e = layout[entry];
    return {values.data() + e.offset, e.count()};
  }

  // Same layout, all-zero values. Used for gradients and momentum buffers.
  ParamVector zeros_like() const;

  bool same_layout(const ParamVector& other) const;
  bool finite() const { return all_finite(values); }

  // Throws input_error unless values length matches the layout total.
  void validate() const;
};

}  // namespace cmlab
