#include "cmlab/nn/param_vector.hpp"

#include "cmlab/core/errors.hpp"

namespace cmlab {

ParamVector ParamVector::zeros_like() const {
  ParamVector z;
  z.values.assign(values.size(), 0.0);
  z.layout = layout;
  return z;
}

bool ParamVector::same_layout(const ParamVector& other) const {
  if (layout.size() != other.layout.size()) return false;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const ParamEntry& a = layout[i];
    const ParamEntry& b = other.layout[i];
    if (a.name != b.name || a.rows != b.rows || a.cols != b.cols || a.offset != b.offset)
      return false;
  }
  return true;
}

void ParamVector::validate() const {
  std::size_t total = 0;
  for (const ParamEntry& e : layout) {
    if (e.offset != total) throw input_error("ParamVector: non-contiguous layout");
    total += e.count();
  }
  if (total != values.size()) throw input_error("ParamVector: layout/value length mismatch");
}

}  // namespace cmlab
