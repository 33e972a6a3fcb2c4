#pragma once

#include <cmath>
#include <vector>

#include "lipc/colour.hpp"
#include "lipc/mixing_model.hpp"
#include "oracle.hpp"

namespace lipc::testing {

inline const MixingModel& model() { return make_mixing_model(); }

inline double max_abs_diff(const Colour& a, const Colour& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 3; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const ColourImage& a, const ColourImage& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_abs_diff(a[i], b[i]));
  return m;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace lipc::testing
