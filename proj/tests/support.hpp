#pragma once

#include <cmath>

#include "hydrolim/hydrolim.hpp"

namespace hydrolim::testing {

using verify::random_field;
using verify::random_state;

inline double max_abs_diff(const PhysicalField& a, const PhysicalField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_l2_diff(const SpectralField& a, const SpectralField& b) {
  const double ref = l2_norm(b);
  return l2_norm(a - b) / (ref > 0.0 ? ref : 1.0);
}

template <class Fn>
SpectralField sample(const Grid& g, Fn&& fn, Parity parity = Parity::none) {
  return to_spectral(PhysicalField::sample(g, fn), parity);
}

}  // namespace hydrolim::testing
