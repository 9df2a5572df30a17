#pragma once

#include <string>

#include "hydrolim/spectral.hpp"

namespace hydrolim {

/// Prognostic state of the epsilon-scaled compressible system.
/// sigma = log(density), (v1, v2) horizontal velocity, w rescaled vertical
/// velocity; sigma, v even in z and w odd.
struct CfState {
  SpectralField sigma;
  SpectralField v1;
  SpectralField v2;
  SpectralField w;
  double epsilon = 0.1;
  double time = 0.0;

  static CfState zero(const Grid& grid, double epsilon) {
    return {SpectralField(grid, Parity::even), SpectralField(grid, Parity::even),
            SpectralField(grid, Parity::even), SpectralField(grid, Parity::odd), epsilon, 0.0};
  }

  const Grid& grid() const noexcept { return sigma.grid(); }

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    if (!(time >= 0.0)) throw InvalidInput("time must be nonnegative");
    const Grid& g = grid();
    if (!(v1.grid() == g && v2.grid() == g && w.grid() == g)) throw InvalidInput("state fields on different grids");
    if (sigma.parity() != Parity::even || v1.parity() != Parity::even || v2.parity() != Parity::even ||
        w.parity() != Parity::odd) {
      throw InvalidInput("state parities must be (even, even, even, odd)");
    }
  }
};

/// State of the hydrostatic limit system. sigma_p is stored as a genuinely
/// two-dimensional field; wp is diagnostic and refreshed by reconstruct_wp.
struct CpeState {
  HorizontalField sigma_p;
  SpectralField vp1;
  SpectralField vp2;
  SpectralField wp;
  double time = 0.0;

  static CpeState zero(const Grid& grid) {
    return {HorizontalField(grid), SpectralField(grid, Parity::even), SpectralField(grid, Parity::even),
            SpectralField(grid, Parity::odd), 0.0};
  }

  const Grid& grid() const noexcept { return vp1.grid(); }
};

/// Time derivatives of the initial data obtained by substituting the
/// equations (the compatibility conditions).
struct InitialDerivatives {
  SpectralField sigma1;  // d_t sigma
  SpectralField v1_t;    // d_t v1
  SpectralField v2_t;    // d_t v2
  SpectralField w1;      // d_t w
  SpectralField sigma2;  // d_t^2 sigma
};

/// First and second time derivatives of a CF state.
struct TimeDerivatives {
  SpectralField sigma_t, v1_t, v2_t, w_t;
  SpectralField sigma_tt, v1_tt, v2_tt, w_tt;
};

}  // namespace hydrolim
