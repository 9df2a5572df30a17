#pragma once

#include "hydrolim/spectral.hpp"
#include "hydrolim/state.hpp"

namespace hydrolim {

/// The four components (sigma, v1, v2, w) of a tendency or state increment.
struct CfFields {
  SpectralField sigma;
  SpectralField v1;
  SpectralField v2;
  SpectralField w;

  static CfFields zero(const Grid& grid) {
    return {SpectralField(grid, Parity::even), SpectralField(grid, Parity::even), SpectralField(grid, Parity::even),
            SpectralField(grid, Parity::odd)};
  }
};

/// Transport velocity (v1, v2, w) held in physical space so that several
/// advections can share one set of backward transforms.
struct Transport {
  PhysicalField v1;
  PhysicalField v2;
  PhysicalField w;

  Transport(const SpectralField& a, const SpectralField& b, const SpectralField& c)
      : v1(to_physical(a)), v2(to_physical(b)), w(to_physical(c)) {}
};

/// (v . grad_h + w d_z) f, formed pseudo-spectrally.
inline SpectralField advect(const Transport& u, const SpectralField& f, bool apply_dealias = true) {
  PhysicalField p = u.v1 * to_physical(derivative(f, Axis::x));
  p += u.v2 * to_physical(derivative(f, Axis::y));
  p += u.w * to_physical(derivative(f, Axis::z));
  return finish_product(p, f.parity(), apply_dealias);
}

inline SpectralField div_h(const SpectralField& a, const SpectralField& b) {
  return derivative(a, Axis::x) + derivative(b, Axis::y);
}

inline SpectralField laplacian_h(const SpectralField& f) {
  return derivative(f, Axis::x, 2) + derivative(f, Axis::y, 2);
}

/// First time derivatives from the equations of motion:
///   s_t = -(v.grad_h s + w s_z) - div_h v - w_z
///   v_t = -(v.grad_h v + w v_z) - grad_h s + lap v
///   w_t = -(v.grad_h w + w w_z) - s_z / eps^2 + lap w
inline CfFields cf_first_derivatives(const SpectralField& sigma, const SpectralField& v1, const SpectralField& v2,
                                     const SpectralField& w, double epsilon, bool apply_dealias = true) {
  const Transport u(v1, v2, w);
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  CfFields d{-advect(u, sigma, apply_dealias) - div_h(v1, v2) - derivative(w, Axis::z),
             -advect(u, v1, apply_dealias) - derivative(sigma, Axis::x) + laplacian(v1),
             -advect(u, v2, apply_dealias) - derivative(sigma, Axis::y) + laplacian(v2),
             -advect(u, w, apply_dealias) - inv_eps2 * derivative(sigma, Axis::z) + laplacian(w)};
  d.sigma.set_parity(Parity::even);
  d.v1.set_parity(Parity::even);
  d.v2.set_parity(Parity::even);
  d.w.set_parity(Parity::odd);
  return d;
}

/// Second time derivatives by differentiating the equations in time and
/// substituting the first derivatives d.
inline CfFields cf_second_derivatives(const SpectralField& sigma, const SpectralField& v1, const SpectralField& v2,
                                      const SpectralField& w, const CfFields& d, double epsilon,
                                      bool apply_dealias = true) {
  const Transport u(v1, v2, w);
  const Transport ut(d.v1, d.v2, d.w);
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  auto material_t = [&](const SpectralField& f, const SpectralField& f_t) {
    return advect(u, f_t, apply_dealias) + advect(ut, f, apply_dealias);
  };
  CfFields dd{-material_t(sigma, d.sigma) - div_h(d.v1, d.v2) - derivative(d.w, Axis::z),
              -material_t(v1, d.v1) - derivative(d.sigma, Axis::x) + laplacian(d.v1),
              -material_t(v2, d.v2) - derivative(d.sigma, Axis::y) + laplacian(d.v2),
              -material_t(w, d.w) - inv_eps2 * derivative(d.sigma, Axis::z) + laplacian(d.w)};
  dd.sigma.set_parity(Parity::even);
  dd.v1.set_parity(Parity::even);
  dd.v2.set_parity(Parity::even);
  dd.w.set_parity(Parity::odd);
  return dd;
}

}  // namespace hydrolim
