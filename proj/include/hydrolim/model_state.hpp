#pragma once

#include <cmath>
#include <numbers>

#include "hydrolim/cpe_solver.hpp"
#include "hydrolim/equations.hpp"
#include "hydrolim/state.hpp"

namespace hydrolim {

/// d_t sigma, d_t v, d_t w and d_t^2 sigma at t = 0 from the equations.
inline InitialDerivatives compatibility_derivatives(const CfState& s) {
  CfFields d = cf_first_derivatives(s.sigma, s.v1, s.v2, s.w, s.epsilon);
  CfFields dd = cf_second_derivatives(s.sigma, s.v1, s.v2, s.w, d, s.epsilon);
  return {std::move(d.sigma), std::move(d.v1), std::move(d.v2), std::move(d.w), std::move(dd.sigma)};
}

/// Fixed perturbation shapes used by the initial-data generators.
struct PerturbationShapes {
  SpectralField sigma;  // cos(pi x) cos(pi z)
  SpectralField v1;     // cos(pi y) cos(pi z)
  SpectralField v2;     // cos(pi x) cos(pi z)
  SpectralField w;      // sin(pi z) cos(pi x)
  SpectralField sigma_h;  // cos(pi x): z-independent density shape

  static PerturbationShapes make(const Grid& g) {
    using std::cos, std::sin;
    constexpr double pi = std::numbers::pi;
    auto S = [&](auto fn, Parity p) { return project_parity(to_spectral(PhysicalField::sample(g, fn), p), p); };
    return {S([](double x, double, double z) { return cos(pi * x) * cos(pi * z); }, Parity::even),
            S([](double, double y, double z) { return cos(pi * y) * cos(pi * z); }, Parity::even),
            S([](double x, double, double z) { return cos(pi * x) * cos(pi * z); }, Parity::even),
            S([](double x, double, double z) { return sin(pi * z) * cos(pi * x); }, Parity::odd),
            S([](double x, double, double) { return cos(pi * x); }, Parity::even)};
  }
};

/// Rebuilds the diagnostic wp of a hydrostatic state in place and returns it.
inline CpeState with_current_wp(CpeState s) {
  s.wp = reconstruct_wp(s);
  return s;
}

/// Reference hydrostatic initial state used by the experiment harness:
///   sp = A (0.5 cos(pi x) + 0.3 sin(pi y))
///   vp = A (sin(pi y) + 0.5 cos(pi x) cos(pi z),  cos(pi x) + 0.5 sin(pi y) cos(pi z))
/// The baroclinic part of vp has nonzero horizontal divergence, so wp != 0.
inline CpeState default_cpe_initial(const Grid& g, double amplitude = 0.25) {
  using std::cos, std::sin;
  constexpr double pi = std::numbers::pi;
  const double a = amplitude;
  CpeState s = CpeState::zero(g);
  std::vector<double> sp(g.horizontal_size());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      sp[std::size_t(i) + std::size_t(g.nx()) * j] = a * (0.5 * cos(pi * g.x(i)) + 0.3 * sin(pi * g.y(j)));
  s.sigma_p = HorizontalField::from_physical(g, sp);
  s.vp1 = project_parity(to_spectral(PhysicalField::sample(g,
                                                           [&](double x, double y, double z) {
                                                             return a * (sin(pi * y) + 0.5 * cos(pi * x) * cos(pi * z));
                                                           }),
                                     Parity::even),
                         Parity::even);
  s.vp2 = project_parity(to_spectral(PhysicalField::sample(g,
                                                           [&](double x, double y, double z) {
                                                             return a * (cos(pi * x) + 0.5 * sin(pi * y) * cos(pi * z));
                                                           }),
                                     Parity::even),
                         Parity::even);
  return with_current_wp(std::move(s));
}

/// CF data within O(eps) of the hydrostatic state in L2:
///   sigma0 = sp + eps A zeta_sigma, v0 = vp + eps A zeta_v, w0 = wp + eps A zeta_w.
/// The density perturbation is z-independent, so d_z sigma0 = 0 and the
/// data is hydrostatically balanced; see make_well_prepared_ic_vertical for
/// the variant whose density imbalance is O(eps).
inline CfState make_well_prepared_ic(const CpeState& cpe_init, double epsilon, double amplitude) {
  if (!(amplitude >= 0.0)) throw InvalidInput("amplitude must be nonnegative");
  const Grid& g = cpe_init.grid();
  const PerturbationShapes z = PerturbationShapes::make(g);
  const double e = epsilon * amplitude;
  CfState s{cpe_init.sigma_p.lift() + e * z.sigma_h, cpe_init.vp1 + e * z.v1, cpe_init.vp2 + e * z.v2,
            reconstruct_wp(cpe_init) + e * z.w, epsilon, cpe_init.time};
  s.validate();
  return s;
}

/// Well-prepared data whose density perturbation carries the vertical
/// shape cos(pi x) cos(pi z), so d_z sigma0 = eps A pi cos(pi x) sin(pi z).
/// This excites vertical acoustic waves of O(1) amplitude in w.
inline CfState make_well_prepared_ic_vertical(const CpeState& cpe_init, double epsilon, double amplitude) {
  if (!(amplitude >= 0.0)) throw InvalidInput("amplitude must be nonnegative");
  const Grid& g = cpe_init.grid();
  const PerturbationShapes z = PerturbationShapes::make(g);
  const double e = epsilon * amplitude;
  CfState s{cpe_init.sigma_p.lift() + e * z.sigma, cpe_init.vp1 + e * z.v1, cpe_init.vp2 + e * z.v2,
            reconstruct_wp(cpe_init) + e * z.w, epsilon, cpe_init.time};
  s.validate();
  return s;
}

/// General (not well-prepared) data: an epsilon-independent O(1) velocity
/// and density perturbation with d_z sigma0 = 0.
inline CfState make_illprepared_ic(const CpeState& cpe_init, double epsilon, double amplitude) {
  if (!(amplitude >= 0.0)) throw InvalidInput("amplitude must be nonnegative");
  const Grid& g = cpe_init.grid();
  const PerturbationShapes z = PerturbationShapes::make(g);
  CfState s{cpe_init.sigma_p.lift() + amplitude * z.sigma_h, cpe_init.vp1 + amplitude * z.v1,
            cpe_init.vp2 + amplitude * z.v2, reconstruct_wp(cpe_init), epsilon, cpe_init.time};
  s.validate();
  return s;
}

}  // namespace hydrolim
