#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "hydrolim/checkpoint.hpp"
#include "hydrolim/cf_solver.hpp"
#include "hydrolim/cpe_solver.hpp"
#include "hydrolim/linear_oracle.hpp"
#include "hydrolim/model_state.hpp"

namespace hydrolim::verify {

/// Random real field with modes |k_axis| <= max_mode, projected onto `parity`.
inline SpectralField random_field(const Grid& g, int max_mode, Parity parity, unsigned seed, double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  SpectralField f(g);
  for (int kz = -max_mode; kz <= max_mode; ++kz)
    for (int ky = -max_mode; ky <= max_mode; ++ky)
      for (int kx = 0; kx <= max_mode; ++kx) {
        const double decay = amplitude / (1.0 + kx * kx + ky * ky + kz * kz);
        f.set_mode(kx, ky, kz, complex(n(rng), n(rng)) * decay);
      }
  // Real field: make the kx = 0 plane Hermitian by round-tripping through physical space.
  SpectralField clean = to_spectral(to_physical(f));
  if (parity == Parity::none) return clean;
  return project_parity(clean, parity);
}

inline CfState random_state(const Grid& g, int max_mode, double eps, unsigned seed, double amplitude = 0.1) {
  return {random_field(g, max_mode, Parity::even, seed, amplitude),
          random_field(g, max_mode, Parity::even, seed + 1, amplitude),
          random_field(g, max_mode, Parity::even, seed + 2, amplitude),
          random_field(g, max_mode, Parity::odd, seed + 3, amplitude), eps, 0.0};
}

/// Observed orders log2(e_i / e_{i+1}) for successive halvings.
inline std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(std::log2(errors[i] / errors[i + 1]));
  return out;
}

/// Error at time t of the linear CF stepper against the exact mode
/// evolution, starting from sigma = cos(pi (k1 x + k2 y)) cos(pi k3 z).
inline double linear_sector_error(double dt, Mode k, double eps, double t = 1.0, Scheme scheme = Scheme::cnab2) {
  const Grid g(8);
  CfState s = CfState::zero(g, eps);
  s.sigma = project_parity(to_spectral(PhysicalField::sample(g,
                                                             [&](double x, double y, double z) {
                                                               constexpr double pi = std::numbers::pi;
                                                               return std::cos(pi * (k[0] * x + k[1] * y)) *
                                                                      std::cos(pi * k[2] * z);
                                                             }),
                                       Parity::even),
                           Parity::even);
  auto amplitudes = [&](const CfState& st) {
    oracle::Amplitudes a;
    a << st.sigma.coeff(k[0], k[1], k[2]), st.v1.coeff(k[0], k[1], k[2]), st.v2.coeff(k[0], k[1], k[2]),
        st.w.coeff(k[0], k[1], k[2]);
    return a;
  };
  const oracle::Amplitudes init = amplitudes(s);
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.scheme = scheme;
  cfg.nonlinear = false;
  CfIntegrator it(g, eps, cfg);
  const long n = std::lround(t / dt);
  for (long i = 0; i < n; ++i) it.advance(s);
  return (amplitudes(s) - oracle::evolve_exact(init, t, k, eps).amplitudes).norm();
}

struct StructuralReport {
  double parity_leak = 0.0;  // largest wrong-parity part relative to the field
  double mass_drift = 0.0;   // |M(T) - M(0)| / M(0), M = int e^sigma
  double w_mismatch = 0.0;   // rebuilt vs prognostic w, relative L2
  double w_defect = 0.0;
};

inline double mass(const CfState& s) {
  PhysicalField e = to_physical(s.sigma);
  e.apply([](double v) { return std::exp(v); });
  double m = 0.0;
  for (double v : e.values()) m += v;
  return m * s.grid().cell_volume();
}

inline double parity_leak(const CfState& s) {
  auto rel = [](const SpectralField& f, Parity wrong) {
    const double n = l2_norm(f);
    return n > 0.0 ? l2_norm(project_parity(f, wrong)) / n : 0.0;
  };
  return std::max({rel(s.sigma, Parity::odd), rel(s.v1, Parity::odd), rel(s.v2, Parity::odd),
                   rel(s.w, Parity::even)});
}

/// Steps well-prepared data and measures parity, mass and the
/// w reconstruction from the continuity equation.
inline StructuralReport structural_invariants(const Grid& g, double eps, double dt, int steps) {
  CfState s = make_well_prepared_ic(default_cpe_initial(g), eps, 1.0);
  StepperConfig cfg;
  cfg.dt = dt;
  CfIntegrator it(g, eps, cfg);
  const double m0 = mass(s);
  StructuralReport r;
  for (int i = 0; i < steps; ++i) {
    it.advance(s);
    r.parity_leak = std::max(r.parity_leak, parity_leak(s));
  }
  r.mass_drift = std::abs(mass(s) - m0) / m0;
  const TimeDerivatives td = time_derivatives(s);
  const WReconstruction w = reconstruct_w(s.sigma, td.sigma_t, s.v1, s.v2);
  r.w_mismatch = l2_norm(w.w - s.w) / l2_norm(s.w);
  r.w_defect = w.defect;
  return r;
}

/// Largest |wp| on the plane z = 1.
inline double wp_at_lid(const CpeState& s) {
  const Grid& g = s.grid();
  const PhysicalField p = to_physical(s.wp);
  double m = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) m = std::max(m, std::abs(p[g.index(i, j, g.nz() / 2)]));
  return m;
}

struct CpeReport {
  double max_lid = 0.0;     // max over steps of |wp(., 1)|
  double max_dz_sigma = 0.0;  // ||d_z sp||, zero by representation
};

inline CpeReport cpe_invariants(const Grid& g, double dt, int steps, double amplitude = 0.5) {
  CpeState s = default_cpe_initial(g, amplitude);
  StepperConfig cfg;
  cfg.dt = dt;
  CpeIntegrator it(cfg);
  CpeReport r;
  r.max_lid = wp_at_lid(s);
  for (int i = 0; i < steps; ++i) {
    it.advance(s);
    r.max_lid = std::max(r.max_lid, wp_at_lid(s));
    r.max_dz_sigma = std::max(r.max_dz_sigma, l2_norm(derivative(s.sigma_p.lift(), Axis::z)));
  }
  return r;
}

/// Error at t = 1 of the forced hydrostatic solution (sp, vp) = (e^-t cos(pi x), 0).
inline double manufactured_cpe_error(double dt) {
  const Grid g(8);
  std::vector<double> c(g.horizontal_size());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) c[std::size_t(i) + std::size_t(g.nx()) * j] = std::cos(std::numbers::pi * g.x(i));
  const HorizontalField shape = HorizontalField::from_physical(g, c);
  const SpectralField dshape = shape.derivative(Axis::x).lift();
  auto forcing = [&](double t) {
    CpeTendency f = CpeTendency::zero(g);
    f.sigma_p = -std::exp(-t) * shape;
    f.v1 = std::exp(-t) * dshape;
    return f;
  };
  CpeState s = CpeState::zero(g);
  s.sigma_p = shape;
  StepperConfig cfg;
  cfg.dt = dt;
  CpeIntegrator it(cfg, forcing);
  const long n = std::lround(1.0 / dt);
  for (long i = 0; i < n; ++i) it.advance(s);
  HorizontalField err = s.sigma_p;
  err.axpy(-std::exp(-1.0), shape);
  return l2_norm(err.lift()) + l2_norm(s.vp1) + l2_norm(s.vp2);
}

/// Runs `steps` steps straight and again with a checkpoint write/read
/// after `split` steps; returns the largest coefficient difference.
inline double restart_difference(const Grid& g, double eps, double dt, int steps, int split,
                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto cur = dir / "restart_current.hlim", prev = dir / "restart_previous.hlim";
  StepperConfig cfg;
  cfg.dt = dt;
  CfState a = make_well_prepared_ic(default_cpe_initial(g), eps, 1.0);
  CfIntegrator it(g, eps, cfg);
  for (int i = 0; i < steps; ++i) {
    if (i + 1 == split) checkpoint_write(a, prev);
    it.advance(a);
    if (i + 1 == split) checkpoint_write(a, cur);
  }
  CfState b = checkpoint_read(cur);
  CfIntegrator it2(g, eps, cfg);
  it2.prime(checkpoint_read(prev));
  for (int i = split; i < steps; ++i) it2.advance(b);
  double m = 0.0;
  const std::array<std::pair<const SpectralField*, const SpectralField*>, 4> pairs{
      {{&a.sigma, &b.sigma}, {&a.v1, &b.v1}, {&a.v2, &b.v2}, {&a.w, &b.w}}};
  for (const auto& [x, y] : pairs)
    for (std::size_t i = 0; i < x->coeffs().size(); ++i) m = std::max(m, std::abs(x->coeffs()[i] - y->coeffs()[i]));
  return m;
}

}  // namespace hydrolim::verify
