#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hydrolim/equations.hpp"
#include "hydrolim/state.hpp"
#include "hydrolim/stepper_config.hpp"

namespace hydrolim {

/// Vertical velocity of the hydrostatic system,
///   wp(., z) = -e^{-sp} int_0^z e^{sp} (vt . grad_h sp + div_h vt) dz',
/// with vt the vertical fluctuation of vp. Since sp does not depend on z
/// the exponential weights cancel. The integrand has no kz = 0 mode, so
/// the primitive is periodic and odd, and vanishes at z = 0 and z = 1.
inline SpectralField reconstruct_wp(const CpeState& state, bool apply_dealias = true) {
  const SpectralField sp = state.sigma_p.lift();
  const SpectralField f1 = vertical_fluctuation(state.vp1);
  const SpectralField f2 = vertical_fluctuation(state.vp2);
  PhysicalField q = to_physical(f1) * to_physical(derivative(sp, Axis::x));
  q += to_physical(f2) * to_physical(derivative(sp, Axis::y));
  SpectralField integrand = finish_product(q, Parity::even, apply_dealias) + div_h(f1, f2);
  integrand.set_parity(Parity::even);
  integrand -= kz0_part(integrand);
  integrand.set_parity(Parity::even);
  SpectralField wp = -vertical_integral(integrand).periodic;
  wp.set_parity(Parity::odd);
  return project_parity(wp, Parity::odd);
}

/// Explicit tendencies of the hydrostatic system.
struct CpeTendency {
  HorizontalField sigma_p;
  SpectralField v1;
  SpectralField v2;

  static CpeTendency zero(const Grid& grid) {
    return {HorizontalField(grid), SpectralField(grid, Parity::even), SpectralField(grid, Parity::even)};
  }
};

/// Barotropic density equation and the explicit part of the momentum equation:
///   d_t sp = -(vbar . grad_h sp + div_h vbar)
///   d_t vp = -(vp . grad_h vp + wp d_z vp) - grad_h sp      (+ lap vp, implicit)
/// wp is taken from the state and must be current.
inline CpeTendency cpe_rhs(const CpeState& state, bool apply_dealias = true) {
  const Grid& g = state.grid();
  const HorizontalField vbar1 = HorizontalField::from_kz0(state.vp1);
  const HorizontalField vbar2 = HorizontalField::from_kz0(state.vp2);
  const HorizontalField sx = state.sigma_p.derivative(Axis::x);
  const HorizontalField sy = state.sigma_p.derivative(Axis::y);

  std::vector<double> a = vbar1.to_physical();
  const std::vector<double> b = sx.to_physical();
  const std::vector<double> c = vbar2.to_physical();
  const std::vector<double> d = sy.to_physical();
  for (std::size_t n = 0; n < a.size(); ++n) a[n] = a[n] * b[n] + c[n] * d[n];
  HorizontalField adv = HorizontalField::from_physical(g, a);
  if (apply_dealias) adv = adv.dealias();

  HorizontalField ds = -1.0 * adv;
  ds.axpy(-1.0, vbar1.derivative(Axis::x));
  ds.axpy(-1.0, vbar2.derivative(Axis::y));

  CpeTendency out{std::move(ds), SpectralField(g, Parity::even), SpectralField(g, Parity::even)};
  const SpectralField grad_x = sx.lift();
  const SpectralField grad_y = sy.lift();
  const Transport u(state.vp1, state.vp2, state.wp);
  out.v1 = -advect(u, state.vp1, apply_dealias) - grad_x;
  out.v2 = -advect(u, state.vp2, apply_dealias) - grad_y;
  out.v1.set_parity(Parity::even);
  out.v2.set_parity(Parity::even);
  return out;
}

/// Optional body forcing f(t) added to the explicit tendencies; used for
/// manufactured solutions.
using CpeForcing = std::function<CpeTendency(double time)>;

/// One-step integrator for the hydrostatic system: sp explicitly, vp with
/// implicit viscosity, wp rebuilt after every update.
class CpeStepper {
 public:
  explicit CpeStepper(StepperConfig cfg, CpeForcing forcing = {}) : cfg_(cfg), forcing_(std::move(forcing)) {
    cfg_.validate();
  }

  const StepperConfig& config() const noexcept { return cfg_; }

  CpeTendency explicit_terms(const CpeState& state) const {
    CpeTendency t = cfg_.nonlinear ? cpe_rhs(state, cfg_.dealias) : linear_terms(state);
    if (forcing_) {
      const CpeTendency f = forcing_(state.time);
      t.sigma_p += f.sigma_p;
      t.v1 += f.v1;
      t.v2 += f.v2;
    }
    return t;
  }

  /// Advances by dt. `prev` is the explicit tendency of the previous step
  /// (cnab2 after the first step); the current one is written to
  /// `current` when given. Without history cnab2 takes a predictor-corrector
  /// step, as the CF stepper does.
  CpeState step(const CpeState& state, const CpeTendency* prev = nullptr, CpeTendency* current = nullptr) const {
    CpeTendency now = explicit_terms(state);
    CpeState next = state;
    if (cfg_.scheme == Scheme::imex_euler) {
      next = solve(state, false, {{1.0, &now}});
    } else if (prev) {
      next = solve(state, true, {{1.5, &now}, {-0.5, prev}});
    } else {
      const CpeState guess = solve(state, true, {{1.0, &now}});
      const CpeTendency later = explicit_terms(guess);
      next = solve(state, true, {{0.5, &now}, {0.5, &later}});
    }
    if (current) *current = std::move(now);
    return next;
  }

 private:
  using Weighted = std::vector<std::pair<double, const CpeTendency*>>;

  /// sp explicitly from the weighted tendencies; vp with the viscosity
  /// treated by Crank-Nicolson or backward Euler; wp rebuilt at the end.
  CpeState solve(const CpeState& state, bool crank_nicolson, const Weighted& tendencies) const {
    const double dt = cfg_.dt;
    const double theta = crank_nicolson ? 0.5 : 1.0;
    CpeState next = state;
    next.time = state.time + dt;
    for (const auto& [c, t] : tendencies) next.sigma_p.axpy(dt * c, t->sigma_p);

    auto update = [&](const SpectralField& v, auto member) {
      SpectralField out(v.grid(), Parity::even);
      auto src = v.coeffs();
      auto dst = out.coeffs();
      v.for_each_mode([&](std::size_t s, int kx, int ky, int kz) {
        const double k2 = Grid::wavenumber(kx) * Grid::wavenumber(kx) + Grid::wavenumber(ky) * Grid::wavenumber(ky) +
                          Grid::wavenumber(kz) * Grid::wavenumber(kz);
        complex rhs = (1.0 - (1.0 - theta) * dt * k2) * src[s];
        for (const auto& [c, t] : tendencies) rhs += dt * c * (t->*member).coeffs()[s];
        dst[s] = rhs / (1.0 + theta * dt * k2);
      });
      return out;
    };
    next.vp1 = update(state.vp1, &CpeTendency::v1);
    next.vp2 = update(state.vp2, &CpeTendency::v2);

    if (!next.sigma_p.all_finite()) throw DivergenceError(next.time, "sigma_p");
    if (!next.vp1.all_finite()) throw DivergenceError(next.time, "vp1");
    if (!next.vp2.all_finite()) throw DivergenceError(next.time, "vp2");
    next.wp = reconstruct_wp(next, cfg_.dealias);
    return next;
  }

  static CpeTendency linear_terms(const CpeState& state) {
    CpeTendency t = CpeTendency::zero(state.grid());
    const HorizontalField vbar1 = HorizontalField::from_kz0(state.vp1);
    const HorizontalField vbar2 = HorizontalField::from_kz0(state.vp2);
    t.sigma_p.axpy(-1.0, vbar1.derivative(Axis::x));
    t.sigma_p.axpy(-1.0, vbar2.derivative(Axis::y));
    t.v1 = -state.sigma_p.derivative(Axis::x).lift();
    t.v2 = -state.sigma_p.derivative(Axis::y).lift();
    return t;
  }

  StepperConfig cfg_;
  CpeForcing forcing_;
};

/// Stateful driver that carries the previous explicit tendency between steps.
class CpeIntegrator {
 public:
  explicit CpeIntegrator(StepperConfig cfg, CpeForcing forcing = {}) : stepper_(cfg, std::move(forcing)) {}

  void advance(CpeState& state) {
    CpeTendency current = CpeTendency::zero(state.grid());
    state = stepper_.step(state, prev_ ? &*prev_ : nullptr, &current);
    prev_ = std::move(current);
  }

  /// Restores the multistep history from the state one step back.
  void prime(const CpeState& previous) { prev_ = stepper_.explicit_terms(previous); }
  void reset() { prev_.reset(); }
  const CpeStepper& stepper() const noexcept { return stepper_; }

 private:
  CpeStepper stepper_;
  std::optional<CpeTendency> prev_;
};

/// Single step from a cold start.
inline CpeState step_cpe(const CpeState& state, const StepperConfig& cfg) { return CpeStepper(cfg).step(state); }

}  // namespace hydrolim
