#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hydrolim/equations.hpp"
#include "hydrolim/state.hpp"
#include "hydrolim/stepper_config.hpp"

namespace hydrolim {

using Mode = std::array<int, 3>;
using Matrix4 = std::array<std::array<complex, 4>, 4>;

/// Linear part of the epsilon-scaled system at one Fourier mode, acting on
/// (sigma, v1, v2, w):
///   d_t s  = -i pi (k1 v1 + k2 v2 + k3 w)
///   d_t vj = -i pi kj s - pi^2 |k|^2 vj
///   d_t w  = -(i pi k3 / eps^2) s - pi^2 |k|^2 w
struct ModeMatrix {
  Mode k{};
  double eps = 0.1;
  double dt = 0.0;
  Matrix4 a{};

  static ModeMatrix assemble(Mode k, double eps, double dt = 0.0) {
    ModeMatrix m{k, eps, dt, {}};
    const double kx = Grid::wavenumber(k[0]), ky = Grid::wavenumber(k[1]), kz = Grid::wavenumber(k[2]);
    const double k2 = kx * kx + ky * ky + kz * kz;
    const complex I(0.0, 1.0);
    m.a[0] = {0.0, -I * kx, -I * ky, -I * kz};
    m.a[1] = {-I * kx, -k2, 0.0, 0.0};
    m.a[2] = {-I * ky, 0.0, -k2, 0.0};
    m.a[3] = {-I * kz / (eps * eps), 0.0, 0.0, -k2};
    return m;
  }

  std::array<complex, 4> apply(const std::array<complex, 4>& x) const {
    std::array<complex, 4> y{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) y[i] += a[i][j] * x[j];
    return y;
  }
};

/// Per-mode solve of (I - alpha A) x = r by elimination: the velocity rows
/// are diagonal in (v1, v2, w), which leaves a scalar equation for sigma.
/// (kx, ky, kz) enter the first-derivative couplings and k2 the viscosity;
/// they differ on Nyquist planes, where first derivatives vanish.
inline std::array<complex, 4> solve_mode(double kx, double ky, double kz, double k2, double inv_eps2, double alpha,
                                         const std::array<complex, 4>& r) {
  const complex I(0.0, 1.0);
  const double d = 1.0 + alpha * k2;
  const double den = 1.0 + alpha * alpha * (kx * kx + ky * ky + kz * kz * inv_eps2) / d;
  const complex s = (r[0] - I * (alpha / d) * (kx * r[1] + ky * r[2] + kz * r[3])) / den;
  return {s, (r[1] - I * alpha * kx * s) / d, (r[2] - I * alpha * ky * s) / d,
          (r[3] - I * alpha * kz * inv_eps2 * s) / d};
}

/// Quadratic transport terms, moved to the right-hand side:
///   -(v . grad_h f + w d_z f) for f = sigma, v1, v2, w.
inline CfFields nonlinear_rhs(const CfState& state, bool apply_dealias = true) {
  const Transport u(state.v1, state.v2, state.w);
  CfFields n{-advect(u, state.sigma, apply_dealias), -advect(u, state.v1, apply_dealias),
             -advect(u, state.v2, apply_dealias), -advect(u, state.w, apply_dealias)};
  n.sigma.set_parity(Parity::even);
  n.v1.set_parity(Parity::even);
  n.v2.set_parity(Parity::even);
  n.w.set_parity(Parity::odd);
  return n;
}

/// IMEX integrator for the epsilon-scaled system. Every linear term
/// (pressure gradients, the eps^-2 acoustic coupling, viscosity) is
/// implicit, so the admissible step does not shrink with epsilon.
class CfStepper {
 public:
  CfStepper(const Grid& grid, double epsilon, StepperConfig cfg) : grid_(grid), eps_(epsilon), cfg_(cfg) {
    cfg_.validate();
    if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
    wavenumbers_.reserve(grid.spectral_size());
    SpectralField(grid).for_each_mode([&](std::size_t, int kx, int ky, int kz) {
      const bool nyq_z = 2 * std::abs(kz) == grid.nz();
      const bool nyq_y = 2 * std::abs(ky) == grid.ny();
      const bool nyq_x = 2 * kx == grid.nx();
      // First derivatives vanish on Nyquist planes; mirror that in the coupling.
      wavenumbers_.push_back({nyq_x ? 0.0 : Grid::wavenumber(kx), nyq_y ? 0.0 : Grid::wavenumber(ky),
                              nyq_z ? 0.0 : Grid::wavenumber(kz),
                              Grid::wavenumber(kx) * Grid::wavenumber(kx) +
                                  Grid::wavenumber(ky) * Grid::wavenumber(ky) +
                                  Grid::wavenumber(kz) * Grid::wavenumber(kz)});
    });
  }

  const StepperConfig& config() const noexcept { return cfg_; }
  double epsilon() const noexcept { return eps_; }

  CfFields explicit_terms(const CfState& state) const {
    return cfg_.nonlinear ? nonlinear_rhs(state, cfg_.dealias) : CfFields::zero(state.grid());
  }

  /// Advances by dt. `prev` is the explicit tendency from the previous
  /// step (cnab2 needs it after the first step); the current tendency is
  /// stored in `current` when given. A cnab2 step without history is a
  /// Crank-Nicolson / Heun predictor-corrector step, so the scheme stays
  /// second order from the start.
  CfState step(const CfState& state, const CfFields* prev = nullptr, CfFields* current = nullptr) const {
    if (!(state.grid() == grid_)) throw InvalidInput("state grid does not match stepper");
    CfFields now = explicit_terms(state);
    CfState next = state;
    if (cfg_.scheme == Scheme::imex_euler) {
      next = solve(state, false, {{1.0, &now}});
    } else if (prev) {
      next = solve(state, true, {{1.5, &now}, {-0.5, prev}});
    } else {
      const CfState guess = solve(state, true, {{1.0, &now}});
      const CfFields later = explicit_terms(guess);
      next = solve(state, true, {{0.5, &now}, {0.5, &later}});
    }
    if (current) *current = std::move(now);
    return next;
  }

 private:
  using Weighted = std::vector<std::pair<double, const CfFields*>>;

  /// x_new = (I - alpha A)^-1 [(I + beta A) x + dt sum_i c_i N_i], with
  /// alpha = beta = dt/2 (crank_nicolson) or alpha = dt, beta = 0.
  CfState solve(const CfState& state, bool crank_nicolson, const Weighted& tendencies) const {
    const double dt = cfg_.dt;
    const double inv_eps2 = 1.0 / (eps_ * eps_);
    const double alpha = crank_nicolson ? 0.5 * dt : dt;
    const double beta = crank_nicolson ? 0.5 * dt : 0.0;

    CfState next = CfState::zero(grid_, state.epsilon);
    next.time = state.time + dt;
    const complex I(0.0, 1.0);
    const std::array<const SpectralField*, 4> u{&state.sigma, &state.v1, &state.v2, &state.w};
    const std::array<SpectralField*, 4> out{&next.sigma, &next.v1, &next.v2, &next.w};
    std::vector<std::pair<double, std::array<const SpectralField*, 4>>> n;
    for (const auto& [c, f] : tendencies) n.push_back({dt * c, {&f->sigma, &f->v1, &f->v2, &f->w}});

    for (std::size_t s = 0; s < wavenumbers_.size(); ++s) {
      const auto& [kx, ky, kz, k2] = wavenumbers_[s];
      std::array<complex, 4> x{};
      for (int c = 0; c < 4; ++c) x[c] = u[c]->coeffs()[s];
      std::array<complex, 4> r = x;
      if (beta != 0.0) {
        const std::array<complex, 4> ax{-I * (kx * x[1] + ky * x[2] + kz * x[3]), -I * kx * x[0] - k2 * x[1],
                                        -I * ky * x[0] - k2 * x[2], -I * kz * inv_eps2 * x[0] - k2 * x[3]};
        for (int c = 0; c < 4; ++c) r[c] += beta * ax[c];
      }
      for (const auto& [w, f] : n)
        for (int c = 0; c < 4; ++c) r[c] += w * f[c]->coeffs()[s];
      const auto y = solve_mode(kx, ky, kz, k2, inv_eps2, alpha, r);
      for (int c = 0; c < 4; ++c) out[c]->coeffs()[s] = y[c];
    }

    static constexpr std::array<const char*, 4> names{"sigma", "v1", "v2", "w"};
    for (int c = 0; c < 4; ++c) {
      if (!out[c]->all_finite()) throw DivergenceError(next.time, names[c]);
    }
    return next;
  }

  struct Wavenumber {
    double kx, ky, kz, k2;
  };

  Grid grid_;
  double eps_;
  StepperConfig cfg_;
  std::vector<Wavenumber> wavenumbers_;
};

/// Stateful driver carrying the multistep history.
class CfIntegrator {
 public:
  CfIntegrator(const Grid& grid, double epsilon, StepperConfig cfg) : stepper_(grid, epsilon, cfg) {}

  void advance(CfState& state) {
    CfFields current = CfFields::zero(state.grid());
    state = stepper_.step(state, prev_ ? &*prev_ : nullptr, &current);
    prev_ = std::move(current);
  }

  /// Restores the multistep history from the state one step back.
  void prime(const CfState& previous) { prev_ = stepper_.explicit_terms(previous); }
  void reset() { prev_.reset(); }
  bool primed() const noexcept { return prev_.has_value(); }
  const CfStepper& stepper() const noexcept { return stepper_; }

 private:
  CfStepper stepper_;
  std::optional<CfFields> prev_;
};

/// One step. For cnab2 without `prev_nonlinear` the step starts the scheme.
inline CfState step(const CfState& state, const StepperConfig& cfg, const CfFields* prev_nonlinear = nullptr) {
  return CfStepper(state.grid(), state.epsilon, cfg).step(state, prev_nonlinear);
}

/// Result of rebuilding w from the continuity equation.
struct WReconstruction {
  SpectralField w;
  /// L2 norm (over the horizontal torus) of the vertical mean of e^sigma Xi;
  /// nonzero means w(., 1) != 0 and the inputs are inconsistent.
  double defect = 0.0;
  bool consistent = true;
};

/// w = -e^{-sigma} int_0^z e^{sigma} Xi dz',  Xi = d_t sigma + v . grad_h sigma + div_h v,
/// on z in [0, 1] and extended oddly. A nonzero vertical mean of e^sigma Xi
/// cannot be represented by an odd periodic field; it is dropped and
/// reported as the defect.
inline WReconstruction reconstruct_w(const SpectralField& sigma, const SpectralField& sigma_t,
                                     const SpectralField& v1, const SpectralField& v2, double tolerance = 1e-6) {
  PhysicalField xi = to_physical(sigma_t);
  xi += to_physical(v1) * to_physical(derivative(sigma, Axis::x));
  xi += to_physical(v2) * to_physical(derivative(sigma, Axis::y));
  xi += to_physical(div_h(v1, v2));
  PhysicalField e = to_physical(sigma);
  e.apply([](double s) { return std::exp(s); });
  SpectralField integrand = finish_product(e * xi, Parity::even);
  const SpectralField mean = kz0_part(integrand);
  const double defect = l2_norm(mean) / std::sqrt(Grid::period);
  integrand -= mean;
  integrand.set_parity(Parity::even);
  PhysicalField prim = to_physical(vertical_integral(integrand).periodic);
  e.apply([](double s) { return 1.0 / s; });
  prim *= e;
  SpectralField w = finish_product(-1.0 * prim, Parity::odd);
  return {std::move(w), defect, defect <= tolerance};
}

/// First and second time derivatives from the equations (no finite differencing).
inline TimeDerivatives time_derivatives(const CfState& s, bool apply_dealias = true) {
  CfFields d = cf_first_derivatives(s.sigma, s.v1, s.v2, s.w, s.epsilon, apply_dealias);
  CfFields dd = cf_second_derivatives(s.sigma, s.v1, s.v2, s.w, d, s.epsilon, apply_dealias);
  return {std::move(d.sigma), std::move(d.v1),   std::move(d.v2),  std::move(d.w),
          std::move(dd.sigma), std::move(dd.v1), std::move(dd.v2), std::move(dd.w)};
}

struct MixedWaveResidual {
  double absolute = 0.0;  // L2 norm of LHS - RHS
  double scale = 0.0;     // sum of the L2 norms of every assembled term
  double relative() const noexcept { return scale > 0.0 ? absolute / scale : 0.0; }
};

/// Checks the strongly damped wave form of the density equation,
///   d_t(s_t - lap s) + (v.grad_h + w d_z)(s_t - lap s) - lap_h s - s_zz / eps^2
///     = -J1 - J2 + J3 + J4,
///   J1 = v_t . grad_h s - lap v . grad_h s - 2 grad v : grad_h grad s,
///   J2 = w_t s_z - lap w s_z - 2 grad w . d_z grad s,
///   J3 = div_h(v . grad_h v + w v_z),   J4 = d_z(v . grad_h w + w w_z),
/// with every time derivative taken from the equations. The terms are at
/// most cubic, so they are formed on a grid refined by two in each
/// direction without truncation; for any dealiased state the identity
/// then holds to round-off.
inline MixedWaveResidual mixed_wave_residual(const CfState& coarse) {
  const Grid& gc = coarse.grid();
  const Grid g(2 * gc.nx(), 2 * gc.ny(), 2 * gc.nz());
  CfState s{prolong(coarse.sigma, g), prolong(coarse.v1, g), prolong(coarse.v2, g), prolong(coarse.w, g),
            coarse.epsilon, coarse.time};
  const bool raw = false;
  const TimeDerivatives td = time_derivatives(s, raw);
  const double inv_eps2 = 1.0 / (s.epsilon * s.epsilon);
  const Transport u(s.v1, s.v2, s.w);

  auto P = [](const SpectralField& f) { return to_physical(f); };
  auto d = [](const SpectralField& f, Axis a) { return derivative(f, a); };
  const std::array<Axis, 3> axes{Axis::x, Axis::y, Axis::z};

  std::vector<SpectralField> lhs_terms{td.sigma_tt, -laplacian(td.sigma_t),
                                       advect(u, td.sigma_t - laplacian(s.sigma), raw), -laplacian_h(s.sigma),
                                       -inv_eps2 * derivative(s.sigma, Axis::z, 2)};

  const PhysicalField sx = P(d(s.sigma, Axis::x)), sy = P(d(s.sigma, Axis::y)), sz = P(d(s.sigma, Axis::z));
  // J1
  PhysicalField j1a = P(td.v1_t) * sx + P(td.v2_t) * sy;
  PhysicalField j1b = P(laplacian(s.v1)) * sx + P(laplacian(s.v2)) * sy;
  PhysicalField j1c(g);
  for (Axis j : axes) {
    j1c += P(d(s.v1, j)) * P(d(d(s.sigma, Axis::x), j));
    j1c += P(d(s.v2, j)) * P(d(d(s.sigma, Axis::y), j));
  }
  // J2
  PhysicalField j2a = P(td.w_t) * sz;
  PhysicalField j2b = P(laplacian(s.w)) * sz;
  PhysicalField j2c(g);
  for (Axis j : axes) j2c += P(d(s.w, j)) * P(d(d(s.sigma, Axis::z), j));

  std::vector<SpectralField> rhs_terms{
      -1.0 * finish_product(j1a, Parity::even, raw),
      finish_product(j1b, Parity::even, raw),
      2.0 * finish_product(j1c, Parity::even, raw),
      -1.0 * finish_product(j2a, Parity::even, raw),
      finish_product(j2b, Parity::even, raw),
      2.0 * finish_product(j2c, Parity::even, raw),
      div_h(advect(u, s.v1, raw), advect(u, s.v2, raw)),
      derivative(advect(u, s.w, raw), Axis::z),
  };

  SpectralField residual(g, Parity::even);
  MixedWaveResidual out;
  for (const auto& t : lhs_terms) {
    residual += t;
    out.scale += l2_norm(t);
  }
  for (const auto& t : rhs_terms) {
    residual -= t;
    out.scale += l2_norm(t);
  }
  out.absolute = l2_norm(residual);
  return out;
}

}  // namespace hydrolim
