#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "hydrolim/cf_solver.hpp"
#include "hydrolim/state.hpp"

namespace hydrolim {

/// A functional evaluated as a sum of named norm terms. A comma list
/// ||a, b||_X is read as ||a||_X + ||b||_X; a horizontal vector inside one
/// slot contributes the Euclidean combination of its component norms.
struct Functional {
  std::vector<std::pair<std::string, double>> terms;

  double total() const noexcept {
    double s = 0.0;
    for (const auto& [name, v] : terms) s += v;
    return s;
  }
  double term(const std::string& name) const {
    for (const auto& [n, v] : terms)
      if (n == name) return v;
    throw InvalidInput("no functional term named " + name);
  }
  void add(std::string name, double value) { terms.emplace_back(std::move(name), value); }
};

namespace detail {

inline double vec_norm(const SpectralField& a, const SpectralField& b, int s) {
  return std::hypot(hs_norm(a, s), hs_norm(b, s));
}

inline SpectralField grad_x(const SpectralField& f) { return derivative(f, Axis::x); }
inline SpectralField grad_y(const SpectralField& f) { return derivative(f, Axis::y); }
inline SpectralField dz(const SpectralField& f) { return derivative(f, Axis::z); }

/// Terms shared by E/D (index shift `s`).
inline void energy_terms(Functional& f, const CfState& st, const TimeDerivatives& td, int s) {
  const double eps = st.epsilon;
  f.add("v", vec_norm(st.v1, st.v2, s + 1));
  f.add("eps_w", eps * hs_norm(st.w, s + 1));
  f.add("sigma_t", hs_norm(td.sigma_t, s));
  f.add("grad_h_sigma", vec_norm(grad_x(st.sigma), grad_y(st.sigma), s));
  f.add("dz_sigma_over_eps", hs_norm(dz(st.sigma), s) / eps);
  f.add("w", hs_norm(st.w, s));
  f.add("dz_w", hs_norm(dz(st.w), s));
}

}  // namespace detail

/// E = ||v, eps w||_H3 + ||d_t s, grad_h s, d_z s / eps||_H2 + ||s||_H4 + ||w, d_z w||_H2
inline Functional functional_E(const CfState& st, const TimeDerivatives& td) {
  Functional f;
  detail::energy_terms(f, st, td, 2);
  f.add("sigma", hs_norm(st.sigma, 4));
  return f;
}

/// D = ||d_t v, d_t(eps w)||_H2 + ||v, eps w||_H4 + ||d_t s, grad_h s, d_z s / eps||_H3 + ||w, d_z w||_H3
inline Functional functional_D(const CfState& st, const TimeDerivatives& td) {
  Functional f;
  f.add("v_t", detail::vec_norm(td.v1_t, td.v2_t, 2));
  f.add("eps_w_t", st.epsilon * hs_norm(td.w_t, 2));
  detail::energy_terms(f, st, td, 3);
  return f;
}

/// E1 = ||d_t v, d_t(eps w)||_H1 + ||d_tt s, d_t grad_h s, d_z d_t s / eps||_L2
///      + ||d_t s||_H2 + ||d_t w, d_z d_t w||_L2
inline Functional functional_E1(const CfState& st, const TimeDerivatives& td) {
  using namespace detail;
  const double eps = st.epsilon;
  Functional f;
  f.add("v_t", vec_norm(td.v1_t, td.v2_t, 1));
  f.add("eps_w_t", eps * hs_norm(td.w_t, 1));
  f.add("sigma_tt", hs_norm(td.sigma_tt, 0));
  f.add("grad_h_sigma_t", vec_norm(grad_x(td.sigma_t), grad_y(td.sigma_t), 0));
  f.add("dz_sigma_t_over_eps", hs_norm(dz(td.sigma_t), 0) / eps);
  f.add("sigma_t", hs_norm(td.sigma_t, 2));
  f.add("w_t", hs_norm(td.w_t, 0));
  f.add("dz_w_t", hs_norm(dz(td.w_t), 0));
  return f;
}

/// D1 = ||d_tt v, d_tt(eps w)||_L2 + ||d_t v, d_t(eps w)||_H2
///      + ||d_tt s, d_t grad_h s, d_z d_t s / eps||_H1 + ||d_t w, d_z d_t w||_H1
inline Functional functional_D1(const CfState& st, const TimeDerivatives& td) {
  using namespace detail;
  const double eps = st.epsilon;
  Functional f;
  f.add("v_tt", vec_norm(td.v1_tt, td.v2_tt, 0));
  f.add("eps_w_tt", eps * hs_norm(td.w_tt, 0));
  f.add("v_t", vec_norm(td.v1_t, td.v2_t, 2));
  f.add("eps_w_t", eps * hs_norm(td.w_t, 2));
  f.add("sigma_tt", hs_norm(td.sigma_tt, 1));
  f.add("grad_h_sigma_t", vec_norm(grad_x(td.sigma_t), grad_y(td.sigma_t), 1));
  f.add("dz_sigma_t_over_eps", hs_norm(dz(td.sigma_t), 1) / eps);
  f.add("w_t", hs_norm(td.w_t, 1));
  f.add("dz_w_t", hs_norm(dz(td.w_t), 1));
  return f;
}

/// Differences between a CF state and a hydrostatic state at one time.
struct DeltaNorms {
  double delta_sigma_l2 = 0.0;
  double delta_v_l2 = 0.0;
  double delta_v_h1 = 0.0;
  double delta_w_l2 = 0.0;
  double dz_sigma_h2 = 0.0;     // ||d_z sigma_eps||_H2 = ||d_z delta sigma||_H2
  double dz_dt_sigma_l2 = 0.0;  // ||d_z d_t sigma_eps||_L2
  double avg_delta_sigma_l2 = 0.0;
  double fluct_delta_sigma_l2 = 0.0;
};

/// delta = cf - cpe. `sigma_t` is d_t sigma of the CF state; when omitted it
/// is recomputed from the equations. Times must agree to within `time_tol`.
inline DeltaNorms delta_norms(const CfState& cf, const CpeState& cpe, double time_tol,
                              const SpectralField* sigma_t = nullptr) {
  if (!(cf.grid() == cpe.grid())) throw InvalidInput("delta_norms: grids differ");
  if (std::abs(cf.time - cpe.time) > time_tol) {
    throw InvalidInput("delta_norms: comparing states at t = " + std::to_string(cf.time) + " and t = " +
                       std::to_string(cpe.time));
  }
  DeltaNorms d;
  SpectralField ds = cf.sigma - cpe.sigma_p.lift();
  ds.set_parity(Parity::even);
  const SpectralField dv1 = cf.v1 - cpe.vp1;
  const SpectralField dv2 = cf.v2 - cpe.vp2;
  const SpectralField dw = cf.w - cpe.wp;
  d.delta_sigma_l2 = l2_norm(ds);
  d.delta_v_l2 = detail::vec_norm(dv1, dv2, 0);
  d.delta_v_h1 = detail::vec_norm(dv1, dv2, 1);
  d.delta_w_l2 = l2_norm(dw);
  d.dz_sigma_h2 = hs_norm(derivative(cf.sigma, Axis::z), 2);
  if (sigma_t) {
    d.dz_dt_sigma_l2 = l2_norm(derivative(*sigma_t, Axis::z));
  } else {
    const CfFields first = cf_first_derivatives(cf.sigma, cf.v1, cf.v2, cf.w, cf.epsilon);
    d.dz_dt_sigma_l2 = l2_norm(derivative(first.sigma, Axis::z));
  }
  d.avg_delta_sigma_l2 = l2_norm(vertical_average(ds));
  d.fluct_delta_sigma_l2 = l2_norm(vertical_fluctuation(ds));
  return d;
}

/// One row of the per-time-step diagnostics series.
struct DiagnosticsRecord {
  double time = 0.0;
  double E = 0.0, D = 0.0, E1 = 0.0, D1 = 0.0;
  DeltaNorms delta;
};

inline DiagnosticsRecord make_record(const CfState& cf, const CpeState& cpe, double time_tol) {
  const TimeDerivatives td = time_derivatives(cf);
  DiagnosticsRecord r;
  r.time = cf.time;
  r.E = functional_E(cf, td).total();
  r.D = functional_D(cf, td).total();
  r.E1 = functional_E1(cf, td).total();
  r.D1 = functional_D1(cf, td).total();
  r.delta = delta_norms(cf, cpe, time_tol, &td.sigma_t);
  return r;
}

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  std::size_t used = 0;
  std::vector<std::size_t> excluded;  // indices dropped because err == 0
};

/// Least-squares line through (log eps, log err).
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  RateFit fit;
  std::vector<std::pair<double, double>> logs;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [eps, err] = points[i];
    if (!(eps > 0.0) || !(err >= 0.0) || !std::isfinite(err)) {
      throw InvalidInput("fit_rate: eps must be positive and err nonnegative and finite");
    }
    if (err == 0.0) {
      fit.excluded.push_back(i);
      continue;
    }
    logs.emplace_back(std::log(eps), std::log(err));
  }
  for (std::size_t i = 0; i < logs.size(); ++i)
    for (std::size_t j = i + 1; j < logs.size(); ++j)
      if (logs[i].first == logs[j].first) throw InvalidInput("fit_rate: eps values must be distinct");
  if (logs.size() < 3) throw InvalidInput("fit_rate: need at least 3 points with nonzero error");
  const double n = double(logs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : logs) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [x, y] : logs) {
    fit.max_residual = std::max(fit.max_residual, std::abs(y - (fit.intercept + fit.slope * x)));
  }
  fit.used = logs.size();
  return fit;
}

}  // namespace hydrolim
