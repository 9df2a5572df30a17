#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "hydrolim/error.hpp"

namespace hydrolim::oracle {

using cd = std::complex<double>;
using Amplitudes = Eigen::Vector4cd;  // (eta, psi_h1, psi_h2, psi_z)

/// The linear model at one Fourier mode:
///   d_t eta  = -i pi k . psi
///   d_t psih = -i pi k_h eta - pi^2 |k|^2 psih
///   d_t psiz = -(i pi k3 / eps^2) eta - pi^2 |k|^2 psiz
struct LinearModeSystem {
  std::array<int, 3> k{};
  double eps = 0.1;
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();

  LinearModeSystem(std::array<int, 3> mode, double epsilon) : k(mode), eps(epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
    const double pi = std::numbers::pi;
    const double k1 = pi * k[0], k2 = pi * k[1], k3 = pi * k[2];
    const double kk = k1 * k1 + k2 * k2 + k3 * k3;
    const cd I(0.0, 1.0);
    m << 0.0, -I * k1, -I * k2, -I * k3,  //
        -I * k1, -kk, 0.0, 0.0,           //
        -I * k2, 0.0, -kk, 0.0,           //
        -I * k3 / (eps * eps), 0.0, 0.0, -kk;
  }

  bool is_vertical() const noexcept { return k[0] == 0 && k[1] == 0 && k[2] != 0; }

  /// The (eta, psi_z) block, the whole acoustic dynamics of a vertical mode.
  Eigen::Matrix2cd vertical_block() const {
    Eigen::Matrix2cd b;
    b << m(0, 0), m(0, 3), m(3, 0), m(3, 3);
    return b;
  }

  /// Largest ||m x - lambda x|| / ||x|| over the given pairs.
  template <class Mat, class Vec, class Vecs>
  static double eigen_residual(const Mat& a, const Vec& values, const Vecs& vectors) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      const auto x = vectors.col(j);
      r = std::max(r, (a * x - values(j) * x).norm() / x.norm());
    }
    return r;
  }
};

struct ModeEigen {
  std::vector<cd> values;
  Eigen::MatrixXcd vectors;
  bool reduced = false;  // true when the 2x2 (eta, psi_z) block was decomposed
  double residual = 0.0;
};

/// Eigen-decomposition of the mode system. A purely vertical mode (0,0,m)
/// is reduced to its acoustic block, whose characteristic polynomial is
/// lambda^2 + pi^2 m^2 lambda + pi^2 m^2 / eps^2.
inline ModeEigen mode_eigen(std::array<int, 3> k, double eps) {
  const LinearModeSystem sys(k, eps);
  ModeEigen out;
  if (sys.is_vertical()) {
    const Eigen::Matrix2cd b = sys.vertical_block();
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(b);
    out.reduced = true;
    out.vectors = es.eigenvectors();
    out.values = {es.eigenvalues()(0), es.eigenvalues()(1)};
    out.residual = LinearModeSystem::eigen_residual(b, es.eigenvalues(), es.eigenvectors());
  } else {
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(sys.m);
    out.vectors = es.eigenvectors();
    for (int j = 0; j < 4; ++j) out.values.push_back(es.eigenvalues()(j));
    out.residual = LinearModeSystem::eigen_residual(sys.m, es.eigenvalues(), es.eigenvectors());
  }
  std::sort(out.values.begin(), out.values.end(),
            [](cd a, cd b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return out;
}

/// Closed-form roots of the vertical acoustic block.
inline std::array<cd, 2> vertical_roots(int m, double eps) {
  const double pi = std::numbers::pi;
  const double b = pi * pi * m * m;
  const double c = pi * pi * m * m / (eps * eps);
  const cd disc = std::sqrt(cd(b * b - 4.0 * c, 0.0));
  return {(-b - disc) / 2.0, (-b + disc) / 2.0};
}

struct Evolution {
  Amplitudes amplitudes = Amplitudes::Zero();
  bool taylor_fallback = false;  // eigenvector basis was ill-conditioned
};

namespace detail {

/// exp(t a) by scaling and squaring of a truncated Taylor series.
inline Eigen::Matrix4cd taylor_expm(const Eigen::Matrix4cd& a, double t) {
  Eigen::Matrix4cd x = a * t;
  const double norm = x.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = int(std::ceil(std::log2(norm / 0.5)));
  x /= std::pow(2.0, squarings);
  Eigen::Matrix4cd result = Eigen::Matrix4cd::Identity();
  Eigen::Matrix4cd term = Eigen::Matrix4cd::Identity();
  for (int n = 1; n <= 30; ++n) {
    term = term * x / double(n);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace detail

/// Exact solution x(t) = exp(t m) x0 via eigen-decomposition.
inline Evolution evolve_exact(const Amplitudes& init, double t, std::array<int, 3> k, double eps) {
  if (!(t >= 0.0)) throw InvalidInput("evolution time must be nonnegative");
  const LinearModeSystem sys(k, eps);
  Evolution out;
  if (t == 0.0) {
    out.amplitudes = init;
    return out;
  }
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(sys.m);
  const Eigen::Matrix4cd& v = es.eigenvectors();
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(v);
  const auto sv = svd.singularValues();
  const double cond = sv(0) / sv(3);
  if (!(cond < 1e8)) {
    out.taylor_fallback = true;
    out.amplitudes = detail::taylor_expm(sys.m, t) * init;
    return out;
  }
  Eigen::Vector4cd growth;
  for (int j = 0; j < 4; ++j) growth(j) = std::exp(es.eigenvalues()(j) * t);
  const Eigen::Vector4cd coeffs = v.partialPivLu().solve(init);
  out.amplitudes = v * growth.cwiseProduct(coeffs);
  return out;
}

/// Residual of d_t(d_t eta - lap eta) - lap_h eta - eps^-2 d_zz eta at one mode,
/// with d_t evaluated through the system matrix.
inline cd damped_wave_residual(const Amplitudes& x, std::array<int, 3> k, double eps) {
  const LinearModeSystem sys(k, eps);
  const double pi = std::numbers::pi;
  const double kh2 = pi * pi * (k[0] * k[0] + k[1] * k[1]);
  const double kz2 = pi * pi * k[2] * k[2];
  const Amplitudes xt = sys.m * x;
  const Amplitudes xtt = sys.m * xt;
  return xtt(0) + (kh2 + kz2) * xt(0) + (kh2 + kz2 / (eps * eps)) * x(0);
}

/// Initial data for the vertical-mode sweep.
enum class InitialFamily {
  unit,      // eta(0) = cos(pi m z): O(1) vertical imbalance
  balanced,  // eta(0) = eps cos(pi m z): imbalance O(eps), mirrors d_z sigma = O(eps)
};

struct BoundRow {
  double eps = 0.0;
  double sup_eta = 0.0;
  double sup_eps_psiz = 0.0;
  double sup_psiz = 0.0;
  double sup_dt_eta = 0.0;
  double sup_energy = 0.0;  // sup_t (|eta|^2 + |psih|^2 + |eps psiz|^2)^(1/2)
};

struct BoundReport {
  std::vector<BoundRow> rows;
  double energy_ratio = 1.0;  // max/min of sup_energy across eps
  double psiz_ratio = 1.0;
  double eps_psiz_ratio = 1.0;
  double dt_eta_ratio = 1.0;
  double factor = 2.0;
  bool energy_uniform = true;
  bool eps_psiz_uniform = true;
  bool psiz_uniform = true;
  bool dt_eta_uniform = true;
};

/// Sweeps epsilon for fixed initial data of the vertical mode (0,0,mode)
/// (psi = 0) and reports which amplitudes stay bounded uniformly in
/// epsilon within `factor`. With unit data eps*psi_z is uniform while
/// psi_z and d_t eta blow up like 1/eps; balanced data keeps d_t eta, and
/// with it psi_z, uniform.
inline BoundReport uniform_bound_check(const std::vector<double>& eps_list, const std::vector<double>& t_grid,
                                       InitialFamily family = InitialFamily::unit, int mode = 1,
                                       double amplitude = 1.0, double factor = 2.0) {
  if (eps_list.empty() || t_grid.empty()) throw InvalidInput("uniform_bound_check needs nonempty inputs");
  BoundReport rep;
  rep.factor = factor;
  const std::array<int, 3> k{0, 0, mode};
  for (double eps : eps_list) {
    const LinearModeSystem sys(k, eps);
    Amplitudes x0 = Amplitudes::Zero();
    // cos(pi m z) has coefficient 1/2 at +-m; track the +m coefficient.
    x0(0) = 0.5 * amplitude * (family == InitialFamily::balanced ? eps : 1.0);
    BoundRow row{eps};
    for (double t : t_grid) {
      const Amplitudes x = evolve_exact(x0, t, k, eps).amplitudes;
      const Amplitudes xt = sys.m * x;
      row.sup_eta = std::max(row.sup_eta, std::abs(x(0)));
      row.sup_psiz = std::max(row.sup_psiz, std::abs(x(3)));
      row.sup_eps_psiz = std::max(row.sup_eps_psiz, eps * std::abs(x(3)));
      row.sup_dt_eta = std::max(row.sup_dt_eta, std::abs(xt(0)));
      row.sup_energy = std::max(row.sup_energy, std::sqrt(std::norm(x(0)) + std::norm(x(1)) + std::norm(x(2)) +
                                                          eps * eps * std::norm(x(3))));
    }
    rep.rows.push_back(row);
  }
  auto ratio = [&](auto member) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : rep.rows) {
      lo = std::min(lo, r.*member);
      hi = std::max(hi, r.*member);
    }
    if (hi == 0.0) return 1.0;
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  };
  rep.energy_ratio = ratio(&BoundRow::sup_energy);
  rep.psiz_ratio = ratio(&BoundRow::sup_psiz);
  rep.eps_psiz_ratio = ratio(&BoundRow::sup_eps_psiz);
  rep.dt_eta_ratio = ratio(&BoundRow::sup_dt_eta);
  rep.energy_uniform = rep.energy_ratio <= factor;
  rep.psiz_uniform = rep.psiz_ratio <= factor;
  rep.eps_psiz_uniform = rep.eps_psiz_ratio <= factor;
  rep.dt_eta_uniform = rep.dt_eta_ratio <= factor;
  return rep;
}

}  // namespace hydrolim::oracle
