#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "hydrolim/error.hpp"
#include "hydrolim/fft.hpp"
#include "hydrolim/grid.hpp"

namespace hydrolim {

using complex = std::complex<double>;

enum class Axis { x, y, z };

/// Symmetry class of a field under z -> -z.
enum class Parity { even, odd, none };

constexpr Parity flip(Parity p) noexcept {
  switch (p) {
    case Parity::even: return Parity::odd;
    case Parity::odd: return Parity::even;
    default: return Parity::none;
  }
}

/// Parity of a sum.
constexpr Parity sum_parity(Parity a, Parity b) noexcept { return a == b ? a : Parity::none; }

/// Parity of a pointwise product.
constexpr Parity product_parity(Parity a, Parity b) noexcept {
  if (a == Parity::none || b == Parity::none) return Parity::none;
  return a == b ? Parity::even : Parity::odd;
}

/// Real values on the collocation points of a grid.
class PhysicalField {
 public:
  explicit PhysicalField(const Grid& grid) : grid_(grid), values_(grid.physical_size(), 0.0) {}
  PhysicalField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid.physical_size()) {
      throw InvalidInput("physical array has " + std::to_string(values_.size()) + " values, grid expects " +
                         std::to_string(grid.physical_size()));
    }
  }

  /// Evaluates fn(x, y, z) at every grid point.
  template <class Fn>
  static PhysicalField sample(const Grid& grid, Fn&& fn) {
    PhysicalField out(grid);
    for (int k = 0; k < grid.nz(); ++k)
      for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i) out(i, j, k) = fn(grid.x(i), grid.y(j), grid.z(k));
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(int i, int j, int k) noexcept { return values_[grid_.index(i, j, k)]; }
  double operator()(int i, int j, int k) const noexcept { return values_[grid_.index(i, j, k)]; }
  double& operator[](std::size_t n) noexcept { return values_[n]; }
  double operator[](std::size_t n) const noexcept { return values_[n]; }

  PhysicalField& operator+=(const PhysicalField& o) {
    for (std::size_t n = 0; n < size(); ++n) values_[n] += o.values_[n];
    return *this;
  }
  PhysicalField& operator-=(const PhysicalField& o) {
    for (std::size_t n = 0; n < size(); ++n) values_[n] -= o.values_[n];
    return *this;
  }
  PhysicalField& operator*=(const PhysicalField& o) {
    for (std::size_t n = 0; n < size(); ++n) values_[n] *= o.values_[n];
    return *this;
  }
  PhysicalField& operator*=(double a) {
    for (auto& v : values_) v *= a;
    return *this;
  }
  friend PhysicalField operator+(PhysicalField a, const PhysicalField& b) { return a += b; }
  friend PhysicalField operator-(PhysicalField a, const PhysicalField& b) { return a -= b; }
  friend PhysicalField operator*(PhysicalField a, const PhysicalField& b) { return a *= b; }
  friend PhysicalField operator*(double s, PhysicalField a) { return a *= s; }

  template <class Fn>
  PhysicalField& apply(Fn&& fn) {
    for (auto& v : values_) v = fn(v);
    return *this;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// L2 norm by equal-weight quadrature (sum times cell volume).
  double l2_norm() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s * grid_.cell_volume());
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Fourier coefficients of a real field on the periodic box.
///
/// Only the half spectrum kx >= 0 is stored; coefficients with kx < 0
/// follow from Hermitian symmetry. Layout is (iz, iy, ix) slowest-first
/// with ix in [0, nx/2]. The coefficient of mode k multiplies
/// exp(i*pi*k.x), so a constant field c has coeff(0,0,0) = c.
class SpectralField {
 public:
  explicit SpectralField(const Grid& grid, Parity parity = Parity::none)
      : grid_(grid), coeffs_(grid.spectral_size()), parity_(parity) {}

  const Grid& grid() const noexcept { return grid_; }
  Parity parity() const noexcept { return parity_; }
  void set_parity(Parity p) noexcept { parity_ = p; }

  std::span<complex> coeffs() noexcept { return coeffs_; }
  std::span<const complex> coeffs() const noexcept { return coeffs_; }

  std::size_t slot(int ix, int iy, int iz) const noexcept {
    return std::size_t(ix) + std::size_t(grid_.nx_half()) * (std::size_t(iy) + std::size_t(grid_.ny()) * iz);
  }
  complex& at(int ix, int iy, int iz) noexcept { return coeffs_[slot(ix, iy, iz)]; }
  complex at(int ix, int iy, int iz) const noexcept { return coeffs_[slot(ix, iy, iz)]; }

  /// Coefficient of signed mode (kx, ky, kz), |k_axis| <= n_axis/2.
  complex coeff(int kx, int ky, int kz) const noexcept {
    const int ny = grid_.ny(), nz = grid_.nz();
    if (kx < 0) {
      return std::conj(at(-kx, Grid::slot_of(-ky, ny) % ny, Grid::slot_of(-kz, nz) % nz));
    }
    return at(kx, Grid::slot_of(ky, ny) % ny, Grid::slot_of(kz, nz) % nz);
  }

  /// Sets mode k and its Hermitian partner -k so the field stays real.
  void set_mode(int kx, int ky, int kz, complex value) {
    const int nx = grid_.nx(), ny = grid_.ny(), nz = grid_.nz();
    if (kx < 0) {
      kx = -kx;
      ky = -ky;
      kz = -kz;
      value = std::conj(value);
    }
    if (kx > nx / 2) throw InvalidInput("mode out of range");
    at(kx, Grid::slot_of(ky, ny) % ny, Grid::slot_of(kz, nz) % nz) = value;
    if (kx == 0 || kx == nx / 2) {
      at(kx, Grid::slot_of(-ky, ny) % ny, Grid::slot_of(-kz, nz) % nz) = std::conj(value);
    }
  }

  /// Multiplicity of a stored slot in the full spectrum (2 for interior kx).
  double weight(int ix) const noexcept { return (ix == 0 || ix == grid_.nx() / 2) ? 1.0 : 2.0; }

  /// Calls fn(slot, kx, ky, kz) for every stored coefficient.
  template <class Fn>
  void for_each_mode(Fn&& fn) const {
    const int nxh = grid_.nx_half(), ny = grid_.ny(), nz = grid_.nz();
    std::size_t n = 0;
    for (int iz = 0; iz < nz; ++iz) {
      const int kz = Grid::mode_of(iz, nz);
      for (int iy = 0; iy < ny; ++iy) {
        const int ky = Grid::mode_of(iy, ny);
        for (int ix = 0; ix < nxh; ++ix, ++n) fn(n, ix, ky, kz);
      }
    }
  }

  SpectralField& operator+=(const SpectralField& o) {
    check_same_grid(o);
    for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += o.coeffs_[n];
    parity_ = sum_parity(parity_, o.parity_);
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    check_same_grid(o);
    for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] -= o.coeffs_[n];
    parity_ = sum_parity(parity_, o.parity_);
    return *this;
  }
  SpectralField& operator*=(double a) noexcept {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  SpectralField operator-() const { return -1.0 * SpectralField(*this); }

  /// a += s * b
  void axpy(double s, const SpectralField& b) {
    check_same_grid(b);
    for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += s * b.coeffs_[n];
    parity_ = sum_parity(parity_, b.parity_);
  }

  bool all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
  }

  double max_abs_coeff() const noexcept {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  void check_same_grid(const SpectralField& o) const {
    if (!(o.grid_ == grid_)) throw InvalidInput("fields live on different grids");
  }

  Grid grid_;
  std::vector<complex> coeffs_;
  Parity parity_;
};

inline SpectralField to_spectral(const PhysicalField& f, Parity parity = Parity::none) {
  const Grid& g = f.grid();
  SpectralField out(g, parity);
  detail::FftEngine::get({g.nz(), g.ny(), g.nx()})->forward(f.values(), out.coeffs());
  return out;
}

/// Validating overload for raw arrays.
inline SpectralField to_spectral(const Grid& grid, std::span<const double> values,
                                 Parity parity = Parity::none) {
  return to_spectral(PhysicalField(grid, std::vector<double>(values.begin(), values.end())), parity);
}

inline PhysicalField to_physical(const SpectralField& f) {
  const Grid& g = f.grid();
  PhysicalField out(g);
  detail::FftEngine::get({g.nz(), g.ny(), g.nx()})->backward(f.coeffs(), out.values());
  return out;
}

namespace detail {

inline complex ipow(complex base, int order) {
  complex r = 1.0;
  for (int i = 0; i < order; ++i) r *= base;
  return r;
}

inline int axis_mode(Axis axis, int kx, int ky, int kz) noexcept {
  switch (axis) {
    case Axis::x: return kx;
    case Axis::y: return ky;
    default: return kz;
  }
}

inline int axis_size(const Grid& g, Axis axis) noexcept {
  switch (axis) {
    case Axis::x: return g.nx();
    case Axis::y: return g.ny();
    default: return g.nz();
  }
}

}  // namespace detail

/// Multiplies every coefficient by (i*pi*k_axis)^order. Odd derivatives
/// annihilate the Nyquist mode along that axis, which has no real
/// derivative on the grid.
inline SpectralField derivative(const SpectralField& f, Axis axis, int order = 1) {
  if (order < 1) throw InvalidInput("derivative order must be positive");
  SpectralField out(f.grid(), (axis == Axis::z && order % 2 == 1) ? flip(f.parity()) : f.parity());
  const int n = detail::axis_size(f.grid(), axis);
  auto src = f.coeffs();
  auto dst = out.coeffs();
  f.for_each_mode([&](std::size_t s, int ix, int ky, int kz) {
    const int k = detail::axis_mode(axis, ix, ky, kz);
    if (order % 2 == 1 && std::abs(k) * 2 == n) {
      dst[s] = 0.0;
      return;
    }
    dst[s] = src[s] * detail::ipow(complex(0.0, Grid::wavenumber(k)), order);
  });
  return out;
}

/// Horizontal Laplacian plus vertical second derivative.
inline SpectralField laplacian(const SpectralField& f) {
  SpectralField out(f.grid(), f.parity());
  auto src = f.coeffs();
  auto dst = out.coeffs();
  f.for_each_mode([&](std::size_t s, int kx, int ky, int kz) {
    const double k2 = Grid::wavenumber(kx) * Grid::wavenumber(kx) + Grid::wavenumber(ky) * Grid::wavenumber(ky) +
                      Grid::wavenumber(kz) * Grid::wavenumber(kz);
    dst[s] = -k2 * src[s];
  });
  return out;
}

/// H^s norm with the |Omega| = 8 volume factor:
/// ( 8 * sum_k (1 + |pi k|^2)^s |f_k|^2 )^(1/2). For s = 0 this is the L2 norm.
inline double hs_norm(const SpectralField& f, int s) {
  if (s < 0) throw InvalidInput("Sobolev index must be nonnegative");
  double sum = 0.0;
  auto c = f.coeffs();
  f.for_each_mode([&](std::size_t n, int kx, int ky, int kz) {
    const double k2 = Grid::wavenumber(kx) * Grid::wavenumber(kx) + Grid::wavenumber(ky) * Grid::wavenumber(ky) +
                      Grid::wavenumber(kz) * Grid::wavenumber(kz);
    sum += f.weight(kx) * std::pow(1.0 + k2, s) * std::norm(c[n]);
  });
  return std::sqrt(Grid::volume * sum);
}

inline double l2_norm(const SpectralField& f) { return hs_norm(f, 0); }

/// Symmetric (even) or antisymmetric (odd) part in z.
inline SpectralField project_parity(const SpectralField& f, Parity parity) {
  if (parity == Parity::none) return f;
  const Grid& g = f.grid();
  SpectralField out(g, parity);
  const double sign = parity == Parity::even ? 1.0 : -1.0;
  const int nz = g.nz();
  for (int iz = 0; iz < nz; ++iz) {
    const int mirror = (nz - iz) % nz;
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nx_half(); ++ix)
        out.at(ix, iy, iz) = 0.5 * (f.at(ix, iy, iz) + sign * f.at(ix, iy, mirror));
  }
  return out;
}

/// 2/3 rule: zeroes every mode with |k_axis| > floor(n_axis / 3) in any direction.
inline SpectralField dealias(SpectralField f) {
  const Grid& g = f.grid();
  const int cx = g.nx() / 3, cy = g.ny() / 3, cz = g.nz() / 3;
  auto c = f.coeffs();
  f.for_each_mode([&](std::size_t n, int kx, int ky, int kz) {
    if (kx > cx || std::abs(ky) > cy || std::abs(kz) > cz) c[n] = 0.0;
  });
  return f;
}

/// True when no mode beyond the 2/3 cutoff is populated.
inline bool is_dealiased(const SpectralField& f) {
  const Grid& g = f.grid();
  const int cx = g.nx() / 3, cy = g.ny() / 3, cz = g.nz() / 3;
  bool ok = true;
  auto c = f.coeffs();
  f.for_each_mode([&](std::size_t n, int kx, int ky, int kz) {
    if ((kx > cx || std::abs(ky) > cy || std::abs(kz) > cz) && c[n] != complex(0.0)) ok = false;
  });
  return ok;
}

/// Keeps only the kz = 0 modes (z-independent part).
inline SpectralField kz0_part(const SpectralField& f) {
  SpectralField out(f.grid(), f.parity() == Parity::odd ? Parity::odd : Parity::even);
  const Grid& g = f.grid();
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx_half(); ++ix) out.at(ix, iy, 0) = f.at(ix, iy, 0);
  return out;
}

/// Vertical average over z in [0,1]. For even fields this equals the
/// kz = 0 mode, which is how it is computed.
inline SpectralField vertical_average(const SpectralField& f) {
  if (f.parity() != Parity::even) {
    throw ContractViolation("vertical_average requires an even-in-z field");
  }
  return kz0_part(f);
}

inline SpectralField vertical_fluctuation(const SpectralField& f) {
  SpectralField out = f - vertical_average(f);
  out.set_parity(Parity::even);
  return out;
}

/// Primitive g(x, y, z) = int_0^z f dz'. The kz = 0 part of f integrates
/// to slope * z, which is not periodic and is kept separately; the rest
/// is an ordinary spectral field vanishing at z = 0.
struct VerticalPrimitive {
  SpectralField periodic;
  SpectralField slope;  // z-independent: the kz = 0 part of the integrand

  /// periodic + slope * z evaluated on the grid points z_j in [0, 2).
  PhysicalField to_physical() const {
    PhysicalField p = hydrolim::to_physical(periodic);
    const PhysicalField s = hydrolim::to_physical(slope);
    const Grid& g = periodic.grid();
    for (int k = 0; k < g.nz(); ++k)
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) p(i, j, k) += s(i, j, k) * g.z(k);
    return p;
  }
};

inline VerticalPrimitive vertical_integral(const SpectralField& f) {
  const Grid& g = f.grid();
  SpectralField periodic(g, flip(f.parity()));
  SpectralField slope = kz0_part(f);
  slope.set_parity(Parity::none);
  const int nz = g.nz();
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx_half(); ++ix) {
      complex offset = 0.0;
      for (int iz = 1; iz < nz; ++iz) {
        const int kz = Grid::mode_of(iz, nz);
        if (2 * std::abs(kz) == nz) continue;  // Nyquist: no periodic primitive on the grid
        const complex c = f.at(ix, iy, iz) / complex(0.0, Grid::wavenumber(kz));
        periodic.at(ix, iy, iz) = c;
        offset -= c;
      }
      periodic.at(ix, iy, 0) = offset;
    }
  }
  return {std::move(periodic), std::move(slope)};
}

/// Copies the modes of f into a field on a finer (or equal) grid; the
/// Nyquist planes of the source are dropped.
inline SpectralField prolong(const SpectralField& f, const Grid& fine) {
  const Grid& g = f.grid();
  if (fine.nx() < g.nx() || fine.ny() < g.ny() || fine.nz() < g.nz()) {
    throw InvalidInput("prolong target grid must not be coarser");
  }
  SpectralField out(fine, f.parity());
  f.for_each_mode([&](std::size_t n, int kx, int ky, int kz) {
    if (2 * kx == g.nx() || 2 * std::abs(ky) == g.ny() || 2 * std::abs(kz) == g.nz()) return;
    out.at(kx, Grid::slot_of(ky, fine.ny()), Grid::slot_of(kz, fine.nz())) = f.coeffs()[n];
  });
  return out;
}

/// Pseudo-spectral product: multiply in physical space, transform back,
/// optionally apply the 2/3 rule, and clean the parity if it is known.
inline SpectralField multiply(const SpectralField& a, const SpectralField& b, bool apply_dealias = true) {
  PhysicalField p = to_physical(a);
  p *= to_physical(b);
  const Parity parity = product_parity(a.parity(), b.parity());
  SpectralField out = to_spectral(p, parity);
  if (apply_dealias) out = dealias(std::move(out));
  return project_parity(out, parity);
}

/// Transforms a physical product back and cleans it the same way multiply does.
inline SpectralField finish_product(const PhysicalField& p, Parity parity, bool apply_dealias = true) {
  SpectralField out = to_spectral(p, parity);
  if (apply_dealias) out = dealias(std::move(out));
  return project_parity(out, parity);
}

/// Fourier coefficients of a real field on the horizontal torus 2T^2.
/// Used for genuinely z-independent quantities.
class HorizontalField {
 public:
  explicit HorizontalField(const Grid& grid) : grid_(grid), coeffs_(grid.horizontal_spectral_size()) {}

  const Grid& grid() const noexcept { return grid_; }
  std::span<complex> coeffs() noexcept { return coeffs_; }
  std::span<const complex> coeffs() const noexcept { return coeffs_; }
  complex& at(int ix, int iy) noexcept { return coeffs_[std::size_t(ix) + std::size_t(grid_.nx_half()) * iy]; }
  complex at(int ix, int iy) const noexcept { return coeffs_[std::size_t(ix) + std::size_t(grid_.nx_half()) * iy]; }

  HorizontalField& operator+=(const HorizontalField& o) {
    for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += o.coeffs_[n];
    return *this;
  }
  HorizontalField& operator*=(double a) noexcept {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }
  friend HorizontalField operator+(HorizontalField a, const HorizontalField& b) { return a += b; }
  friend HorizontalField operator*(double s, HorizontalField a) { return a *= s; }

  void axpy(double s, const HorizontalField& b) {
    for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += s * b.coeffs_[n];
  }

  bool all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
  }

  /// Embeds as a z-independent 3-D field (only kz = 0 populated).
  SpectralField lift() const {
    SpectralField out(grid_, Parity::even);
    for (int iy = 0; iy < grid_.ny(); ++iy)
      for (int ix = 0; ix < grid_.nx_half(); ++ix) out.at(ix, iy, 0) = at(ix, iy);
    return out;
  }

  /// The kz = 0 slice of a 3-D field.
  static HorizontalField from_kz0(const SpectralField& f) {
    HorizontalField out(f.grid());
    for (int iy = 0; iy < f.grid().ny(); ++iy)
      for (int ix = 0; ix < f.grid().nx_half(); ++ix) out.at(ix, iy) = f.at(ix, iy, 0);
    return out;
  }

  /// Values on the nx * ny horizontal grid points (x fastest).
  std::vector<double> to_physical() const {
    std::vector<double> out(grid_.horizontal_size());
    detail::FftEngine::get({grid_.ny(), grid_.nx()})->backward(coeffs_, out);
    return out;
  }

  static HorizontalField from_physical(const Grid& grid, std::span<const double> values) {
    if (values.size() != grid.horizontal_size()) throw InvalidInput("horizontal array shape mismatch");
    HorizontalField out(grid);
    detail::FftEngine::get({grid.ny(), grid.nx()})->forward(values, out.coeffs_);
    return out;
  }

  HorizontalField derivative(Axis axis) const {
    if (axis == Axis::z) return HorizontalField(grid_);
    HorizontalField out(grid_);
    const int n = axis == Axis::x ? grid_.nx() : grid_.ny();
    for (int iy = 0; iy < grid_.ny(); ++iy) {
      const int ky = Grid::mode_of(iy, grid_.ny());
      for (int ix = 0; ix < grid_.nx_half(); ++ix) {
        const int k = axis == Axis::x ? ix : ky;
        out.at(ix, iy) = 2 * std::abs(k) == n ? complex(0.0) : complex(0.0, Grid::wavenumber(k)) * at(ix, iy);
      }
    }
    return out;
  }

  HorizontalField dealias() const {
    HorizontalField out(*this);
    const int cx = grid_.nx() / 3, cy = grid_.ny() / 3;
    for (int iy = 0; iy < grid_.ny(); ++iy)
      for (int ix = 0; ix < grid_.nx_half(); ++ix)
        if (ix > cx || std::abs(Grid::mode_of(iy, grid_.ny())) > cy) out.at(ix, iy) = 0.0;
    return out;
  }

 private:
  Grid grid_;
  std::vector<complex> coeffs_;
};

}  // namespace hydrolim
