#pragma once

#include <cstddef>
#include <numbers>

#include "hydrolim/error.hpp"

namespace hydrolim {

/// Uniform collocation grid on the periodic box [0,2)^3.
///
/// Every direction has period 2, so the integer mode k carries the
/// wavenumber pi*k. Physical arrays are stored with x fastest:
/// index = ix + nx*(iy + ny*iz).
class Grid {
 public:
  static constexpr double period = 2.0;
  static constexpr double volume = period * period * period;

  Grid(int nx, int ny, int nz) : nx_(nx), ny_(ny), nz_(nz) {
    for (int n : {nx, ny, nz}) {
      if (n < 4 || n % 2 != 0) {
        throw InvalidInput("grid sizes must be even and >= 4");
      }
    }
  }
  explicit Grid(int n) : Grid(n, n, n) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int nz() const noexcept { return nz_; }

  /// Number of stored x-modes in the half spectrum (real transform).
  int nx_half() const noexcept { return nx_ / 2 + 1; }

  std::size_t physical_size() const noexcept { return std::size_t(nx_) * ny_ * nz_; }
  std::size_t spectral_size() const noexcept { return std::size_t(nx_half()) * ny_ * nz_; }
  std::size_t horizontal_size() const noexcept { return std::size_t(nx_) * ny_; }
  std::size_t horizontal_spectral_size() const noexcept { return std::size_t(nx_half()) * ny_; }

  double dx() const noexcept { return period / nx_; }
  double dy() const noexcept { return period / ny_; }
  double dz() const noexcept { return period / nz_; }
  double cell_volume() const noexcept { return dx() * dy() * dz(); }

  double x(int i) const noexcept { return period * i / nx_; }
  double y(int j) const noexcept { return period * j / ny_; }
  double z(int k) const noexcept { return period * k / nz_; }

  std::size_t index(int ix, int iy, int iz) const noexcept {
    return std::size_t(ix) + std::size_t(nx_) * (std::size_t(iy) + std::size_t(ny_) * iz);
  }

  /// Signed integer mode stored at array position i of an n-point axis.
  static int mode_of(int i, int n) noexcept { return i <= n / 2 ? i : i - n; }
  /// Array position of signed mode k (|k| <= n/2) on an n-point axis.
  static int slot_of(int k, int n) noexcept { return k >= 0 ? k : k + n; }

  static constexpr double wavenumber(int k) noexcept { return std::numbers::pi * k; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int nx_;
  int ny_;
  int nz_;
};

}  // namespace hydrolim
