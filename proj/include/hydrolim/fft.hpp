#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace hydrolim::detail {

/// Cached pair of real-to-complex / complex-to-real FFTW plans for one
/// array shape. Plans are created once under a global lock (the FFTW
/// planner is not reentrant) and afterwards executed through the
/// new-array interface, which is safe from any thread.
///
/// Shapes are given slowest-first, e.g. {nz, ny, nx}; the last axis is
/// the halved one. Forward output is normalised by 1/N so that a
/// constant field c has zeroth coefficient c.
class FftEngine {
 public:
  using complex = std::complex<double>;

  static std::shared_ptr<const FftEngine> get(std::vector<int> dims) {
    static std::mutex mtx;
    static std::map<std::vector<int>, std::shared_ptr<const FftEngine>> cache;
    std::lock_guard lock(mtx);
    auto it = cache.find(dims);
    if (it != cache.end()) return it->second;
    auto engine = std::shared_ptr<const FftEngine>(new FftEngine(dims));
    cache.emplace(std::move(dims), engine);
    return engine;
  }

  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  ~FftEngine() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  std::size_t real_size() const noexcept { return real_size_; }
  std::size_t complex_size() const noexcept { return complex_size_; }

  void forward(std::span<const double> in, std::span<complex> out) const {
    // r2c out-of-place preserves its input, the const_cast is only for the C API.
    fftw_execute_dft_r2c(forward_, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / double(real_size_);
    for (auto& c : out) c *= scale;
  }

  void backward(std::span<const complex> in, std::span<double> out) const {
    // c2r destroys its input.
    std::vector<complex> scratch(in.begin(), in.end());
    fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  }

 private:
  explicit FftEngine(const std::vector<int>& dims) {
    real_size_ = 1;
    for (int d : dims) real_size_ *= std::size_t(d);
    complex_size_ = real_size_ / std::size_t(dims.back()) * std::size_t(dims.back() / 2 + 1);
    std::vector<double> r(real_size_);
    std::vector<complex> c(complex_size_);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int rank = int(dims.size());
    forward_ = fftw_plan_dft_r2c(rank, dims.data(), r.data(), reinterpret_cast<fftw_complex*>(c.data()), flags);
    backward_ = fftw_plan_dft_c2r(rank, dims.data(), reinterpret_cast<fftw_complex*>(c.data()), r.data(), flags);
  }

  std::size_t real_size_ = 0;
  std::size_t complex_size_ = 0;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace hydrolim::detail
