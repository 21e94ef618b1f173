#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace psycodec {

/// Real-input FFT of a fixed size, backed by FFTW.
///
/// Data is copied into aligned scratch buffers before every transform so
/// results do not depend on the caller's alignment. Instances are not
/// thread-safe; use one per thread.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return size_; }
  std::size_t bins() const noexcept { return size_ / 2 + 1; }

  /// Unnormalized forward transform, X[k] = sum_n x[n] e^{-2 pi i k n / N}.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Unnormalized inverse: returns N * x for out = forward(x).
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Impl;
  std::size_t size_ = 0;
  std::unique_ptr<Impl> impl_;
};

/// Complex FFT of a fixed size, same conventions as RealFft.
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t size);
  ~ComplexFft();
  ComplexFft(ComplexFft&&) noexcept;
  ComplexFft& operator=(ComplexFft&&) noexcept;
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;

  std::size_t size() const noexcept { return size_; }

  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
  void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

 private:
  struct Impl;
  std::size_t size_ = 0;
  std::unique_ptr<Impl> impl_;
};

std::size_t next_pow2(std::size_t n);

}  // namespace psycodec
