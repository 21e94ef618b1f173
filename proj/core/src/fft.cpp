#include "psycodec/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "psycodec/error.hpp"

namespace psycodec {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealFft::RealFft(std::size_t size) : size_(size), impl_(std::make_unique<Impl>()) {
  if (size < 2) fail(ErrorKind::InvalidArgument, "fft size must be >= 2");
  const int n = static_cast<int>(size);
  impl_->real = fftw_alloc_real(size);
  impl_->spec = fftw_alloc_complex(size / 2 + 1);
  std::lock_guard lock(planner_mutex());
  impl_->fwd = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_1d(n, impl_->spec, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t n = std::min(in.size(), size_);
  std::copy_n(in.begin(), n, impl_->real);
  std::fill(impl_->real + n, impl_->real + size_, 0.0);
  fftw_execute(impl_->fwd);
  std::memcpy(out.data(), impl_->spec, bins() * sizeof(fftw_complex));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  // c2r destroys its input, hence the copy even when called repeatedly.
  std::memcpy(impl_->spec, in.data(), bins() * sizeof(fftw_complex));
  fftw_execute(impl_->inv);
  std::copy(impl_->real, impl_->real + size_, out.begin());
}

struct ComplexFft::Impl {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(in);
    fftw_free(out);
  }
};

ComplexFft::ComplexFft(std::size_t size) : size_(size), impl_(std::make_unique<Impl>()) {
  if (size < 1) fail(ErrorKind::InvalidArgument, "fft size must be >= 1");
  const int n = static_cast<int>(size);
  impl_->in = fftw_alloc_complex(size);
  impl_->out = fftw_alloc_complex(size);
  std::lock_guard lock(planner_mutex());
  impl_->fwd = fftw_plan_dft_1d(n, impl_->in, impl_->out, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_1d(n, impl_->in, impl_->out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexFft::~ComplexFft() = default;
ComplexFft::ComplexFft(ComplexFft&&) noexcept = default;
ComplexFft& ComplexFft::operator=(ComplexFft&&) noexcept = default;

void ComplexFft::forward(std::span<const std::complex<double>> in,
                         std::span<std::complex<double>> out) {
  std::memcpy(impl_->in, in.data(), size_ * sizeof(fftw_complex));
  fftw_execute(impl_->fwd);
  std::memcpy(out.data(), impl_->out, size_ * sizeof(fftw_complex));
}

void ComplexFft::inverse(std::span<const std::complex<double>> in,
                         std::span<std::complex<double>> out) {
  std::memcpy(impl_->in, in.data(), size_ * sizeof(fftw_complex));
  fftw_execute(impl_->inv);
  std::memcpy(out.data(), impl_->out, size_ * sizeof(fftw_complex));
}

}  // namespace psycodec
