#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "psycodec/grid.hpp"
#include "psycodec/phase_space.hpp"

namespace psycodec::oracle {

inline constexpr std::size_t kMaxDimension = 4096;

/// Dense n x n complex matrix, row-major. Exact small-n ground truth for
/// every operator approximation in the codec.
class DenseOperator {
 public:
  using value_type = std::complex<double>;

  DenseOperator() = default;
  explicit DenseOperator(std::size_t n);

  static DenseOperator identity(std::size_t n);
  static DenseOperator projector(std::span<const double> signal);

  std::size_t n() const noexcept { return n_; }
  value_type& operator()(std::size_t r, std::size_t c) { return entries_[r * n_ + c]; }
  const value_type& operator()(std::size_t r, std::size_t c) const { return entries_[r * n_ + c]; }

  std::span<value_type> entries() noexcept { return entries_; }
  std::span<const value_type> entries() const noexcept { return entries_; }

  double frobenius_norm() const;
  /// ||A - A*||_F
  double hermitian_defect() const;
  bool is_hermitian(double rel_tol = 1e-10) const;

  DenseOperator adjoint() const;
  DenseOperator operator*(const DenseOperator& rhs) const;
  DenseOperator operator-(const DenseOperator& rhs) const;
  std::vector<double> apply(std::span<const double> x) const;  // real part of A x
  std::vector<std::complex<double>> apply(std::span<const std::complex<double>> x) const;

 private:
  std::size_t n_ = 0;
  std::vector<value_type> entries_;
};

/// Symbol of `op` on TFGrid::dense(n). Exactly inverted by inverse_weyl.
/// Hermitian operators map to real symbols; the imaginary part of the
/// symbol of a non-Hermitian operator is returned through `imag` when given.
PhaseSymbol weyl_symbol(const DenseOperator& op, PhaseSymbol* imag = nullptr);

/// Operator whose symbol is `sym` (+ i * `imag`). `sym` must live on a dense grid.
DenseOperator inverse_weyl(const PhaseSymbol& sym, const PhaseSymbol* imag = nullptr);

/// f(A) through the eigendecomposition of a Hermitian A.
DenseOperator matrix_function(const DenseOperator& op, const phase_space::ScalarFunction& func);

/// Eigenvalues of a Hermitian operator, ascending.
std::vector<double> eigenvalues(const DenseOperator& op);

/// Wigner function of `signal`: the symbol of |psi><psi|.
PhaseSymbol wigner(std::span<const double> signal);

/// tr(AB).
double trace_pair(const DenseOperator& a, const DenseOperator& b);

/// Constant c with tr(AB) = c * sum(sA * sB), measured once from A = B = I.
double traciality_constant(std::size_t n);

/// Samples a symbol on a physical one-sided grid onto the dense n x n grid,
/// starting at sample `offset`. Times and frequencies are linearly
/// interpolated; negative frequencies mirror positive ones.
PhaseSymbol to_dense(const PhaseSymbol& sym, std::size_t n, std::size_t offset = 0);

}  // namespace psycodec::oracle
