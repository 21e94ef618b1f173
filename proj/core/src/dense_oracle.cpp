#include "psycodec/dense_oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "psycodec/error.hpp"
#include "psycodec/fft.hpp"

namespace psycodec::oracle {

namespace {

using cplx = std::complex<double>;
using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPi = std::numbers::pi;

Eigen::Map<Matrix> as_eigen(DenseOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.n());
  return {op.entries().data(), n, n};
}

Eigen::Map<const Matrix> as_eigen(const DenseOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.n());
  return {op.entries().data(), n, n};
}

std::ptrdiff_t centered(std::size_t p, std::size_t n) {
  return p < n / 2 + n % 2 ? static_cast<std::ptrdiff_t>(p)
                           : static_cast<std::ptrdiff_t>(p) - static_cast<std::ptrdiff_t>(n);
}

cplx omega_pow(std::size_t e, std::size_t n) {
  const double ang = 2.0 * kPi * static_cast<double>(e % n) / static_cast<double>(n);
  return {std::cos(ang), std::sin(ang)};
}

// Phase of the displacement basis element B(p,q) = phi(p,q) T^q M^p.
// Pairs {(p,q), (-p,-q)} share one symmetric phase so that
// B(p,q)^* = B(-p,-q) holds for every pair, including the n/2 boundary.
cplx basis_phase(std::size_t p, std::size_t q, std::size_t n) {
  const std::size_t pn = (n - p) % n;
  const std::size_t qn = (n - q) % n;
  const bool canonical = p * n + q <= pn * n + qn;
  if (canonical) {
    const double ang = kPi * static_cast<double>(centered(p, n) * centered(q, n)) /
                       static_cast<double>(n);
    return {std::cos(ang), std::sin(ang)};
  }
  const double ang = kPi * static_cast<double>(centered(pn, n) * centered(qn, n)) /
                     static_cast<double>(n);
  return std::conj(cplx{std::cos(ang), std::sin(ang)}) * omega_pow(pn * qn, n);
}

void check_dimension(std::size_t n) {
  if (n < 2) fail(ErrorKind::InvalidArgument, "operator dimension must be at least 2");
  if (n % 2 != 0) fail(ErrorKind::InvalidArgument, "operator dimension must be even");
  if (n > kMaxDimension)
    fail(ErrorKind::InvalidArgument, "operator dimension exceeds " + std::to_string(kMaxDimension));
}

}  // namespace

DenseOperator::DenseOperator(std::size_t n) : n_(n), entries_(n * n) {}

DenseOperator DenseOperator::identity(std::size_t n) {
  DenseOperator op(n);
  for (std::size_t i = 0; i < n; ++i) op(i, i) = 1.0;
  return op;
}

DenseOperator DenseOperator::projector(std::span<const double> signal) {
  DenseOperator op(signal.size());
  for (std::size_t r = 0; r < signal.size(); ++r)
    for (std::size_t c = 0; c < signal.size(); ++c) op(r, c) = signal[r] * signal[c];
  return op;
}

double DenseOperator::frobenius_norm() const { return as_eigen(*this).norm(); }

double DenseOperator::hermitian_defect() const {
  const auto m = as_eigen(*this);
  return (m - m.adjoint()).norm();
}

bool DenseOperator::is_hermitian(double rel_tol) const {
  return hermitian_defect() <= rel_tol * std::max(frobenius_norm(), 1e-300);
}

DenseOperator DenseOperator::adjoint() const {
  DenseOperator out(n_);
  as_eigen(out) = as_eigen(*this).adjoint();
  return out;
}

DenseOperator DenseOperator::operator*(const DenseOperator& rhs) const {
  if (rhs.n_ != n_) fail(ErrorKind::InvalidArgument, "operator size mismatch");
  DenseOperator out(n_);
  as_eigen(out).noalias() = as_eigen(*this) * as_eigen(rhs);
  return out;
}

DenseOperator DenseOperator::operator-(const DenseOperator& rhs) const {
  if (rhs.n_ != n_) fail(ErrorKind::InvalidArgument, "operator size mismatch");
  DenseOperator out(n_);
  as_eigen(out) = as_eigen(*this) - as_eigen(rhs);
  return out;
}

std::vector<double> DenseOperator::apply(std::span<const double> x) const {
  if (x.size() != n_) fail(ErrorKind::InvalidArgument, "vector size mismatch");
  std::vector<double> y(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    cplx acc = 0.0;
    for (std::size_t c = 0; c < n_; ++c) acc += (*this)(r, c) * x[c];
    y[r] = acc.real();
  }
  return y;
}

std::vector<std::complex<double>> DenseOperator::apply(std::span<const std::complex<double>> x) const {
  if (x.size() != n_) fail(ErrorKind::InvalidArgument, "vector size mismatch");
  std::vector<cplx> y(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    cplx acc = 0.0;
    for (std::size_t c = 0; c < n_; ++c) acc += (*this)(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

PhaseSymbol weyl_symbol(const DenseOperator& op, PhaseSymbol* imag) {
  const std::size_t n = op.n();
  check_dimension(n);
  ComplexFft fft(n);
  std::vector<cplx> line(n), tmp(n);

  // coef[q * n + p] = tr(B(p,q)^* A)
  std::vector<cplx> coef(n * n);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t t = 0; t < n; ++t) line[t] = op((t + q) % n, t);
    fft.forward(line, tmp);
    for (std::size_t p = 0; p < n; ++p) coef[q * n + p] = std::conj(basis_phase(p, q, n)) * tmp[p];
  }
  // G(t,q) = sum_p coef(p,q) w^{pt}; stored g[t * n + q].
  std::vector<cplx> g(n * n);
  for (std::size_t q = 0; q < n; ++q) {
    std::copy_n(coef.begin() + static_cast<std::ptrdiff_t>(q * n), n, line.begin());
    fft.inverse(line, tmp);
    for (std::size_t t = 0; t < n; ++t) g[t * n + q] = tmp[t];
  }
  const TFGrid grid = TFGrid::dense(n);
  PhaseSymbol re(grid);
  if (imag) *imag = PhaseSymbol(grid);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::copy_n(g.begin() + static_cast<std::ptrdiff_t>(t * n), n, line.begin());
    fft.forward(line, tmp);
    for (std::size_t k = 0; k < n; ++k) {
      re.at(t, k) = tmp[k].real() * inv;
      if (imag) imag->at(t, k) = tmp[k].imag() * inv;
    }
  }
  return re;
}

DenseOperator inverse_weyl(const PhaseSymbol& sym, const PhaseSymbol* imag) {
  const TFGrid& grid = sym.grid();
  if (grid.layout != FreqLayout::FullCircle || grid.n_time != grid.n_freq)
    fail(ErrorKind::InvalidArgument, "inverse_weyl needs a square dense grid");
  const std::size_t n = grid.n_time;
  check_dimension(n);
  if (imag && !(imag->grid() == grid))
    fail(ErrorKind::InvalidArgument, "imaginary part lives on a different grid");

  ComplexFft fft(n);
  std::vector<cplx> line(n), tmp(n);
  std::vector<cplx> g(n * n);  // g[t * n + q]
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < n; ++k)
      line[k] = cplx(sym.at(t, k), imag ? imag->at(t, k) : 0.0);
    fft.inverse(line, tmp);
    std::copy_n(tmp.begin(), n, g.begin() + static_cast<std::ptrdiff_t>(t * n));
  }
  DenseOperator op(n);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t t = 0; t < n; ++t) line[t] = g[t * n + q];
    fft.forward(line, tmp);  // n * coef(p, q)
    for (std::size_t p = 0; p < n; ++p) line[p] = basis_phase(p, q, n) * tmp[p] * inv;
    fft.inverse(line, tmp);  // n * d_q(t)
    for (std::size_t t = 0; t < n; ++t) op((t + q) % n, t) = tmp[t] * inv;
  }
  return op;
}

DenseOperator matrix_function(const DenseOperator& op, const phase_space::ScalarFunction& func) {
  if (!op.is_hermitian(1e-10)) fail(ErrorKind::InvalidArgument, "matrix_function needs a Hermitian operator");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(Eigen::MatrixXcd(as_eigen(op)));
  if (solver.info() != Eigen::Success) fail(ErrorKind::Numerical, "eigendecomposition failed");
  const auto& vals = solver.eigenvalues();
  Eigen::VectorXd fv(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (!func.in_domain(vals[i]))
      fail(ErrorKind::Numerical, std::string("eigenvalue ") + std::to_string(vals[i]) +
                                     " is outside the domain of " + func.name);
    fv[i] = func.f(vals[i]);
  }
  const auto& v = solver.eigenvectors();
  DenseOperator out(op.n());
  as_eigen(out) = v * fv.asDiagonal() * v.adjoint();
  return out;
}

std::vector<double> eigenvalues(const DenseOperator& op) {
  if (!op.is_hermitian(1e-10)) fail(ErrorKind::InvalidArgument, "eigenvalues needs a Hermitian operator");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(Eigen::MatrixXcd(as_eigen(op)),
                                                         Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorKind::Numerical, "eigendecomposition failed");
  const auto& vals = solver.eigenvalues();
  return {vals.data(), vals.data() + vals.size()};
}

PhaseSymbol wigner(std::span<const double> signal) {
  return weyl_symbol(DenseOperator::projector(signal));
}

double trace_pair(const DenseOperator& a, const DenseOperator& b) {
  if (a.n() != b.n()) fail(ErrorKind::InvalidArgument, "trace_pair: size mismatch");
  const std::size_t n = a.n();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * b(j, i);
  return acc.real();
}

double traciality_constant(std::size_t n) {
  const auto id = DenseOperator::identity(n);
  const auto s = weyl_symbol(id);
  double sum = 0.0;
  for (double v : s.values()) sum += v * v;
  return trace_pair(id, id) / sum;
}

PhaseSymbol to_dense(const PhaseSymbol& sym, std::size_t n, std::size_t offset) {
  const TFGrid& g = sym.grid();
  if (g.layout != FreqLayout::OneSided)
    fail(ErrorKind::InvalidArgument, "to_dense expects a one-sided physical grid");
  if ((g.n_time - 1) * g.hop < offset + n - 1)
    fail(ErrorKind::InvalidArgument, "to_dense: symbol does not cover the requested samples");
  PhaseSymbol out(TFGrid::dense(n));
  for (std::size_t t = 0; t < n; ++t) {
    const double u = static_cast<double>(offset + t) / static_cast<double>(g.hop);
    const auto j0 = static_cast<std::size_t>(std::floor(u));
    const std::size_t j1 = std::min(j0 + 1, g.n_time - 1);
    const double wt = u - static_cast<double>(j0);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t kk = std::min(k, n - k);
      const double hz = static_cast<double>(kk) / static_cast<double>(n) * g.sample_rate;
      const double pos = std::min(hz / g.freq_step, static_cast<double>(g.n_freq - 1));
      const auto k0 = static_cast<std::size_t>(std::floor(pos));
      const std::size_t k1 = std::min(k0 + 1, g.n_freq - 1);
      const double wf = pos - static_cast<double>(k0);
      const double a = (1.0 - wf) * sym.at(j0, k0) + wf * sym.at(j0, k1);
      const double b = (1.0 - wf) * sym.at(j1, k0) + wf * sym.at(j1, k1);
      out.at(t, k) = (1.0 - wt) * a + wt * b;
    }
  }
  return out;
}

}  // namespace psycodec::oracle
