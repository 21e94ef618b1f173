#include "psycodec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "psycodec/dense_oracle.hpp"
#include "psycodec/entropy.hpp"
#include "psycodec/error.hpp"
#include "psycodec/fft.hpp"
#include "psycodec/phase_space.hpp"

namespace psycodec::verify {

namespace {

constexpr double kPi = std::numbers::pi;

oracle::DenseOperator random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  oracle::DenseOperator a(n);
  for (std::size_t r = 0; r < n; ++r) {
    a(r, r) = g(rng);
    for (std::size_t c = r + 1; c < n; ++c) {
      a(r, c) = {g(rng), g(rng)};
      a(c, r) = std::conj(a(r, c));
    }
  }
  return a;
}

double max_abs(std::span<const std::complex<double>> v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

PhaseSymbol bv_test_symbol(std::size_t n, double planck, double mu, std::uint64_t seed) {
  if (!(planck > 0.0)) fail(ErrorKind::InvalidArgument, "planck product must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  const double p1 = ph(rng), p2 = ph(rng);
  // a_t = n / (2 pi c), a_f = 1 / (2 pi c)  =>  2 pi a_t a_f = n / (2 pi c^2)
  const double c = std::sqrt(static_cast<double>(n) / (2.0 * kPi * planck));
  PhaseSymbol s(TFGrid::dense(n));
  const double w = 2.0 * kPi / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t k = 0; k < n; ++k)
      s.at(t, k) = std::exp(mu + c * std::cos(w * static_cast<double>(t) + p1) *
                                     std::cos(w * static_cast<double>(k) + p2));
  return s;
}

std::vector<SofooPoint> sofoo_sweep(std::size_t n, const std::vector<double>& planck,
                                    std::uint64_t seed) {
  std::vector<SofooPoint> out;
  const auto root = phase_space::ScalarFunction::sqrt();
  for (double p : planck) {
    const auto a = bv_test_symbol(n, p, 0.0, seed);
    const auto exact = oracle::weyl_symbol(oracle::matrix_function(oracle::inverse_weyl(a), root));
    const auto s0 = phase_space::symbol_function(a, root, 0);
    const auto s1 = phase_space::symbol_function(a, root, 1);
    SofooPoint pt;
    pt.planck = p;
    for (std::size_t i = 0; i < exact.values().size(); ++i) {
      const double e = exact.values()[i];
      pt.err_order0 = std::max(pt.err_order0, std::abs(s0.values()[i] - e) / std::abs(e));
      pt.err_order1 = std::max(pt.err_order1, std::abs(s1.values()[i] - e) / std::abs(e));
    }
    out.push_back(pt);
  }
  return out;
}

OracleReport run_oracle_suite(std::size_t n, std::uint64_t seed) {
  OracleReport r;
  r.n = n;
  std::mt19937_64 rng(seed);

  const auto a = random_hermitian(n, rng);
  const auto back = oracle::inverse_weyl(oracle::weyl_symbol(a));
  r.roundtrip_error = max_abs((back - a).entries()) / max_abs(a.entries());

  const auto real_sym = bv_test_symbol(n, 40.0, 0.0, seed + 1);
  const auto h = oracle::inverse_weyl(real_sym);
  r.hermitian_defect = h.hermitian_defect() / h.frobenius_norm();

  const auto b = random_hermitian(n, rng);
  r.traciality_constant = oracle::traciality_constant(n);
  const auto wa = oracle::weyl_symbol(a);
  const auto wb = oracle::weyl_symbol(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < wa.values().size(); ++i) sum += wa.values()[i] * wb.values()[i];
  const double tr = oracle::trace_pair(a, b);
  r.traciality_error = std::abs(tr - r.traciality_constant * sum) / std::abs(tr);

  std::normal_distribution<double> g;
  std::vector<double> psi(n);
  for (auto& v : psi) v = g(rng);
  const auto w = oracle::wigner(psi);
  std::vector<std::complex<double>> spec(n), in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = psi[i];
  ComplexFft fft(n);
  fft.forward(in, spec);
  const double cell = w.grid().cell_area();
  double mt = 0.0, mf = 0.0, et = 0.0, ef = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w.at(t, k);
    et = std::max(et, std::abs(s * cell - psi[t] * psi[t]));
    mt = std::max(mt, psi[t] * psi[t]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += w.at(t, k);
    const double target = std::norm(spec[k]) / static_cast<double>(n);
    ef = std::max(ef, std::abs(s * cell - target));
    mf = std::max(mf, target);
  }
  r.marginal_t_error = et / mt;
  r.marginal_f_error = ef / mf;

  r.sofoo = sofoo_sweep(n, {10.0, 40.0, 160.0}, seed);

  const auto m = bv_test_symbol(n, 40.0, std::log(8.0), seed + 2);
  const auto ne = codec::noise_entropy(m);
  r.symbol_bits = ne.symbol_bits;
  r.log_det_bits = ne.exact_bits.value_or(0.0);
  r.log_det_rel_error = std::abs(r.symbol_bits - r.log_det_bits) / std::abs(r.log_det_bits);
  return r;
}

}  // namespace psycodec::verify
