#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "psycodec/grid.hpp"

namespace psycodec::phase_space {

/// |STFT|^2 with a Gaussian window exp(-(t-t0)^2 / 2a^2), truncated at +-4a,
/// sampled on `grid`. Normalized by sum(w^2) so that white noise of variance
/// s^2 has expected value s^2 in every cell.
PhaseSymbol coherent_state(std::span<const double> signal, const TFGrid& grid);

/// Discrete, unit-mass samples of the separable sech kernel along one axis:
/// sech(pi x / (2 scale)) at x = i * step, i in [-radius, radius].
std::vector<double> sech_taps(double scale, double step);

/// 2-D convolution with k(t,f) = sech(pi t / 2a_t) sech(pi f / 2a_f) / (4 a_t a_f).
/// Edges use half-sample symmetric reflection, which preserves both
/// constants and total mass.
PhaseSymbol sech_smooth(const PhaseSymbol& sym, double a_t, double a_f);

struct BVReport {
  double a_t = 0.0;
  double a_f = 0.0;
  /// max_ratio[n][m] for 1 <= n + m <= 2; other entries are zero.
  std::array<std::array<double, 3>, 3> max_ratio{};
  double planck_product = 0.0;  // 2 pi a_t a_f
  double tolerance = 0.1;

  bool passes() const;
  double worst() const;
};

/// Largest |d^n_t d^m_f A / A| * a_t^n a_f^m over the grid interior.
BVReport bv_check(const PhaseSymbol& sym, double a_t, double a_f, double tolerance = 0.1);

/// Scalar function with derivatives up to third order, for the symbol of a
/// function of an operator.
struct ScalarFunction {
  std::function<double(double)> f;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> d3;
  std::function<bool(double)> in_domain;
  const char* name = "f";

  static ScalarFunction identity();
  static ScalarFunction sqrt();
  static ScalarFunction inv_sqrt();
  static ScalarFunction inverse();
  static ScalarFunction log2();
  /// x^p for real p, domain x > 0.
  static ScalarFunction power(double p);
};

/// Symbol of f(A) from the symbol of A. Order 0 is f applied pointwise;
/// order 1 adds the first derivative correction.
PhaseSymbol symbol_function(const PhaseSymbol& sym, const ScalarFunction& func, int order = 0);

struct MoyalProduct {
  PhaseSymbol real;
  PhaseSymbol imag;
};

/// Moyal star product truncated at `order` (0, 1 or 2). The order-1 term is
/// purely imaginary for real inputs and is returned in `imag`.
MoyalProduct star_moyal(const PhaseSymbol& a, const PhaseSymbol& b, int order);

/// Partial derivatives in physical units (seconds, Hz): central
/// second-order differences, one-sided at the edges.
struct Partials {
  PhaseSymbol t, f, tt, ff, tf;
};
Partials partials(const PhaseSymbol& sym);

/// Gabor-multiplier realization of the operator with symbol `sym`.
/// Frame length 0 picks the power of two nearest 4 * grid.hop (1024 at
/// 44.1 kHz with the default window). The frame hop is always frame / 4.
struct ApplyOptions {
  std::size_t frame = 0;
};

std::size_t apply_frame_length(const TFGrid& grid, const ApplyOptions& opts = {});

std::vector<double> apply_symbol(const PhaseSymbol& sym, std::span<const double> signal,
                                 const ApplyOptions& opts = {});

}  // namespace psycodec::phase_space
