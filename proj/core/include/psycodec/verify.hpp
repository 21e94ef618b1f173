#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "psycodec/grid.hpp"

namespace psycodec::verify {

/// Smooth positive periodic symbol on TFGrid::dense(n):
/// exp(mu + c cos(2 pi t / n + p1) cos(2 pi k / n + p2)), with c chosen so
/// that 2 pi a_t a_f equals `planck`, where a_t and a_f are the inverse
/// maxima of the logarithmic derivatives.
PhaseSymbol bv_test_symbol(std::size_t n, double planck, double mu = 0.0, std::uint64_t seed = 1);

struct SofooPoint {
  double planck = 0.0;
  double err_order0 = 0.0;  // max relative error of pointwise sqrt vs the exact symbol
  double err_order1 = 0.0;
};

struct OracleReport {
  std::size_t n = 0;
  double roundtrip_error = 0.0;    // max |A - inverse_weyl(weyl_symbol(A))| / max |A|
  double hermitian_defect = 0.0;   // of inverse_weyl(real symbol), relative
  double traciality_constant = 0.0;
  double traciality_error = 0.0;   // relative, random Hermitian pair
  double marginal_t_error = 0.0;   // max abs error / max value
  double marginal_f_error = 0.0;
  std::vector<SofooPoint> sofoo;
  double log_det_bits = 0.0;       // log-determinant check at planck 40
  double symbol_bits = 0.0;
  double log_det_rel_error = 0.0;
};

/// Sofoo sweep at the given Planck products.
std::vector<SofooPoint> sofoo_sweep(std::size_t n, const std::vector<double>& planck,
                                    std::uint64_t seed = 1);

OracleReport run_oracle_suite(std::size_t n, std::uint64_t seed = 1);

}  // namespace psycodec::verify
