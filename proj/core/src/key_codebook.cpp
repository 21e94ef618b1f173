#include "psycodec/key_codebook.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bytes.hpp"
#include "psycodec/container.hpp"
#include "psycodec/error.hpp"

namespace psycodec::codec {

namespace {

// The spline is linear in log(key): exponential sech tails are then exact.
void interp_slice(std::span<const double> knots, std::size_t step, std::span<double> out) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (std::size_t lo = 0; lo + 1 < n; lo += step, ++i) {
    const std::size_t hi = std::min(lo + step, n - 1);
    const double a = knots[i];
    const double b = knots[i + 1];
    const double span = static_cast<double>(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) out[k] = a + (b - a) * (static_cast<double>(k - lo) / span);
  }
  out[n - 1] = knots[i];
}

double slice_error(std::span<const double> col, std::size_t step, std::vector<double>& knots,
                   std::vector<double>& scratch) {
  const std::size_t n = col.size();
  knots.clear();
  for (std::size_t k = 0; k < n - 1; k += step) knots.push_back(col[k]);
  knots.push_back(col[n - 1]);
  scratch.resize(n);
  interp_slice(knots, step, scratch);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(scratch[k] - col[k]));
  return worst;
}

double time_error(const std::vector<double>& logk, std::size_t nf, std::size_t j0, std::size_t j1) {
  const double* a = logk.data() + j0 * nf;
  const double* b = logk.data() + j1 * nf;
  const double span = static_cast<double>(j1 - j0);
  double worst = 0.0;
  for (std::size_t j = j0 + 1; j < j1; ++j) {
    const double w = static_cast<double>(j - j0) / span;
    const double* c = logk.data() + j * nf;
    for (std::size_t k = 0; k < nf; ++k)
      worst = std::max(worst, std::abs(a[k] + (b[k] - a[k]) * w - c[k]));
  }
  return worst;
}

[[noreturn]] void short_key() { throw FormatError(FormatError::Reason::Truncated, "key block truncated"); }

}  // namespace

double KeyCodebook::decode_value(std::uint8_t q) const {
  return std::exp(log_min + (log_max - log_min) * (static_cast<double>(q) / 255.0));
}

std::size_t slice_knots(std::size_t n_freq, std::size_t step) {
  if (n_freq < 2 || step == 0) return n_freq;
  return (n_freq - 2) / step + 2;
}

KeyCodebook pack_key(const PhaseSymbol& key, double frac_tol, PackStats* stats) {
  const TFGrid& g = key.grid();
  if (!(frac_tol > 0.0 && frac_tol < 1.0)) fail(ErrorKind::InvalidArgument, "key tolerance must lie in (0, 1)");
  const std::size_t nt = g.n_time;
  const std::size_t nf = g.n_freq;
  if (nt == 0 || nf < 2) fail(ErrorKind::InvalidArgument, "key grid is empty");

  std::vector<double> logk(key.values().size());
  for (std::size_t i = 0; i < logk.size(); ++i) {
    const double v = key.values()[i];
    if (!(v > 0.0) || !std::isfinite(v))
      fail(ErrorKind::InvalidArgument, "key must be strictly positive and finite");
    logk[i] = std::log(v);
  }
  const auto [mn, mx] = std::ranges::minmax(logk);
  KeyCodebook book;
  book.n_time = static_cast<std::uint32_t>(nt);
  book.n_freq = static_cast<std::uint32_t>(nf);
  book.hop = static_cast<std::uint32_t>(g.hop);
  book.log_min = mn;
  book.log_max = mx;

  // Errors add in the log domain: byte rounding, then frequency, then time.
  const double budget = std::log1p(frac_tol) * 0.98;
  const double half_q = 0.5 * (mx - mn) / 255.0;
  if (half_q >= budget)
    fail(ErrorKind::Numerical, "key dynamic range too large for one-byte knots");
  const double e_f = 0.5 * (budget - half_q);
  const double e_t = budget - half_q - e_f;

  // Time knots: doubling then bisection for the largest admissible step.
  book.time_knots.push_back(0);
  std::size_t j0 = 0;
  while (j0 + 1 < nt) {
    const std::size_t room = nt - 1 - j0;
    std::size_t good = 1;
    std::size_t bad = 0;
    for (std::size_t s = 2;; s *= 2) {
      const std::size_t cand = std::min(s, room);
      if (cand <= good) break;
      if (time_error(logk, nf, j0, j0 + cand) <= e_t) {
        good = cand;
        if (cand == room) break;
      } else {
        bad = cand;
        break;
      }
    }
    while (bad > good + 1) {
      const std::size_t mid = good + (bad - good) / 2;
      if (time_error(logk, nf, j0, j0 + mid) <= e_t) good = mid;
      else bad = mid;
    }
    j0 += good;
    book.time_knots.push_back(static_cast<std::uint32_t>(j0));
  }

  const double scale = mx > mn ? 255.0 / (mx - mn) : 0.0;
  std::vector<double> knots, scratch;
  for (const std::uint32_t j : book.time_knots) {
    std::span<const double> col(logk.data() + static_cast<std::size_t>(j) * nf, nf);
    std::size_t step = 1;
    while (step + 1 < nf && slice_error(col, step + 1, knots, scratch) <= e_f) ++step;
    book.freq_steps.push_back(static_cast<std::uint32_t>(step));
    slice_error(col, step, knots, scratch);
    for (double v : knots)
      book.knot_values.push_back(static_cast<std::uint8_t>(std::lround(std::clamp((v - mn) * scale, 0.0, 255.0))));
  }

  const PhaseSymbol rec = unpack_key(book, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < logk.size(); ++i)
    worst = std::max(worst, std::abs(rec.values()[i] / key.values()[i] - 1.0));
  if (worst > frac_tol)
    fail(ErrorKind::Numerical, "key packing exceeded tolerance: " + std::to_string(worst));
  if (stats) {
    stats->max_fractional_error = worst;
    stats->quantization_error = std::expm1(half_q);
  }
  return book;
}

PhaseSymbol unpack_key(const KeyCodebook& book, const TFGrid& grid) {
  if (grid.n_time != book.n_time || grid.n_freq != book.n_freq || grid.hop != book.hop)
    fail(ErrorKind::InvalidArgument, "key codebook does not match the grid");
  const std::size_t nf = book.n_freq;
  const std::size_t nk = book.time_knots.size();
  if (nk == 0 || book.freq_steps.size() != nk || book.time_knots.front() != 0 ||
      book.time_knots.back() + 1 != book.n_time)
    fail(ErrorKind::Format, "malformed key codebook");

  // Log-domain slices at each time knot.
  std::vector<double> slices(nk * nf);
  std::vector<double> knots;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < nk; ++i) {
    const std::size_t step = book.freq_steps[i];
    if (step == 0 || step > nf - 1) fail(ErrorKind::Format, "malformed key frequency step");
    const std::size_t count = slice_knots(nf, step);
    if (offset + count > book.knot_values.size()) fail(ErrorKind::Format, "key knot values truncated");
    knots.resize(count);
    for (std::size_t c = 0; c < count; ++c)
      knots[c] = book.log_min + (book.log_max - book.log_min) *
                                    (static_cast<double>(book.knot_values[offset + c]) / 255.0);
    offset += count;
    interp_slice(knots, step, std::span<double>(slices.data() + i * nf, nf));
    if (i > 0 && book.time_knots[i] <= book.time_knots[i - 1])
      fail(ErrorKind::Format, "key time knots not ascending");
  }
  if (offset != book.knot_values.size()) fail(ErrorKind::Format, "key has surplus knot values");

  PhaseSymbol out(grid);
  std::size_t seg = 0;
  for (std::size_t j = 0; j < book.n_time; ++j) {
    while (seg + 1 < nk && book.time_knots[seg + 1] < j) ++seg;
    auto col = out.column(j);
    const double* a = slices.data() + seg * nf;
    if (seg + 1 >= nk || j == book.time_knots[seg]) {
      for (std::size_t k = 0; k < nf; ++k) col[k] = std::exp(a[k]);
      continue;
    }
    const double* b = slices.data() + (seg + 1) * nf;
    const double w = static_cast<double>(j - book.time_knots[seg]) /
                     static_cast<double>(book.time_knots[seg + 1] - book.time_knots[seg]);
    for (std::size_t k = 0; k < nf; ++k) col[k] = std::exp(a[k] + (b[k] - a[k]) * w);
  }
  return out;
}

std::vector<std::uint8_t> serialize_key(const KeyCodebook& book) {
  detail::ByteWriter w;
  w.u32(book.n_time);
  w.u32(book.n_freq);
  w.u32(book.hop);
  w.f64(book.log_min);
  w.f64(book.log_max);
  w.varint(book.time_knots.size());
  std::uint32_t prev = 0;
  for (const auto t : book.time_knots) {
    w.varint(t - prev);
    prev = t;
  }
  for (const auto s : book.freq_steps) w.varint(s);
  // Byte deltas along frequency within each slice.
  std::uint8_t last = 0;
  std::size_t offset = 0;
  for (const auto s : book.freq_steps) {
    const std::size_t count = slice_knots(book.n_freq, s);
    for (std::size_t c = 0; c < count && offset + c < book.knot_values.size(); ++c) {
      const std::uint8_t v = book.knot_values[offset + c];
      w.u8(static_cast<std::uint8_t>(v - last));
      last = v;
    }
    last = book.knot_values.empty() ? 0 : book.knot_values[offset];
    offset += count;
  }
  return container::deflate_bytes(w.data());
}

KeyCodebook deserialize_key(std::span<const std::uint8_t> bytes) {
  const auto raw = container::inflate_bytes(bytes);
  detail::ByteReader r(raw, &short_key);
  KeyCodebook book;
  book.n_time = r.u32();
  book.n_freq = r.u32();
  book.hop = r.u32();
  book.log_min = r.f64();
  book.log_max = r.f64();
  if (book.n_freq < 2 || book.n_time == 0) fail(ErrorKind::Format, "malformed key dimensions");
  const std::uint64_t nk = r.varint();
  if (nk == 0 || nk > book.n_time) fail(ErrorKind::Format, "malformed key knot count");
  std::uint64_t t = 0;
  for (std::uint64_t i = 0; i < nk; ++i) {
    t += r.varint();
    if (t >= book.n_time) fail(ErrorKind::Format, "key time knot out of range");
    book.time_knots.push_back(static_cast<std::uint32_t>(t));
  }
  std::size_t total = 0;
  for (std::uint64_t i = 0; i < nk; ++i) {
    const std::uint64_t s = r.varint();
    if (s == 0 || s >= book.n_freq) fail(ErrorKind::Format, "key frequency step out of range");
    book.freq_steps.push_back(static_cast<std::uint32_t>(s));
    total += slice_knots(book.n_freq, s);
  }
  const auto deltas = r.bytes(total);
  std::uint8_t last = 0;
  std::size_t offset = 0;
  book.knot_values.resize(total);
  for (const auto s : book.freq_steps) {
    const std::size_t count = slice_knots(book.n_freq, s);
    for (std::size_t c = 0; c < count; ++c) {
      last = static_cast<std::uint8_t>(last + deltas[offset + c]);
      book.knot_values[offset + c] = last;
    }
    last = book.knot_values[offset];
    offset += count;
  }
  if (r.remaining() != 0) fail(ErrorKind::Format, "trailing bytes in key block");
  return book;
}

}  // namespace psycodec::codec
