#include "psycodec/staircase.hpp"

#include <algorithm>
#include <cmath>

#include "psycodec/error.hpp"

namespace psycodec::calibration {

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Staircase::Staircase(const Options& options) : options_(options), alpha_(options.start_alpha) {
  if (!(options.start_alpha > 0.0)) fail(ErrorKind::InvalidArgument, "staircase start alpha must be positive");
  if (!(options.step > 1.0)) fail(ErrorKind::InvalidArgument, "staircase step must exceed 1");
  if (options.max_reversals < 1 || options.max_trials < 1)
    fail(ErrorKind::InvalidArgument, "staircase limits must be positive");
}

bool Staircase::done() const noexcept {
  return reversals() >= options_.max_reversals || trials_ >= options_.max_trials;
}

void Staircase::respond(bool heard_difference) {
  if (done()) return;
  ++trials_;
  int dir = 0;
  if (heard_difference) {
    no_diff_run_ = 0;
    dir = -1;
  } else if (++no_diff_run_ == 2) {
    no_diff_run_ = 0;
    dir = +1;
  }
  if (dir == 0) return;
  if (direction_ != 0 && dir != direction_) reversal_alphas_.push_back(alpha_);
  direction_ = dir;
  alpha_ = dir > 0 ? alpha_ * options_.step : alpha_ / options_.step;
}

std::optional<double> Staircase::resolved() const {
  if (reversal_alphas_.empty()) return std::nullopt;
  double acc = 0.0;
  for (double a : reversal_alphas_) acc += std::log(a);
  return std::exp(acc / static_cast<double>(reversal_alphas_.size()));
}

CalibrationSession::CalibrationSession(std::vector<std::string> items, Staircase::Options options,
                                       std::uint64_t seed)
    : items_(std::move(items)), rng_state_(seed) {
  if (items_.empty()) fail(ErrorKind::InvalidArgument, "calibration corpus is empty");
  stairs_.assign(items_.size(), Staircase(options));
  draw_arms();
}

void CalibrationSession::draw_arms() { stimulus_is_a_ = (splitmix(rng_state_) >> 63) != 0; }

Arm CalibrationSession::arm(char label) const {
  if (label != 'A' && label != 'B') fail(ErrorKind::InvalidArgument, "arm must be A or B");
  const bool is_a = label == 'A';
  return is_a == stimulus_is_a_ ? Arm::Stimulus : Arm::Original;
}

bool CalibrationSession::respond(std::uint64_t trial_id, bool heard_difference) {
  if (complete() || trial_id != trial_id_) return false;
  Staircase& s = stairs_[item_];
  log_.push_back({trial_id, item_, s.current(), heard_difference, std::chrono::system_clock::now()});
  s.respond(heard_difference);
  if (s.done()) ++item_;
  ++trial_id_;
  draw_arms();
  return true;
}

std::optional<double> CalibrationSession::resolved_alpha() const {
  if (!complete()) return std::nullopt;
  std::optional<double> best;
  for (const auto& s : stairs_)
    if (const auto r = s.resolved()) best = best ? std::min(*best, *r) : *r;
  return best;
}

}  // namespace psycodec::calibration
