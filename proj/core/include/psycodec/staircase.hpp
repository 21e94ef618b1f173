#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace psycodec::calibration {

/// 2-down-1-up adaptive staircase on a multiplicative scale.
///
/// Two consecutive "no difference" responses raise alpha by `step`; any
/// "difference" lowers it by `step`. A reversal is a change of direction;
/// the run ends after `max_reversals` and resolves to the geometric mean of
/// the alphas at the reversal points.
class Staircase {
 public:
  struct Options {
    double start_alpha = 0.02;
    double step = 1.25;
    int max_reversals = 8;
    int max_trials = 200;
  };

  Staircase() : Staircase(Options{}) {}
  explicit Staircase(const Options& options);

  double current() const noexcept { return alpha_; }
  int reversals() const noexcept { return static_cast<int>(reversal_alphas_.size()); }
  int trials() const noexcept { return trials_; }
  bool done() const noexcept;
  const std::vector<double>& reversal_alphas() const noexcept { return reversal_alphas_; }

  void respond(bool heard_difference);

  /// Geometric mean of the reversal alphas; empty before the first reversal.
  std::optional<double> resolved() const;

 private:
  Options options_;
  double alpha_;
  int trials_ = 0;
  int no_diff_run_ = 0;
  int direction_ = 0;  // +1 rising, -1 falling, 0 none yet
  std::vector<double> reversal_alphas_;
};

struct Response {
  std::uint64_t trial_id = 0;
  std::size_t item = 0;
  double alpha_test = 0.0;
  bool heard_difference = false;
  std::chrono::system_clock::time_point at;
};

/// Arm shown as "A" or "B" for the current trial.
enum class Arm { Original, Stimulus };

/// One listening session over a corpus: a staircase per item, run in order.
/// Trial ids increase by one per response; responses must carry the id of
/// the current trial.
class CalibrationSession {
 public:
  CalibrationSession(std::vector<std::string> items, Staircase::Options options,
                     std::uint64_t seed);

  const std::vector<std::string>& items() const noexcept { return items_; }
  std::size_t current_item() const noexcept { return item_; }
  std::uint64_t trial_id() const noexcept { return trial_id_; }
  bool complete() const noexcept { return item_ >= items_.size(); }
  const Staircase& staircase(std::size_t item) const { return stairs_.at(item); }
  const std::vector<Response>& log() const noexcept { return log_; }

  /// Which arm label ("A" -> index 0, "B" -> 1) carries the stimulus in the
  /// current trial. Randomized per trial from the session seed.
  Arm arm(char label) const;

  /// Applies a response. Returns false (and changes nothing) when the id
  /// does not match the current trial or the session is complete.
  bool respond(std::uint64_t trial_id, bool heard_difference);

  /// min over items of each item's resolved alpha (the most conservative).
  std::optional<double> resolved_alpha() const;

 private:
  void draw_arms();

  std::vector<std::string> items_;
  std::vector<Staircase> stairs_;
  std::size_t item_ = 0;
  std::uint64_t trial_id_ = 1;
  std::uint64_t rng_state_;
  bool stimulus_is_a_ = false;
  std::vector<Response> log_;
};

}  // namespace psycodec::calibration
