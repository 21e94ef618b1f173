#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "psycodec/psychoacoustics.hpp"
#include "psycodec/staircase.hpp"

namespace httplib {
class Server;
}

namespace psycodec::service {

struct ServiceOptions {
  std::string corpus_dir;
  /// Config file the resolved alpha is written into.
  std::string config_path = "psycodec.cfg";
  /// Static UI assets served at "/", if set.
  std::string ui_dir;
  std::uint64_t seed = 1;
  calibration::Staircase::Options staircase;
};

struct Reply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Calibration state machine behind /api/v1. Every request takes the same
/// lock, so requests are applied one at a time in arrival order.
class CalibrationService {
 public:
  explicit CalibrationService(ServiceOptions options);

  Reply create_session(const std::string& body);
  Reply get_session() const;
  Reply get_stimulus(const std::string& item, const std::string& arm);
  Reply post_response(const std::string& body);
  Reply get_result() const;
  Reply post_result();

  /// Registers the API routes (and the UI mount) on `server`.
  void mount(httplib::Server& server);

  const std::vector<std::string>& items() const noexcept { return names_; }

 private:
  struct Item {
    std::string name;
    std::vector<double> samples;
    std::uint32_t sample_rate = 0;
    psycho::MaskingModel model;
  };
  struct Rendered {
    std::uint64_t trial_id = 0;
    std::vector<std::uint8_t> stimulus;
    std::vector<std::uint8_t> original;
  };

  std::string session_json() const;
  const Rendered& render();

  ServiceOptions options_;
  std::vector<Item> corpus_;
  std::vector<std::string> names_;
  std::optional<calibration::CalibrationSession> session_;
  std::optional<Rendered> rendered_;
  std::optional<double> written_alpha_;
  mutable std::mutex mutex_;
};

}  // namespace psycodec::service
