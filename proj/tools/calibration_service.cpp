#include "calibration_service.hpp"

#include <httplib.h>

#include <algorithm>
#include <filesystem>
#include <json.hpp>

#include "psycodec/config.hpp"
#include "psycodec/error.hpp"
#include "psycodec/wav.hpp"

namespace psycodec::service {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

Reply json_reply(int status, const json& j) { return {status, "application/json", j.dump()}; }

Reply error_reply(int status, const std::string& message) {
  return json_reply(status, json{{"error", message}});
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::optional<json> parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

}  // namespace

CalibrationService::CalibrationService(ServiceOptions options) : options_(std::move(options)) {
  if (!fs::is_directory(options_.corpus_dir))
    fail(ErrorKind::Io, "corpus directory '" + options_.corpus_dir + "' does not exist");
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(options_.corpus_dir))
    if (e.is_regular_file() && e.path().extension() == ".wav") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) fail(ErrorKind::InvalidArgument, "corpus '" + options_.corpus_dir + "' has no .wav files");

  // Masking parameters come from the config when it exists.
  codec::CodecConfig cfg;
  if (fs::exists(options_.config_path)) cfg = load_config(options_.config_path);
  for (const auto& p : paths) {
    auto audio = wav::read_wav(p.string());
    Item item;
    item.name = p.stem().string();
    item.sample_rate = audio.sample_rate;
    item.model = psycho::build_masking(audio.samples, audio.sample_rate, cfg.stored().masking);
    item.samples = std::move(audio.samples);
    names_.push_back(item.name);
    corpus_.push_back(std::move(item));
  }
  calibration::Staircase{options_.staircase};  // validates the options early
}

std::string CalibrationService::session_json() const {
  const auto& s = *session_;
  json items = json::array();
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto& st = s.staircase(i);
    items.push_back({{"name", names_[i]}, {"trials", st.trials()}, {"reversals", st.reversals()},
                     {"done", st.done()}});
  }
  json j{{"complete", s.complete()},
         {"trial_id", s.trial_id()},
         {"items", items},
         {"max_reversals", options_.staircase.max_reversals},
         {"responses", s.log().size()}};
  j["current_item"] = s.complete() ? json(nullptr) : json(s.current_item());
  if (s.complete()) {
    // Levels are revealed only once nothing more can be influenced by them.
    const auto r = s.resolved_alpha();
    j["resolved_alpha"] = r ? json(*r) : json(nullptr);
  }
  return json(j).dump();
}

Reply CalibrationService::create_session(const std::string& body) {
  std::lock_guard lock(mutex_);
  const auto req = parse_body(body);
  if (!req) return error_reply(400, "request body must be a JSON object");
  if (session_ && !session_->complete())
    return error_reply(409, "a calibration session is already in progress");
  std::uint64_t seed = options_.seed;
  if (req->contains("seed")) {
    if (!(*req)["seed"].is_number_unsigned()) return error_reply(400, "seed must be a non-negative integer");
    seed = (*req)["seed"].get<std::uint64_t>();
  }
  session_.emplace(names_, options_.staircase, seed);
  rendered_.reset();
  written_alpha_.reset();
  return {201, "application/json", session_json()};
}

Reply CalibrationService::get_session() const {
  std::lock_guard lock(mutex_);
  if (!session_) return error_reply(404, "no calibration session");
  return {200, "application/json", session_json()};
}

const CalibrationService::Rendered& CalibrationService::render() {
  const auto id = session_->trial_id();
  if (rendered_ && rendered_->trial_id == id) return *rendered_;
  const Item& item = corpus_[session_->current_item()];
  const double alpha = session_->staircase(session_->current_item()).current();
  const auto stim = psycho::stimulus(item.samples, item.model, alpha, mix(options_.seed ^ mix(id)));
  // The original is played at the same gain so loudness does not give the arm away.
  std::vector<double> orig(item.samples);
  for (auto& v : orig) v *= stim.headroom_gain;
  rendered_ = Rendered{id, wav::to_wav_bytes(stim.samples, item.sample_rate),
                       wav::to_wav_bytes(orig, item.sample_rate)};
  return *rendered_;
}

Reply CalibrationService::get_stimulus(const std::string& item, const std::string& arm) {
  std::lock_guard lock(mutex_);
  if (!session_) return error_reply(404, "no calibration session");
  if (session_->complete()) return error_reply(409, "session is complete");
  if (arm != "A" && arm != "B") return error_reply(400, "arm must be A or B");
  std::size_t index = 0;
  const auto name = std::find(names_.begin(), names_.end(), item);
  if (name != names_.end()) {
    index = static_cast<std::size_t>(name - names_.begin());
  } else {
    try {
      std::size_t used = 0;
      index = std::stoul(item, &used);
      if (used != item.size()) return error_reply(400, "unknown item '" + item + "'");
    } catch (const std::exception&) {
      return error_reply(400, "unknown item '" + item + "'");
    }
  }
  if (index != session_->current_item())
    return error_reply(409, "item " + item + " is not the current item");
  const auto& r = render();
  const bool stim = session_->arm(arm[0]) == calibration::Arm::Stimulus;
  const auto& bytes = stim ? r.stimulus : r.original;
  return {200, "audio/wav", std::string(bytes.begin(), bytes.end())};
}

Reply CalibrationService::post_response(const std::string& body) {
  std::lock_guard lock(mutex_);
  if (!session_) return error_reply(404, "no calibration session");
  const auto req = parse_body(body);
  if (!req) return error_reply(400, "request body must be a JSON object");
  if (!req->contains("trial_id") || !(*req)["trial_id"].is_number_unsigned())
    return error_reply(400, "trial_id must be a non-negative integer");
  if (!req->contains("heard_difference") || !(*req)["heard_difference"].is_boolean())
    return error_reply(400, "heard_difference must be a boolean");
  if (session_->complete()) return error_reply(409, "session is complete");
  const auto id = (*req)["trial_id"].get<std::uint64_t>();
  const char stim_arm = session_->arm('A') == calibration::Arm::Stimulus ? 'A' : 'B';
  if (!session_->respond(id, (*req)["heard_difference"].get<bool>()))
    return error_reply(409, "trial " + std::to_string(id) + " is not the current trial (" +
                                std::to_string(session_->trial_id()) + ")");
  rendered_.reset();
  json j = json::parse(session_json());
  j["answered"] = {{"trial_id", id}, {"stimulus_arm", std::string(1, stim_arm)}};
  return json_reply(200, j);
}

Reply CalibrationService::get_result() const {
  std::lock_guard lock(mutex_);
  if (!session_) return error_reply(404, "no calibration session");
  json items = json::array();
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto r = session_->staircase(i).resolved();
    items.push_back({{"name", names_[i]}, {"resolved_alpha", r && session_->complete() ? json(*r) : json(nullptr)}});
  }
  const auto r = session_->resolved_alpha();
  return json_reply(200, json{{"complete", session_->complete()},
                              {"resolved_alpha", r ? json(*r) : json(nullptr)},
                              {"items", items},
                              {"written", written_alpha_.has_value()},
                              {"config", options_.config_path}});
}

Reply CalibrationService::post_result() {
  std::lock_guard lock(mutex_);
  if (!session_) return error_reply(404, "no calibration session");
  if (!session_->complete()) return error_reply(409, "session is not complete");
  const auto r = session_->resolved_alpha();
  if (!r) return error_reply(409, "no staircase reached a reversal");
  const double alpha = std::min(*r, 1.0);
  try {
    update_config_alpha(options_.config_path, alpha);
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
  written_alpha_ = alpha;
  return json_reply(200, json{{"alpha", alpha}, {"config", options_.config_path}, {"written", true}});
}

void CalibrationService::mount(httplib::Server& server) {
  const auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Post("/api/v1/session", [this, send](const httplib::Request& q, httplib::Response& s) {
    send(s, create_session(q.body));
  });
  server.Get("/api/v1/session", [this, send](const httplib::Request&, httplib::Response& s) {
    send(s, get_session());
  });
  server.Get("/api/v1/stimulus", [this, send](const httplib::Request& q, httplib::Response& s) {
    if (!q.has_param("item") || !q.has_param("arm")) {
      send(s, error_reply(400, "item and arm are required"));
      return;
    }
    send(s, get_stimulus(q.get_param_value("item"), q.get_param_value("arm")));
  });
  server.Post("/api/v1/response", [this, send](const httplib::Request& q, httplib::Response& s) {
    send(s, post_response(q.body));
  });
  server.Get("/api/v1/result", [this, send](const httplib::Request&, httplib::Response& s) {
    send(s, get_result());
  });
  server.Post("/api/v1/result", [this, send](const httplib::Request&, httplib::Response& s) {
    send(s, post_result());
  });
  if (!options_.ui_dir.empty() && !server.set_mount_point("/", options_.ui_dir))
    fail(ErrorKind::Io, "cannot serve UI directory '" + options_.ui_dir + "'");
}

}  // namespace psycodec::service
