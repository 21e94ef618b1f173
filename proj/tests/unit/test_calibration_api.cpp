#include <catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "calibration_service.hpp"
#include "fixtures.hpp"
#include "psycodec/codec.hpp"
#include "psycodec/config.hpp"
#include "psycodec/psychoacoustics.hpp"
#include "psycodec/wav.hpp"

using namespace psycodec;
using json = nlohmann::json;
namespace fs = std::filesystem;
namespace fx = psycodec::testing;

namespace {

// Real server on an ephemeral port, torn down with the fixture.
struct LiveService {
  fs::path dir;
  std::string config;
  service::CalibrationService svc;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  static service::ServiceOptions make_options(const fs::path& dir) {
    service::ServiceOptions o;
    o.corpus_dir = (dir / "corpus").string();
    o.config_path = (dir / "psycodec.cfg").string();
    o.ui_dir = (dir / "ui").string();
    o.seed = 11;
    return o;
  }

  static fs::path prepare(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("psycodec_api_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir / "corpus");
    fs::create_directories(dir / "ui");
    wav::write_wav((dir / "corpus" / "a_vowel.wav").string(), fx::music(fx::Item::Vowel, 1.0), 44100);
    wav::write_wav((dir / "corpus" / "b_plucked.wav").string(), fx::music(fx::Item::Plucked, 1.0), 44100);
    std::ofstream(dir / "corpus" / "notes.txt") << "ignored\n";
    std::ofstream(dir / "ui" / "index.html") << "<html>calibration</html>\n";
    std::ofstream(dir / "psycodec.cfg") << "# listening room\nalpha = 0.1\nseed = 4\n";
    return dir;
  }

  explicit LiveService(const std::string& tag)
      : dir(prepare(tag)), config((dir / "psycodec.cfg").string()), svc(make_options(dir)) {
    svc.mount(server);
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LiveService() {
    server.stop();
    thread.join();
    fs::remove_all(dir);
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(60);
    return c;
  }
};

json body(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

std::string response_body(std::uint64_t id, bool heard) {
  return json{{"trial_id", id}, {"heard_difference", heard}}.dump();
}

double rms_difference(const std::string& a, const std::string& b) {
  const auto wa = wav::parse_wav({reinterpret_cast<const std::uint8_t*>(a.data()), a.size()});
  const auto wb = wav::parse_wav({reinterpret_cast<const std::uint8_t*>(b.data()), b.size()});
  REQUIRE(wa.samples.size() == wb.samples.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < wa.samples.size(); ++i)
    acc += (wa.samples[i] - wb.samples[i]) * (wa.samples[i] - wb.samples[i]);
  return std::sqrt(acc / static_cast<double>(wa.samples.size()));
}

}  // namespace

TEST_CASE("protocol errors", "[calibration]") {
  LiveService live("errors");
  auto c = live.client();

  CHECK(c.Get("/api/v1/session")->status == 404);
  CHECK(c.Get("/api/v1/result")->status == 404);
  CHECK(c.Post("/api/v1/response", response_body(1, true), "application/json")->status == 404);

  CHECK(c.Post("/api/v1/session", "[1,2]", "application/json")->status == 400);
  CHECK(c.Post("/api/v1/session", "{\"seed\": -1}", "application/json")->status == 400);
  auto created = c.Post("/api/v1/session", "{}", "application/json");
  REQUIRE(created->status == 201);
  const auto s = body(created);
  CHECK(s["trial_id"] == 1);
  CHECK(s["current_item"] == 0);
  CHECK(s["items"].size() == 2);
  CHECK(s["items"][0]["name"] == "a_vowel");
  CHECK_FALSE(s.contains("resolved_alpha"));

  // One session at a time.
  CHECK(c.Post("/api/v1/session", "{}", "application/json")->status == 409);

  CHECK(c.Get("/api/v1/stimulus?item=0")->status == 400);
  CHECK(c.Get("/api/v1/stimulus?item=0&arm=C")->status == 400);
  CHECK(c.Get("/api/v1/stimulus?item=zzz&arm=A")->status == 400);
  CHECK(c.Get("/api/v1/stimulus?item=b_plucked&arm=A")->status == 409);
  auto a = c.Get("/api/v1/stimulus?item=a_vowel&arm=A");
  REQUIRE(a->status == 200);
  CHECK(a->get_header_value("Content-Type") == "audio/wav");
  CHECK(a->body.substr(0, 4) == "RIFF");
  // Renders are stable within a trial.
  CHECK(c.Get("/api/v1/stimulus?item=0&arm=A")->body == a->body);

  CHECK(c.Post("/api/v1/response", "{\"trial_id\": 1}", "application/json")->status == 400);
  CHECK(c.Post("/api/v1/response", "{\"trial_id\": \"1\", \"heard_difference\": true}", "application/json")
            ->status == 400);
  CHECK(c.Post("/api/v1/response", "not json", "application/json")->status == 400);
  CHECK(c.Post("/api/v1/response", response_body(2, true), "application/json")->status == 409);
  CHECK(body(c.Get("/api/v1/session"))["responses"] == 0);

  // Zero responses: nothing to write.
  const auto before = [&] {
    std::ifstream in(live.config);
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();
  CHECK(c.Post("/api/v1/result", "", "application/json")->status == 409);
  const auto r = body(c.Get("/api/v1/result"));
  CHECK(r["complete"] == false);
  CHECK(r["resolved_alpha"].is_null());
  CHECK(r["written"] == false);
  std::ifstream in(live.config);
  CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == before);

  auto ok = c.Post("/api/v1/response", response_body(1, false), "application/json");
  REQUIRE(ok->status == 200);
  const auto j = body(ok);
  CHECK(j["trial_id"] == 2);
  CHECK(j["answered"]["trial_id"] == 1);
  CHECK((j["answered"]["stimulus_arm"] == "A" || j["answered"]["stimulus_arm"] == "B"));
  // A stale id after the state moved on.
  CHECK(c.Post("/api/v1/response", response_body(1, false), "application/json")->status == 409);
}

TEST_CASE("UI assets are served next to the API", "[calibration]") {
  LiveService live("ui");
  auto c = live.client();
  auto r = c.Get("/index.html");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->body.find("calibration") != std::string::npos);
  CHECK(c.Get("/missing.js")->status == 404);
}

TEST_CASE("scripted respondent converges and the result feeds the encoder", "[calibration]") {
  LiveService live("converge");
  auto c = live.client();

  // The respondent hears a difference iff the arms differ by more than the
  // stimulus at its threshold would. The threshold sits between staircase
  // levels 0.02 * 1.25^k.
  const double alpha_star = 0.055;
  std::vector<double> limit;
  for (const auto& name : live.svc.items()) {
    const auto audio = wav::read_wav((live.dir / "corpus" / (name + ".wav")).string());
    const auto cfg = load_config(live.config);
    const auto model = psycho::build_masking(audio.samples, audio.sample_rate, cfg.stored().masking);
    const auto st = psycho::stimulus(audio.samples, model, alpha_star, 99);
    REQUIRE(st.headroom_gain == 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < st.samples.size(); ++i)
      acc += (st.samples[i] - audio.samples[i]) * (st.samples[i] - audio.samples[i]);
    limit.push_back(std::sqrt(acc / static_cast<double>(st.samples.size())));
  }

  REQUIRE(c.Post("/api/v1/session", "{\"seed\": 3}", "application/json")->status == 201);
  int trials = 0, stimulus_on_a = 0;
  for (;;) {
    const auto s = body(c.Get("/api/v1/session"));
    if (s["complete"] == true) break;
    REQUIRE(++trials < 400);
    const auto item = s["current_item"].get<std::size_t>();
    const auto id = s["trial_id"].get<std::uint64_t>();
    const auto path = "/api/v1/stimulus?item=" + std::to_string(item);
    auto a = c.Get(path + "&arm=A");
    auto b = c.Get(path + "&arm=B");
    REQUIRE(a->status == 200);
    REQUIRE(b->status == 200);
    REQUIRE(a->body != b->body);
    const bool heard = rms_difference(a->body, b->body) > limit[item];
    const auto reply = body(c.Post("/api/v1/response", response_body(id, heard), "application/json"));
    REQUIRE(reply["answered"]["trial_id"] == id);
    stimulus_on_a += reply["answered"]["stimulus_arm"] == "A";
  }
  // Arm order is randomized, not fixed.
  CHECK(stimulus_on_a > 0);
  CHECK(stimulus_on_a < trials);

  const auto done = body(c.Get("/api/v1/session"));
  CHECK(done["current_item"].is_null());
  for (const auto& it : done["items"]) CHECK(it["reversals"] == 8);
  const double resolved = done["resolved_alpha"].get<double>();
  CHECK(resolved <= alpha_star * 1.25);
  CHECK(resolved >= alpha_star / 1.25);

  const auto result = body(c.Get("/api/v1/result"));
  CHECK(result["resolved_alpha"].get<double>() == resolved);
  double min_item = 1e9;
  for (const auto& it : result["items"]) min_item = std::min(min_item, it["resolved_alpha"].get<double>());
  CHECK(min_item == resolved);

  auto written = c.Post("/api/v1/result", "", "application/json");
  REQUIRE(written->status == 200);
  CHECK(body(c.Get("/api/v1/result"))["written"] == true);

  // Other keys and comments survive; the next encode picks the alpha up.
  const auto cfg = load_config(live.config);
  CHECK(cfg.masking.alpha == resolved);
  CHECK(cfg.seed == 4u);
  std::ifstream in(live.config);
  const std::string text(std::istreambuf_iterator<char>(in), {});
  CHECK(text.find("# listening room") != std::string::npos);
  const auto x = fx::music(fx::Item::Vowel, 0.5);
  const auto stream = codec::encode(x, fx::kRate, cfg);
  CHECK(stream.header.alpha == static_cast<float>(resolved));

  // A finished session makes room for a new one.
  CHECK(c.Post("/api/v1/session", "{}", "application/json")->status == 201);
}
