#include <httplib.h>

#include <CLI11.hpp>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "calibration_service.hpp"
#include "psycodec/codec.hpp"
#include "psycodec/config.hpp"
#include "psycodec/container.hpp"
#include "psycodec/entropy.hpp"
#include "psycodec/error.hpp"
#include "psycodec/psychoacoustics.hpp"
#include "psycodec/verify.hpp"
#include "psycodec/wav.hpp"

namespace {

using namespace psycodec;

// Exit codes. Module errors map one to one onto ErrorKind.
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 64;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return 2;
    case ErrorKind::Numerical: return 3;
    case ErrorKind::Format: return 4;
    case ErrorKind::Io: return 5;
    case ErrorKind::Protocol: return 6;
  }
  return kExitInternal;
}

codec::CodecConfig config_from(const std::string& path) {
  return path.empty() ? codec::CodecConfig{} : load_config(path);
}

void warn_planck(const psycho::MaskingParams& p) {
  if (p.planck_warning())
    std::fprintf(stderr, "warning: 2 pi a_t a_f = %.2f < 10; symbol-calculus approximations degrade\n",
                 p.planck_product());
}

int cmd_encode(const std::string& in, const std::string& out, const std::string& cfg_path, bool noisy,
               unsigned threads) {
  auto cfg = config_from(cfg_path);
  cfg.threads = threads;
  warn_planck(cfg.masking);
  const auto audio = wav::read_wav(in);
  const auto stored = cfg.stored();
  const auto model = psycho::build_masking(audio.samples, audio.sample_rate, stored.masking);
  const auto stream = noisy ? codec::encode_noisy(audio.samples, audio.sample_rate, model, stored)
                            : codec::encode(audio.samples, audio.sample_rate, model, stored);
  const auto bytes = container::write_stream(stream);
  container::write_file(out, bytes);
  const auto key = codec::serialize_key(stream.key);
  const double raw = 2.0 * static_cast<double>(audio.samples.size());
  std::printf("%s: %zu samples, %zu bytes (%.1f%% of 16-bit PCM, key %zu bytes, %.3f bits/sample)\n",
              out.c_str(), audio.samples.size(), bytes.size(), 100.0 * static_cast<double>(bytes.size()) / raw,
              key.size(), 8.0 * static_cast<double>(bytes.size()) / static_cast<double>(audio.samples.size()));
  return 0;
}

codec::EncodedStream read_stream_file(const std::string& path) {
  const auto bytes = container::read_file(path);
  try {
    return container::read_stream(bytes);
  } catch (const FormatError& e) {
    throw FormatError(e.reason(), path + ": " + e.what());
  }
}

int cmd_decode(const std::string& in, const std::string& out) {
  const auto stream = read_stream_file(in);
  const auto samples = codec::decode(stream);
  wav::write_wav(out, samples, stream.header.sample_rate);
  std::printf("%s: %zu samples at %u Hz\n", out.c_str(), samples.size(), stream.header.sample_rate);
  return 0;
}

int cmd_analyze(const std::string& in, const std::string& cfg_path, const std::string& csv,
                std::size_t exact_limit) {
  const auto cfg = config_from(cfg_path).stored();
  warn_planck(cfg.masking);
  const auto audio = wav::read_wav(in);
  const auto model = psycho::build_masking(audio.samples, audio.sample_rate, cfg.masking);
  const auto kl = codec::build_key_lock(model, cfg.lock, cfg.sofoo_order);
  const auto pe = codec::perceptual_entropy(model, &kl.lock);
  const auto power = codec::predicted_encoded_power(model, &kl.lock);
  const auto ne = codec::noise_entropy(model, exact_limit);
  const double n = static_cast<double>(audio.samples.size());

  std::printf("file                 %s\n", in.c_str());
  std::printf("samples              %zu at %u Hz\n", audio.samples.size(), audio.sample_rate);
  std::printf("grid                 %zu x %zu\n", model.grid().n_time, model.grid().n_freq);
  std::printf("2 pi a_t a_f         %.2f\n", cfg.masking.planck_product());
  std::printf("lock                 %s\n", codec::to_string(cfg.lock));
  std::printf("E(encoded^2)         %.4g\n", power);
  std::printf("entropy uniform      %.4f bits/sample (windowed mean %.4f)\n", pe.global_uniform, pe.mean_uniform);
  std::printf("entropy gaussian     %.4f bits/sample (windowed mean %.4f)\n", pe.global_gauss, pe.mean_gauss);
  std::printf("noise entropy        %.4f bits/sample (symbol integral)\n", ne.symbol_bits / n);
  if (ne.exact_bits) std::printf("noise entropy exact  %.4f bits/sample (log det)\n", *ne.exact_bits / n);

  if (!csv.empty()) {
    std::ofstream f(csv);
    if (!f) fail(ErrorKind::Io, "cannot write '" + csv + "'");
    f << "time_s,sigma2,bits_uniform,bits_gauss\n";
    for (std::size_t j = 0; j < pe.sigma2.size(); ++j)
      f << model.grid().time_of(j) << ',' << pe.sigma2[j] << ',' << pe.bits_uniform[j] << ','
        << pe.bits_gauss[j] << '\n';
    if (!f) fail(ErrorKind::Io, "error writing '" + csv + "'");
  }
  return 0;
}

int cmd_stimulus(const std::string& in, const std::string& out, double alpha, std::uint64_t seed,
                 const std::string& cfg_path) {
  const auto cfg = config_from(cfg_path).stored();
  const auto audio = wav::read_wav(in);
  const auto model = psycho::build_masking(audio.samples, audio.sample_rate, cfg.masking);
  const auto st = psycho::stimulus(audio.samples, model, alpha, seed);
  wav::write_wav(out, st.samples, audio.sample_rate);
  std::printf("%s: alpha_test %.4g, seed %llu, headroom gain %.4f\n", out.c_str(), alpha,
              static_cast<unsigned long long>(seed), st.headroom_gain);
  return 0;
}

int cmd_verify(const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  bool ok = true;
  for (const auto n : sizes) {
    const auto r = verify::run_oracle_suite(n, seed);
    std::printf("n = %zu\n", n);
    std::printf("  weyl round trip      %.3e\n", r.roundtrip_error);
    std::printf("  hermitian defect     %.3e\n", r.hermitian_defect);
    std::printf("  traciality constant  %.9g (1/n = %.9g)\n", r.traciality_constant, 1.0 / static_cast<double>(n));
    std::printf("  traciality error     %.3e\n", r.traciality_error);
    std::printf("  marginal t / f       %.3e / %.3e\n", r.marginal_t_error, r.marginal_f_error);
    std::printf("  sofoo sqrt           2 pi a_t a_f   order 0      order 1\n");
    double prev = INFINITY;
    for (const auto& p : r.sofoo) {
      std::printf("                       %-14g %.3e    %.3e\n", p.planck, p.err_order0, p.err_order1);
      ok = ok && p.err_order0 < prev;
      prev = p.err_order0;
    }
    std::printf("  log det vs symbol    %.3f vs %.3f bits (rel %.2e)\n", r.log_det_bits, r.symbol_bits,
                r.log_det_rel_error);
    ok = ok && r.roundtrip_error < 1e-10 && r.traciality_error < 1e-8 && r.marginal_t_error < 1e-8 &&
         r.marginal_f_error < 1e-8;
  }
  std::printf("%s\n", ok ? "verify: ok" : "verify: FAILED");
  return ok ? 0 : exit_code(ErrorKind::Numerical);
}

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(service::ServiceOptions opts, const std::string& host, int port) {
  service::CalibrationService svc(std::move(opts));
  httplib::Server server;
  svc.mount(server);
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorKind::Io, "cannot listen on " + host + ":" + std::to_string(port));
  std::printf("calibration service on http://%s:%d/ (%zu items)\n", host.c_str(), bound, svc.items().size());
  std::fflush(stdout);
  server.listen_after_bind();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psycodec: phase-space perceptual audio codec"};
  app.require_subcommand(1);

  std::string in, out, cfg_path, csv;
  bool noisy = false;
  unsigned threads = 1;
  double alpha = 0.1;
  std::uint64_t seed = 1;
  std::size_t exact_limit = 0;
  std::vector<std::size_t> sizes{256, 1024};

  auto* enc = app.add_subcommand("encode", "encode a 16-bit mono WAV file");
  enc->add_option("input", in, "input WAV")->required()->check(CLI::ExistingFile);
  enc->add_option("output", out, "output stream")->required();
  enc->add_option("--config", cfg_path, "config file")->check(CLI::ExistingFile);
  enc->add_flag("--noisy", noisy, "store only the key and a dither seed");
  enc->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));

  auto* dec = app.add_subcommand("decode", "decode a stream to WAV");
  dec->add_option("input", in, "input stream")->required()->check(CLI::ExistingFile);
  dec->add_option("output", out, "output WAV")->required();

  auto* ana = app.add_subcommand("analyze", "perceptual and noise entropy report");
  ana->add_option("input", in, "input WAV")->required()->check(CLI::ExistingFile);
  ana->add_option("--config", cfg_path, "config file")->check(CLI::ExistingFile);
  ana->add_option("--csv", csv, "write per-column entropy to this CSV file");
  ana->add_option("--exact-limit", exact_limit, "exact log det for signals up to this many samples");

  auto* sti = app.add_subcommand("stimulus", "psi + alpha s^-1(S^1/2) x listening stimulus");
  sti->add_option("input", in, "input WAV")->required()->check(CLI::ExistingFile);
  sti->add_option("output", out, "output WAV")->required();
  sti->add_option("--alpha", alpha, "test threshold scale")->required()->check(CLI::Range(0.0, 1.0));
  sti->add_option("--seed", seed, "noise seed");
  sti->add_option("--config", cfg_path, "config file")->check(CLI::ExistingFile);

  auto* ver = app.add_subcommand("verify", "dense-oracle verification suite");
  ver->add_option("--n", sizes, "matrix sizes")->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
  ver->add_option("--seed", seed, "random seed");

  auto* cal = app.add_subcommand("calibrate", "listening calibration");
  cal->require_subcommand(1);
  auto* srv = cal->add_subcommand("serve", "serve the calibration API under /api/v1");
  service::ServiceOptions sopts;
  std::string host = "127.0.0.1";
  int port = 8080;
  srv->add_option("--corpus", sopts.corpus_dir, "directory of WAV files")->required()->check(CLI::ExistingDirectory);
  srv->add_option("--port", port, "TCP port (0 picks one)")->check(CLI::Range(0, 65535));
  srv->add_option("--host", host, "bind address");
  srv->add_option("--config", sopts.config_path, "config file the resolved alpha is written to");
  srv->add_option("--ui", sopts.ui_dir, "static UI directory served at /")->check(CLI::ExistingDirectory);
  srv->add_option("--seed", sopts.seed, "session seed");
  srv->add_option("--reversals", sopts.staircase.max_reversals, "reversals per item")->check(CLI::PositiveNumber);
  srv->add_option("--start-alpha", sopts.staircase.start_alpha, "initial alpha_test")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*enc) return cmd_encode(in, out, cfg_path, noisy, threads);
    if (*dec) return cmd_decode(in, out);
    if (*ana) return cmd_analyze(in, cfg_path, csv, exact_limit);
    if (*sti) return cmd_stimulus(in, out, alpha, seed, cfg_path);
    if (*ver) return cmd_verify(sizes, seed);
    if (*srv) return cmd_serve(std::move(sopts), host, port);
  } catch (const Error& e) {
    std::fprintf(stderr, "psycodec: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "psycodec: internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
