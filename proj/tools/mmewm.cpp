// mmewm: embed, extract, restore, attack and bench front end.
//
// Exit codes: 0 ok, 1 other failure, 2 configuration or invalid argument,
// 3 file format, 4 capacity, 5 integrity, 6 precision.

#include "mme/bench.hpp"
#include "mme/errors.hpp"
#include "mme/metadata.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::uint64_t kPayloadStream = 2;
constexpr std::uint64_t kAttackStream = 3;

struct SchemeOptions {
  std::string scheme = "mme";
  std::string lattice = "ZN";
  int dim = 2;
  double delta = 2000.0;
  int rate = 1;
  std::string nesting;
  std::string alpha = "0.6569";
  int mantissa = 52;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--scheme", scheme, "qim, iqim or mme")->capture_default_str();
    app->add_option("--lattice", lattice, "ZN, A2, D3, D4 or E8")->capture_default_str();
    app->add_option("--dim", dim, "dimension of ZN")->capture_default_str();
    app->add_option("--delta", delta, "fine lattice scale")->capture_default_str();
    app->add_option("--rate", rate, "bits per dimension (IQIM: bits per sample)")
        ->capture_default_str();
    app->add_option("--nesting", nesting, "explicit J diagonal, e.g. 2,4 (overrides --rate)");
    app->add_option("--alpha", alpha, "number, 'bound' or 'bound-ss'")->capture_default_str();
    app->add_option("--mantissa", mantissa, "mantissa length L of the sample format")
        ->capture_default_str();
    app->add_option("--seed", seed, "seed for random payloads and noise")->capture_default_str();
  }

  mme::SchemeSpec resolve() const {
    mme::SchemeSpec s;
    s.scheme = mme::parse_scheme(scheme);
    s.lattice = mme::parse_lattice_kind(lattice);
    s.dim = dim;
    s.delta = delta;
    s.rate = rate;
    s.mantissa_bits = mantissa;
    if (!nesting.empty()) s.nesting = mme::NestingMatrix::parse(nesting).diagonal();
    mme::apply_alpha_token(s, alpha);
    return s;
  }
};

json spec_json(const mme::SchemeSpec& s) {
  return {{"scheme", mme::to_string(s.scheme)},
          {"lattice", mme::to_string(s.lattice)},
          {"dim", s.frame_dim()},
          {"delta", s.delta},
          {"rate", s.rate},
          {"nesting", s.nesting_matrix().to_string()},
          {"alpha", s.alpha},
          {"bound", mme::to_string(s.bound)},
          {"mantissa_bits", s.mantissa_bits}};
}

// JSON has no infinity; report it as a string.
json real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double rms_error(const mme::AudioClip& a, const mme::AudioClip& b) {
  if (a.channel_count() != b.channel_count() || a.frames_per_channel() != b.frames_per_channel())
    throw mme::InvalidParameter("reference clip has a different shape");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < a.channel_count(); ++c)
    for (std::size_t i = 0; i < a.channels[c].size(); ++i) {
      const double d = a.channels[c][i] - b.channels[c][i];
      sum += d * d;
      ++n;
    }
  return n ? std::sqrt(sum / static_cast<double>(n)) : 0.0;
}

fs::path default_sidecar(const fs::path& wav) { return fs::path(wav.string() + ".meta"); }

struct EmbedArgs {
  SchemeOptions scheme;
  fs::path in, out, sidecar, message;
  std::int64_t payload_bits = -1;
};

json cmd_embed(const EmbedArgs& a) {
  const mme::SchemeSpec spec = a.scheme.resolve();
  const mme::Codec codec = mme::Codec::make(spec);

  const auto host_bytes = mme::read_file(a.in);
  const mme::AudioClip host = mme::decode_wav(host_bytes);
  const std::uint64_t capacity = mme::capacity_bits(host, codec);

  std::vector<std::uint8_t> bits;
  if (!a.message.empty()) {
    const auto bytes = mme::read_file(a.message);
    bits = mme::unpack_bits(bytes, bytes.size() * 8);
  } else {
    const std::uint64_t count = a.payload_bits < 0 ? capacity : static_cast<std::uint64_t>(a.payload_bits);
    auto engine = mme::make_engine(a.scheme.seed, kPayloadStream);
    std::bernoulli_distribution coin(0.5);
    bits.resize(count);
    for (auto& b : bits) b = coin(engine) ? 1 : 0;
  }

  const mme::EmbedOutput result = mme::embed_clip(host, codec, bits);
  mme::Sidecar meta;
  meta.spec = spec;
  meta.seed = a.scheme.seed;
  meta.payload_bits = bits.size();
  meta.payload_sha256 = mme::payload_digest(bits);
  meta.host_sha256 = mme::sha256_hex(host_bytes);
  meta.channels = static_cast<std::uint32_t>(host.channel_count());
  meta.sample_rate = host.sample_rate;
  meta.samples_per_channel = host.frames_per_channel();
  meta.source_format = host.source_format;

  const fs::path sidecar = a.sidecar.empty() ? default_sidecar(a.out) : a.sidecar;
  mme::wav_write(result.watermarked, a.out, mme::SampleFormat::Float64);
  mme::write_sidecar(meta, sidecar);

  json report = {{"command", "embed"},
                 {"spec", spec_json(spec)},
                 {"output", a.out.string()},
                 {"sidecar", sidecar.string()},
                 {"capacity_bits", capacity},
                 {"payload_bits", bits.size()},
                 {"payload_sha256", meta.payload_sha256},
                 {"frames_total", result.stats.frames_total},
                 {"frames_used", result.stats.frames_used},
                 {"overflow_samples", result.stats.overflow_samples},
                 {"swr_db", real(result.stats.swr_db)}};
  if (const auto& mme = codec.mme(); mme && result.stats.frames_used > 0) {
    // Flat-host distortion per frame, spread over all samples of the clip.
    const auto& coarse = mme->pair().coarse;
    const double n = mme->dimension();
    const double per_frame = mme->alpha() * mme->alpha() * n * coarse.normalized_second_moment() *
                             std::pow(coarse.volume(), 2.0 / n);
    const double samples = static_cast<double>(host.frames_per_channel() * host.channel_count());
    const double mark = per_frame * static_cast<double>(result.stats.frames_used) / samples;
    report["swr_predicted_db"] = real(10.0 * std::log10(mme::mean_power(host) / mark));
  }
  return report;
}

struct ExtractArgs {
  fs::path in, sidecar, payload_out, restored, reference;
  std::string format = "auto";
};

json cmd_extract(const ExtractArgs& a, bool need_restored) {
  const fs::path sidecar_path = a.sidecar.empty() ? default_sidecar(a.in) : a.sidecar;
  const mme::Sidecar meta = mme::read_sidecar(sidecar_path);
  const mme::Codec codec = mme::Codec::make(meta.spec);
  const mme::AudioClip wm = mme::wav_read(a.in);
  mme::check_sidecar(meta, wm);

  mme::ExtractOutput result = mme::extract_clip(wm, codec, meta.payload_bits);
  const std::string digest = mme::payload_digest(result.bits);
  json report = {{"command", need_restored ? "restore" : "extract"},
                 {"spec", spec_json(meta.spec)},
                 {"payload_bits", result.bits.size()},
                 {"payload_sha256", digest},
                 {"payload_digest_match", digest == meta.payload_sha256},
                 {"frames_used", result.frames_used},
                 {"inconsistent_frames", result.inconsistent_frames},
                 {"reversible", codec.reversible()}};
  if (!a.payload_out.empty()) {
    const auto packed = mme::pack_bits(result.bits);
    mme::write_file(a.payload_out, packed);
    report["payload_output"] = a.payload_out.string();
  }
  if (!a.reference.empty())
    report["restore_rmse"] = real(rms_error(result.restored, mme::wav_read(a.reference)));

  if (!a.restored.empty()) {
    // auto: PCM16 when the source was PCM16 and every sample snapped back to
    // an integer, float64 otherwise. Forcing pcm16 fails on a lossy write.
    mme::SampleFormat format = mme::SampleFormat::Float64;
    const bool snapped =
        a.format != "float64" && meta.source_format == mme::SampleFormat::Pcm16 &&
        mme::snap_to_pcm16(result.restored);
    if (a.format == "pcm16" || snapped) format = mme::SampleFormat::Pcm16;
    const auto bytes = mme::encode_wav(result.restored, format);
    const bool exact = mme::sha256_hex(bytes) == meta.host_sha256;
    mme::write_file(a.restored, bytes);
    report["restored_output"] = a.restored.string();
    report["restored_format"] = format == mme::SampleFormat::Pcm16 ? "pcm16" : "float64";
    report["restored_identical"] = exact;
  }
  return report;
}

struct AttackArgs {
  fs::path in, out;
  double snr_db = 25.0;
  std::uint64_t seed = 1;
};

json cmd_attack(const AttackArgs& a) {
  mme::AudioClip clip = mme::wav_read(a.in);
  const double power = mme::mean_power(clip);
  const double sigma = mme::snr_to_sigma(a.snr_db, power);
  mme::AwgnChannel channel(sigma, a.seed, kAttackStream);
  for (auto& ch : clip.channels) channel.apply_inplace(ch);
  mme::wav_write(clip, a.out, mme::SampleFormat::Float64);
  return {{"command", "attack"}, {"output", a.out.string()}, {"snr_db", real(a.snr_db)},
          {"signal_power", power},  {"sigma", sigma},            {"seed", a.seed}};
}

struct BenchArgs {
  std::vector<std::string> schemes{"mme"};
  std::vector<std::string> lattices{"ZN"};
  std::vector<int> rates{1};
  std::vector<std::string> alphas{"0.6569"};
  std::vector<double> deltas{2000.0};
  std::vector<std::string> snrs{"25"};
  int dim = 2;
  int mantissa = 52;
  std::uint64_t frames = 10000;
  std::uint64_t seed = 1;
  std::string host = "uniform";
  double amplitude = 10000.0;
  fs::path wav;
  std::string out = "-";
};

json cmd_bench(const BenchArgs& a) {
  mme::BenchSpec spec;
  spec.schemes.clear();
  for (const auto& s : a.schemes) spec.schemes.push_back(mme::parse_scheme(s));
  spec.lattices.clear();
  for (const auto& l : a.lattices) spec.lattices.push_back(mme::parse_lattice_kind(l));
  spec.rates = a.rates;
  spec.alphas = a.alphas;
  spec.deltas = a.deltas;
  spec.snrs_db.clear();
  for (const auto& s : a.snrs) {
    if (s == "inf" || s == "+inf") {
      spec.snrs_db.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw mme::InvalidParameter("bad SNR value '" + s + "'");
    spec.snrs_db.push_back(v);
  }
  spec.zn_dim = a.dim;
  spec.mantissa_bits = a.mantissa;
  spec.frames = a.frames;
  spec.seed = a.seed;
  spec.host = mme::parse_host_kind(a.host);
  spec.amplitude = a.amplitude;
  if (!a.wav.empty()) spec.wav = a.wav;

  const auto rows = mme::run_bench(spec);
  std::size_t infeasible = 0;
  for (const auto& r : rows) infeasible += r.feasible ? 0 : 1;
  if (a.out == "-") {
    mme::write_csv(std::cout, rows);
    return nullptr;
  }
  std::ofstream csv(a.out);
  if (!csv) throw mme::Error("cannot open '" + a.out + "' for writing");
  mme::write_csv(csv, rows);
  return {{"command", "bench"}, {"output", a.out}, {"rows", rows.size()},
          {"infeasible_rows", infeasible}, {"seed", a.seed}};
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const mme::ConfigError*>(&e) || dynamic_cast<const mme::InvalidParameter*>(&e))
    return 2;
  if (dynamic_cast<const mme::FormatError*>(&e)) return 3;
  if (dynamic_cast<const mme::CapacityError*>(&e)) return 4;
  if (dynamic_cast<const mme::IntegrityError*>(&e)) return 5;
  if (dynamic_cast<const mme::PrecisionError*>(&e)) return 6;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reversible lattice audio watermarking"};
  app.set_config("--config", "", "key = value file; flags given on the command line win");
  app.require_subcommand(1);

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "embed a payload into a WAV file");
  embed.scheme.attach(embed_cmd);
  embed_cmd->add_option("--in", embed.in, "host WAV")->required();
  embed_cmd->add_option("--out", embed.out, "watermarked float64 WAV")->required();
  embed_cmd->add_option("--sidecar", embed.sidecar, "metadata path (default <out>.meta)");
  auto* msg = embed_cmd->add_option("--message", embed.message, "payload file (bytes, MSB first)");
  embed_cmd->add_option("--payload-bits", embed.payload_bits,
                        "number of seeded random payload bits (default: full capacity)")
      ->excludes(msg);

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "recover the payload (and optionally the host)");
  extract_cmd->add_option("--in", extract.in, "watermarked WAV")->required();
  extract_cmd->add_option("--sidecar", extract.sidecar, "metadata path (default <in>.meta)");
  extract_cmd->add_option("--payload-out", extract.payload_out, "write packed payload bytes");
  extract_cmd->add_option("--restored", extract.restored, "write the restored host WAV");
  extract_cmd->add_option("--reference", extract.reference, "original WAV for restore RMSE");
  extract_cmd->add_option("--format", extract.format, "restored sample format")
      ->check(CLI::IsMember({"auto", "pcm16", "float64"}))
      ->capture_default_str();

  ExtractArgs restore;
  auto* restore_cmd = app.add_subcommand("restore", "restore the host WAV");
  restore_cmd->add_option("--in", restore.in, "watermarked WAV")->required();
  restore_cmd->add_option("--sidecar", restore.sidecar, "metadata path (default <in>.meta)");
  restore_cmd->add_option("--out", restore.restored, "restored WAV")->required();
  restore_cmd->add_option("--reference", restore.reference, "original WAV for restore RMSE");
  restore_cmd->add_option("--format", restore.format, "restored sample format")
      ->check(CLI::IsMember({"auto", "pcm16", "float64"}))
      ->capture_default_str();

  AttackArgs attack;
  auto* attack_cmd = app.add_subcommand("attack", "add white Gaussian noise");
  attack_cmd->add_option("--in", attack.in)->required();
  attack_cmd->add_option("--out", attack.out, "noisy float64 WAV")->required();
  attack_cmd->add_option("--snr", attack.snr_db, "signal-to-noise ratio in dB")
      ->capture_default_str();
  attack_cmd->add_option("--seed", attack.seed)->capture_default_str();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "full factorial parameter sweep to CSV");
  bench_cmd->add_option("--schemes", bench.schemes)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--lattices", bench.lattices)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--rates", bench.rates)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--alphas", bench.alphas, "numbers, 'bound' or 'bound-ss'")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--deltas", bench.deltas)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--snrs", bench.snrs, "dB values; 'inf' for no noise")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--dim", bench.dim, "dimension of ZN")->capture_default_str();
  bench_cmd->add_option("--mantissa", bench.mantissa)->capture_default_str();
  bench_cmd->add_option("--frames", bench.frames)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--host", bench.host, "uniform, tones or wav")->capture_default_str();
  bench_cmd->add_option("--amplitude", bench.amplitude)->capture_default_str();
  bench_cmd->add_option("--wav", bench.wav, "host WAV for --host wav");
  bench_cmd->add_option("--out", bench.out, "CSV path, '-' for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json report;
    if (*embed_cmd) report = cmd_embed(embed);
    else if (*extract_cmd) report = cmd_extract(extract, false);
    else if (*restore_cmd) report = cmd_extract(restore, true);
    else if (*attack_cmd) report = cmd_attack(attack);
    else report = cmd_bench(bench);
    if (!report.is_null()) std::cout << report.dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "mmewm: " << e.what() << '\n';
    return exit_code(e);
  }
}
