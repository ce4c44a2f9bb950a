#include "mme/bench.hpp"

#include "mme/audio.hpp"
#include "mme/errors.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace mme {
namespace {

constexpr std::uint64_t kHostStream = 1;
constexpr std::uint64_t kPayloadStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr int kWidestFrame = 8;

MetricsReport infeasible(MetricsReport r, const std::string& why) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.feasible = false;
  r.note = why;
  r.swr_db = r.gsnr_empirical = r.gsnr_theoretical = r.ber = r.restore_rmse = nan;
  r.decode_ok_fraction = nan;
  return r;
}

}  // namespace

HostKind parse_host_kind(std::string_view name) {
  if (name == "uniform") return HostKind::Uniform;
  if (name == "tones") return HostKind::Tones;
  if (name == "wav") return HostKind::Wav;
  throw InvalidParameter("unknown host kind '" + std::string(name) +
                         "' (expected uniform, tones or wav)");
}

std::vector<double> bench_host(const BenchSpec& spec, std::size_t samples) {
  std::vector<double> host;
  switch (spec.host) {
    case HostKind::Uniform: {
      auto engine = make_engine(spec.seed, kHostStream);
      std::uniform_real_distribution<double> dist(-spec.amplitude, spec.amplitude);
      host.resize(samples);
      for (double& v : host) v = dist(engine);
      break;
    }
    case HostKind::Tones: {
      constexpr double freqs[] = {440.0, 1234.5, 3111.0};
      constexpr double rate = 44100.0;
      host.resize(samples);
      for (std::size_t i = 0; i < samples; ++i) {
        double v = 0.0;
        for (double f : freqs) v += std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / rate);
        host[i] = std::round(spec.amplitude / 3.0 * v);
      }
      break;
    }
    case HostKind::Wav: {
      if (!spec.wav) throw InvalidParameter("host kind 'wav' needs a WAV path");
      const AudioClip clip = wav_read(*spec.wav);
      for (const auto& ch : clip.channels) host.insert(host.end(), ch.begin(), ch.end());
      if (host.size() > samples) host.resize(samples);
      break;
    }
  }
  return host;
}

MetricsReport run_cell(const BenchSpec& spec, Scheme scheme, LatticeKind lattice, int rate,
                       const std::string& alpha, double delta, double snr_db,
                       const std::vector<double>& host) {
  MetricsReport r;
  r.scheme = std::string(to_string(scheme));
  r.lattice = std::string(to_string(lattice));
  r.delta = delta;
  r.rate = rate;
  r.snr_db = snr_db;
  r.seed = spec.seed;
  r.alpha = std::numeric_limits<double>::quiet_NaN();

  SchemeSpec s;
  s.scheme = scheme;
  s.lattice = lattice;
  s.dim = spec.zn_dim;
  s.delta = delta;
  s.rate = rate;
  s.mantissa_bits = spec.mantissa_bits;
  r.dim = s.frame_dim();
  r.nesting = scheme == Scheme::Iqim ? "b=" + std::to_string(rate) : "";

  std::optional<Codec> codec;
  try {
    if (scheme != Scheme::Iqim) r.nesting = s.nesting_matrix().to_string();
    apply_alpha_token(s, alpha);
    r.alpha = s.alpha;
    codec = Codec::make(s);
  } catch (const Error& e) {
    return infeasible(r, e.what());
  }
  r.effective_alpha = codec->effective_alpha();
  r.rate = codec->rate();
  if (scheme == Scheme::Iqim) r.note = "scalar scheme; lattice and alpha ignored";

  const auto dim = static_cast<std::size_t>(r.dim);
  const std::uint64_t frames = std::min<std::uint64_t>(spec.frames, host.size() / dim);
  if (frames == 0) return infeasible(r, "host too short for one frame");
  r.frames = frames;

  double power = 0.0;
  for (std::size_t i = 0; i < frames * dim; ++i) power += host[i] * host[i];
  power /= static_cast<double>(frames * dim);
  if (!(power > 0.0)) return infeasible(r, "host has zero power");
  r.sigma = snr_to_sigma(snr_db, power);

  const int bits = codec->bits_per_frame();
  auto payload_engine = make_engine(spec.seed, kPayloadStream);
  std::uniform_int_distribution<std::uint64_t> message(0, (std::uint64_t{1} << bits) - 1);
  AwgnChannel channel(r.sigma, spec.seed, kNoiseStream);
  const double tol = 1e-6 * delta;

  GsnrAccumulator gsnr;
  double signal = 0.0;
  double mark = 0.0;
  double restore = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t decode_ok = 0;
  try {
    for (std::uint64_t f = 0; f < frames; ++f) {
      const Vector x = Eigen::Map<const Vector>(host.data() + f * dim, static_cast<Eigen::Index>(dim));
      const std::uint64_t index = message(payload_engine);
      const FrameEmbedding emb = codec->embed(x, index);
      signal += x.squaredNorm();
      mark += (emb.watermarked - x).squaredNorm();
      const Vector y = channel.apply(emb.watermarked);
      gsnr.add(y - emb.anchor);
      const FrameExtraction ext = codec->extract(y);
      bit_errors += static_cast<std::uint64_t>(std::popcount(index ^ ext.index));
      restore += (ext.host_estimate - x).squaredNorm();
      decode_ok += (ext.anchor - emb.anchor).norm() <= tol ? 1 : 0;
    }
  } catch (const ConfigError& e) {
    return infeasible(r, e.what());
  }
  const double nf = static_cast<double>(frames);
  r.swr_db = mark == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(signal / mark);
  r.gsnr_empirical = gsnr.gsnr(codec->fine_packing_radius());
  r.gsnr_theoretical = codec->gsnr_theoretical(r.sigma);
  r.ber = static_cast<double>(bit_errors) / (nf * bits);
  r.restore_rmse = std::sqrt(restore / (nf * static_cast<double>(dim)));
  r.decode_ok_fraction = static_cast<double>(decode_ok) / nf;
  return r;
}

std::vector<MetricsReport> run_bench(const BenchSpec& spec) {
  if (spec.schemes.empty() || spec.lattices.empty() || spec.rates.empty() || spec.alphas.empty() ||
      spec.deltas.empty() || spec.snrs_db.empty())
    throw InvalidParameter("every sweep axis needs at least one value");
  const int widest = std::max(kWidestFrame, spec.zn_dim);
  const std::vector<double> host =
      bench_host(spec, static_cast<std::size_t>(spec.frames) * static_cast<std::size_t>(widest));
  std::vector<MetricsReport> rows;
  for (Scheme scheme : spec.schemes)
    for (LatticeKind lattice : spec.lattices)
      for (int rate : spec.rates)
        for (const std::string& alpha : spec.alphas)
          for (double delta : spec.deltas)
            for (double snr : spec.snrs_db)
              rows.push_back(run_cell(spec, scheme, lattice, rate, alpha, delta, snr, host));
  return rows;
}

void write_csv(std::ostream& out, const std::vector<MetricsReport>& rows) {
  out << "# " << kCsvVersion << '\n' << csv_header() << '\n';
  for (const auto& r : rows) out << to_csv_row(r) << '\n';
}

}  // namespace mme
