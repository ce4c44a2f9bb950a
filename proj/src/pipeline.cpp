#include "mme/pipeline.hpp"

#include "mme/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>

namespace mme {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// The IQIM frame index is split into per-sample messages, first sample in the
// most significant bits.
std::vector<std::uint32_t> split_index(std::uint64_t index, int dim, int bits) {
  std::vector<std::uint32_t> m(static_cast<std::size_t>(dim));
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  for (int k = dim - 1; k >= 0; --k) {
    m[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(index & mask);
    index >>= bits;
  }
  return m;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Qim: return "qim";
    case Scheme::Iqim: return "iqim";
    case Scheme::Mme: return "mme";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  const std::string n = lower(name);
  if (n == "qim") return Scheme::Qim;
  if (n == "iqim") return Scheme::Iqim;
  if (n == "mme") return Scheme::Mme;
  throw InvalidParameter("unknown scheme '" + std::string(name) + "' (expected qim, iqim or mme)");
}

std::string_view to_string(BoundRule rule) {
  return rule == BoundRule::General ? "general" : "self-similar";
}

BoundRule parse_bound_rule(std::string_view name) {
  const std::string n = lower(name);
  if (n == "general") return BoundRule::General;
  if (n == "self-similar" || n == "ss") return BoundRule::SelfSimilar;
  throw InvalidParameter("unknown bound rule '" + std::string(name) + "'");
}

int SchemeSpec::frame_dim() const {
  if (!nesting.empty()) return static_cast<int>(nesting.size());
  const int natural = natural_dimension(lattice);
  return natural ? natural : dim;
}

NestingMatrix SchemeSpec::nesting_matrix() const {
  if (!nesting.empty()) return NestingMatrix(nesting);
  if (rate < 1 || rate > 30) throw ConfigError("rate must be in [1, 30] bits per dimension");
  return NestingMatrix::for_rate(frame_dim(), rate);
}

void apply_alpha_token(SchemeSpec& spec, const std::string& token) {
  const std::string t = lower(token);
  if (t == "bound" || t == "bound-ss") {
    spec.bound = t == "bound" ? BoundRule::General : BoundRule::SelfSimilar;
    const NestedPair pair = build_nested(spec.lattice, spec.delta, spec.nesting_matrix());
    spec.alpha = alpha_lower_bound(pair, spec.bound);
    return;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw InvalidParameter("alpha must be a number, 'bound' or 'bound-ss', got '" + token + "'");
  spec.alpha = v;
}

Codec::Codec(SchemeSpec spec, int frame_dim) : spec_(std::move(spec)), frame_dim_(frame_dim) {}

Codec Codec::make(const SchemeSpec& spec) {
  if (!(spec.delta > 0.0) || !std::isfinite(spec.delta))
    throw InvalidParameter("delta must be positive and finite");
  const int dim = spec.frame_dim();
  if (dim < 1) throw InvalidParameter("frame dimension must be >= 1");
  Codec c(spec, dim);
  if (spec.scheme == Scheme::Iqim) {
    c.iqim_ = IqimConfig::make(spec.delta, spec.rate);
    if (dim * spec.rate > 63) throw CapacityError("IQIM frame would carry more than 63 bits");
    c.bits_per_frame_ = dim * spec.rate;
    return c;
  }
  const NestingMatrix j = spec.nesting_matrix();
  const std::uint64_t det = j.determinant();
  if (det < 2) throw ConfigError("det J must be >= 2 to carry a message");
  if (!std::has_single_bit(det))
    throw ConfigError("bit payloads need det J to be a power of two, got " + std::to_string(det));
  c.bits_per_frame_ = std::countr_zero(det);
  NestedPair pair = build_nested(spec.lattice, spec.delta, j);
  if (spec.scheme == Scheme::Mme) {
    c.mme_ = MmeConfig::make(std::move(pair), spec.alpha, spec.mantissa_bits, spec.bound);
  } else {
    c.table_ = coset_representatives(pair);
    c.pair_ = std::move(pair);
  }
  return c;
}

double Codec::effective_alpha() const {
  if (mme_) return mme_->alpha();
  if (iqim_) return iqim_->beta();
  return 1.0;
}

double Codec::rate() const {
  if (iqim_) return iqim_->bits();
  return mme_ ? mme_->pair().rate : pair_->rate;
}

double Codec::fine_packing_radius() const {
  if (iqim_) return iqim_->step() / 2.0;
  return mme_ ? mme_->pair().fine.packing_radius() : pair_->fine.packing_radius();
}

FrameEmbedding Codec::embed(const Vector& s, std::uint64_t index) const {
  if (s.size() != frame_dim_) throw InvalidParameter("frame dimension mismatch");
  if (mme_) {
    const EmbedResult r = mme_embed(s, index, *mme_);
    return {r.watermarked, s - r.self_noise};
  }
  if (iqim_) {
    const auto m = split_index(index, frame_dim_, iqim_->bits());
    const Vector y = iqim_embed_vector(s, m, *iqim_);
    return {y, y - iqim_composite_noise(s, m, y, *iqim_)};
  }
  const Vector q = qim_lattice_embed(*pair_, *table_, index, s);
  return {q, q};
}

FrameExtraction Codec::extract(const Vector& y) const {
  if (y.size() != frame_dim_) throw InvalidParameter("frame dimension mismatch");
  if (mme_) {
    const RestoreResult r = mme_extract(y, *mme_);
    return {r.message_index, r.host_estimate, mme_->pair().fine.closest_point(y),
            r.composite_noise_ok};
  }
  if (iqim_) {
    std::uint64_t index = 0;
    Vector host(y.size());
    Vector anchor(y.size());
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      const IqimExtraction e = iqim_extract(y[k], *iqim_);
      index = (index << iqim_->bits()) | e.message;
      host[k] = e.host;
      anchor[k] = iqim_->step() * std::floor(y[k] / iqim_->step());
    }
    return {index, host, anchor, true};
  }
  const Vector q = pair_->fine.closest_point(y);
  return {decode_coset(*pair_, *table_, y), y, q, true};
}

double Codec::gsnr_theoretical(double sigma) const {
  if (mme_) return mme::gsnr_theoretical(*mme_, sigma);
  if (iqim_) return gsnr_theoretical_iqim(*iqim_, frame_dim_, sigma);
  const double r = pair_->fine.packing_radius();
  if (sigma == 0.0) return std::numeric_limits<double>::infinity();
  return 4.0 * r * r / (frame_dim_ * sigma * sigma);
}

std::uint64_t capacity_bits(const AudioClip& clip, const Codec& codec) {
  const std::uint64_t frames = clip.frames_per_channel() / static_cast<std::size_t>(codec.frame_dim());
  return frames * clip.channel_count() * static_cast<std::uint64_t>(codec.bits_per_frame());
}

EmbedOutput embed_clip(const AudioClip& host, const Codec& codec,
                       std::span<const std::uint8_t> payload_bits) {
  const std::uint64_t capacity = capacity_bits(host, codec);
  if (payload_bits.size() > capacity)
    throw CapacityError("payload of " + std::to_string(payload_bits.size()) +
                        " bits exceeds the capacity of " + std::to_string(capacity) + " bits");
  const auto width = static_cast<std::size_t>(codec.bits_per_frame());
  FramedClip framed = frame(host, static_cast<std::size_t>(codec.frame_dim()));
  const std::size_t channels = framed.channels.size();
  const std::uint64_t used = (payload_bits.size() + width - 1) / width;

  EmbedOutput out;
  out.stats.frames_total = capacity / width;
  out.stats.frames_used = used;
  out.stats.capacity_bits = capacity;
  out.stats.payload_bits = payload_bits.size();
  std::vector<std::uint8_t> chunk(width);
  for (std::uint64_t g = 0; g < used; ++g) {
    std::fill(chunk.begin(), chunk.end(), 0);
    const std::size_t begin = g * width;
    const std::size_t n = std::min<std::size_t>(width, payload_bits.size() - begin);
    std::copy_n(payload_bits.begin() + static_cast<std::ptrdiff_t>(begin), n, chunk.begin());
    FrameStream& stream = framed.channels[g % channels];
    const std::size_t k = g / channels;
    const Vector y = codec.embed(stream.frame(k), bits_to_index(chunk)).watermarked;
    for (double v : y) out.stats.overflow_samples += (v < -32768.0 || v > 32767.0) ? 1 : 0;
    stream.set_frame(k, y);
  }
  out.watermarked = deframe(framed);
  double signal = 0.0;
  double mark = 0.0;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < host.channels[c].size(); ++i) {
      const double s = host.channels[c][i];
      const double w = out.watermarked.channels[c][i] - s;
      signal += s * s;
      mark += w * w;
    }
  }
  out.stats.swr_db = mark == 0.0 ? std::numeric_limits<double>::infinity()
                                 : 10.0 * std::log10(signal / mark);
  return out;
}

ExtractOutput extract_clip(const AudioClip& watermarked, const Codec& codec,
                           std::uint64_t payload_bits) {
  const std::uint64_t capacity = capacity_bits(watermarked, codec);
  if (payload_bits > capacity)
    throw IntegrityError("metadata declares " + std::to_string(payload_bits) +
                         " payload bits but the file holds at most " + std::to_string(capacity));
  const auto width = static_cast<std::size_t>(codec.bits_per_frame());
  FramedClip framed = frame(watermarked, static_cast<std::size_t>(codec.frame_dim()));
  const std::size_t channels = framed.channels.size();
  const std::uint64_t used = (payload_bits + width - 1) / width;

  ExtractOutput out;
  out.frames_used = used;
  out.bits.resize(used * width);
  for (std::uint64_t g = 0; g < used; ++g) {
    FrameStream& stream = framed.channels[g % channels];
    const std::size_t k = g / channels;
    const FrameExtraction e = codec.extract(stream.frame(k));
    index_to_bits(e.index, static_cast<int>(width),
                  std::span<std::uint8_t>(out.bits).subspan(g * width, width));
    out.inconsistent_frames += e.consistent ? 0 : 1;
    stream.set_frame(k, e.host_estimate);
  }
  out.bits.resize(payload_bits);
  out.restored = deframe(framed);
  return out;
}

bool snap_to_pcm16(AudioClip& clip, double tolerance) {
  for (const auto& ch : clip.channels)
    for (double v : ch) {
      const double r = std::nearbyint(v);
      if (std::abs(v - r) > tolerance || r < -32768.0 || r > 32767.0) return false;
    }
  for (auto& ch : clip.channels)
    for (double& v : ch) v = std::nearbyint(v);
  clip.source_format = SampleFormat::Pcm16;
  return true;
}

double mean_power(const AudioClip& clip) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& ch : clip.channels) {
    for (double v : ch) sum += v * v;
    n += ch.size();
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace mme
