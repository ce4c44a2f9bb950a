#pragma once

#include "mme/audio.hpp"
#include "mme/channel.hpp"
#include "mme/schemes.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mme {

enum class Scheme { Qim, Iqim, Mme };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);
std::string_view to_string(BoundRule rule);
BoundRule parse_bound_rule(std::string_view name);

struct SchemeSpec {
  Scheme scheme = Scheme::Mme;
  LatticeKind lattice = LatticeKind::ZN;
  int dim = 2;  // only used for ZN; other kinds have a fixed dimension
  double delta = 2000.0;
  int rate = 1;              // bits per dimension; IQIM bits per sample
  std::vector<int> nesting;  // explicit J diagonal, overrides rate when set
  double alpha = 0.6569;
  int mantissa_bits = 52;
  BoundRule bound = BoundRule::General;

  int frame_dim() const;
  NestingMatrix nesting_matrix() const;
};

// Resolves "bound" / "bound-ss" / a number into spec.alpha (and spec.bound
// for the self-similar rule).
void apply_alpha_token(SchemeSpec& spec, const std::string& token);

struct FrameEmbedding {
  Vector watermarked;
  Vector anchor;  // fine-lattice point carrying the message
};

struct FrameExtraction {
  std::uint64_t index;
  Vector host_estimate;
  Vector anchor;  // fine-lattice point the decoder settled on
  bool consistent;
};

// One validated scheme behind a common per-frame interface. Messages are
// frame indices in [0, 2^bits_per_frame).
class Codec {
 public:
  static Codec make(const SchemeSpec& spec);

  const SchemeSpec& spec() const { return spec_; }
  int frame_dim() const { return frame_dim_; }
  int bits_per_frame() const { return bits_per_frame_; }
  bool reversible() const { return spec_.scheme != Scheme::Qim; }
  // alpha for MME, beta for IQIM, 1 for QIM.
  double effective_alpha() const;
  double rate() const;
  double fine_packing_radius() const;
  const std::optional<MmeConfig>& mme() const { return mme_; }

  FrameEmbedding embed(const Vector& s, std::uint64_t index) const;
  FrameExtraction extract(const Vector& y) const;
  double gsnr_theoretical(double sigma) const;

 private:
  Codec(SchemeSpec spec, int frame_dim);
  SchemeSpec spec_;
  int frame_dim_;
  int bits_per_frame_ = 0;
  std::optional<NestedPair> pair_;
  std::optional<CosetTable> table_;
  std::optional<MmeConfig> mme_;
  std::optional<IqimConfig> iqim_;
};

struct EmbedStats {
  std::uint64_t frames_total = 0;
  std::uint64_t frames_used = 0;
  std::uint64_t capacity_bits = 0;
  std::uint64_t payload_bits = 0;
  std::uint64_t overflow_samples = 0;  // watermarked samples outside the PCM16 range
  double swr_db = 0.0;
};

struct EmbedOutput {
  AudioClip watermarked;
  EmbedStats stats;
};

// Frames are visited round-robin across channels (frame 0 of every channel,
// then frame 1, ...). Frame g carries payload bits [g*B, (g+1)*B), zero
// padded at the end; frames past the payload and tails are copied verbatim.
std::uint64_t capacity_bits(const AudioClip& clip, const Codec& codec);
EmbedOutput embed_clip(const AudioClip& host, const Codec& codec,
                       std::span<const std::uint8_t> payload_bits);

struct ExtractOutput {
  std::vector<std::uint8_t> bits;
  AudioClip restored;
  std::uint64_t frames_used = 0;
  std::uint64_t inconsistent_frames = 0;
};

ExtractOutput extract_clip(const AudioClip& watermarked, const Codec& codec,
                           std::uint64_t payload_bits);

// Rounds a restored clip to integers when every sample is within `tolerance`
// of one and in the PCM16 range. Returns false (clip untouched) otherwise.
bool snap_to_pcm16(AudioClip& clip, double tolerance = 1e-6);

double mean_power(const AudioClip& clip);

}  // namespace mme
