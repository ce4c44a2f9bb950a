#pragma once

#include "mme/nested.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace mme {

// ---------------------------------------------------------------------------
// Scalar QIM with dithers d_0 = -step/4, d_1 = +step/4 and the floor quantizer
// Q(x) = step * floor(x / step).

double qim_scalar_embed(double s, int bit, double step);

// Minimum-distance decision between the two dithered lattices; ties go to 0.
int qim_scalar_decode(double y, double step);

// ---------------------------------------------------------------------------
// IQIM: reversible scalar QIM carrying b bits per sample.

class IqimConfig {
 public:
  static IqimConfig make(double step, int bits);

  double step() const { return step_; }
  int bits() const { return bits_; }
  std::uint32_t levels() const { return std::uint32_t{1} << bits_; }
  // Scaling factor 1 - 2^-b.
  double beta() const { return beta_; }

 private:
  IqimConfig(double step, int bits);
  double step_;
  int bits_;
  double beta_;
};

struct IqimExtraction {
  std::uint32_t message;
  double host;
};

double iqim_embed(double s, std::uint32_t m, const IqimConfig& cfg);
IqimExtraction iqim_extract(double y, const IqimConfig& cfg);

Vector iqim_embed_vector(const Vector& s, std::span<const std::uint32_t> m, const IqimConfig& cfg);

// Offset of y from the fine-lattice point that carries message m in the
// same interval, i.e. the IQIM analogue of the composite noise. With a
// noiseless y this is r / 2^b.
Vector iqim_composite_noise(const Vector& s, std::span<const std::uint32_t> m, const Vector& y,
                            const IqimConfig& cfg);

// ---------------------------------------------------------------------------
// Lattice QIM and MME.

enum class BoundRule {
  General,      // 1 - r_pack(fine) / r_cov(coarse)
  SelfSimilar,  // 1 - 1/Gamma, only for J = Gamma * I
};

struct AlphaBounds {
  double general;
  std::optional<double> self_similar;
};

AlphaBounds alpha_lower_bounds(const NestedPair& pair);
double alpha_lower_bound(const NestedPair& pair, BoundRule rule = BoundRule::General);
double alpha_upper_bound(int mantissa_bits);

// Validated MME parameters. Construction fails with ConfigError when alpha
// leaves the feasible interval [lower bound, 1 - 2^-(L+1)].
class MmeConfig {
 public:
  static MmeConfig make(NestedPair pair, double alpha, int mantissa_bits = 52,
                        BoundRule rule = BoundRule::General);

  const NestedPair& pair() const { return pair_; }
  const CosetTable& table() const { return table_; }
  double alpha() const { return alpha_; }
  int mantissa_bits() const { return mantissa_bits_; }
  BoundRule bound_rule() const { return rule_; }
  int dimension() const { return pair_.dimension(); }
  std::uint64_t coset_count() const { return table_.size(); }

 private:
  MmeConfig(NestedPair pair, CosetTable table, double alpha, int mantissa_bits, BoundRule rule);
  NestedPair pair_;
  CosetTable table_;
  double alpha_;
  int mantissa_bits_;
  BoundRule rule_;
};

struct EmbedResult {
  Vector watermarked;
  std::uint64_t coset_index;
  Vector self_noise;  // e = s - Q_{Lambda_i}(s)
};

struct RestoreResult {
  Vector host_estimate;
  std::uint64_t message_index;
  // The residual y - Q_f(y) fits inside (1 - alpha) V_c, i.e. y could have
  // been produced by a noiseless embedding.
  bool composite_noise_ok;
};

// Plain lattice QIM: the host is replaced by its coset quantization.
Vector qim_lattice_embed(const NestedPair& pair, const CosetTable& table, std::uint64_t index,
                         const Vector& s);

// alpha * Q_{Lambda_i}(s) + (1 - alpha) * s.
EmbedResult mme_embed(const Vector& s, std::uint64_t index, const MmeConfig& cfg);

// Inverse map (y - Q_f(y)) / (1 - alpha) + Q_f(y) and the coset decision.
RestoreResult mme_extract(const Vector& y, const MmeConfig& cfg);

}  // namespace mme
