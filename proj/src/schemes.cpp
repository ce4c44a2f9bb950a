#include "mme/schemes.hpp"

#include "mme/errors.hpp"

#include <cmath>
#include <sstream>

namespace mme {
namespace {

void require_step(double step) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw InvalidParameter("step size must be positive and finite");
}

double floor_quantize(double x, double step) { return step * std::floor(x / step); }

double dither(int bit, double step) { return bit ? step / 4.0 : -step / 4.0; }

}  // namespace

double qim_scalar_embed(double s, int bit, double step) {
  require_step(step);
  if (bit != 0 && bit != 1) throw InvalidParameter("scalar QIM embeds a single bit");
  const double d = dither(bit, step);
  return floor_quantize(s - d, step) + d;
}

int qim_scalar_decode(double y, double step) {
  require_step(step);
  double best = 0.0;
  int best_bit = 0;
  for (int bit = 0; bit <= 1; ++bit) {
    const double d = dither(bit, step);
    const double nearest = step * std::round((y - d) / step) + d;
    const double dist = std::abs(y - nearest);
    if (bit == 0 || dist < best) {
      best = dist;
      best_bit = bit;
    }
  }
  return best_bit;
}

IqimConfig::IqimConfig(double step, int bits)
    : step_(step), bits_(bits), beta_(1.0 - std::ldexp(1.0, -bits)) {}

IqimConfig IqimConfig::make(double step, int bits) {
  require_step(step);
  if (bits < 1 || bits > 16) throw InvalidParameter("IQIM bits must be in [1, 16]");
  return IqimConfig(step, bits);
}

double iqim_embed(double s, std::uint32_t m, const IqimConfig& cfg) {
  if (m >= cfg.levels())
    throw InvalidParameter("IQIM message " + std::to_string(m) + " out of range for b = " +
                           std::to_string(cfg.bits()));
  const double levels = static_cast<double>(cfg.levels());
  const double gamma = std::floor(s / (levels * cfg.step()));
  const double r = s - levels * gamma * cfg.step();
  return levels * gamma * cfg.step() + static_cast<double>(m) * cfg.step() + r / levels;
}

IqimExtraction iqim_extract(double y, const IqimConfig& cfg) {
  const double levels = static_cast<double>(cfg.levels());
  const double gamma_w = std::floor(y / cfg.step());
  const double r_w = y - gamma_w * cfg.step();
  const double block = std::floor(gamma_w / levels);
  const double m = gamma_w - levels * block;
  return {static_cast<std::uint32_t>(m), levels * block * cfg.step() + levels * r_w};
}

Vector iqim_embed_vector(const Vector& s, std::span<const std::uint32_t> m,
                         const IqimConfig& cfg) {
  if (static_cast<Eigen::Index>(m.size()) != s.size())
    throw InvalidParameter("IQIM message length must match the host dimension");
  Vector out(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k)
    out[k] = iqim_embed(s[k], m[static_cast<std::size_t>(k)], cfg);
  return out;
}

Vector iqim_composite_noise(const Vector& s, std::span<const std::uint32_t> m, const Vector& y,
                            const IqimConfig& cfg) {
  const double levels = static_cast<double>(cfg.levels());
  Vector out(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double gamma = std::floor(s[k] / (levels * cfg.step()));
    const double anchor =
        (levels * gamma + static_cast<double>(m[static_cast<std::size_t>(k)])) * cfg.step();
    out[k] = y[k] - anchor;
  }
  return out;
}

AlphaBounds alpha_lower_bounds(const NestedPair& pair) {
  AlphaBounds b{1.0 - pair.fine.packing_radius() / pair.coarse.covering_radius(), std::nullopt};
  if (pair.nesting.is_self_similar())
    b.self_similar = 1.0 - 1.0 / static_cast<double>(pair.nesting.similarity_factor());
  return b;
}

double alpha_lower_bound(const NestedPair& pair, BoundRule rule) {
  const AlphaBounds b = alpha_lower_bounds(pair);
  if (rule == BoundRule::General) return b.general;
  if (!b.self_similar) throw ConfigError("self-similar alpha bound needs J = Gamma * I");
  return *b.self_similar;
}

double alpha_upper_bound(int mantissa_bits) {
  if (mantissa_bits < 0 || mantissa_bits > 60)
    throw InvalidParameter("mantissa length must be in [0, 60]");
  return 1.0 - std::ldexp(1.0, -(mantissa_bits + 1));
}

MmeConfig::MmeConfig(NestedPair pair, CosetTable table, double alpha, int mantissa_bits,
                     BoundRule rule)
    : pair_(std::move(pair)),
      table_(std::move(table)),
      alpha_(alpha),
      mantissa_bits_(mantissa_bits),
      rule_(rule) {}

MmeConfig MmeConfig::make(NestedPair pair, double alpha, int mantissa_bits, BoundRule rule) {
  if (pair.nesting.determinant() < 2)
    throw ConfigError("MME needs det J >= 2 to carry a message");
  const double lower = alpha_lower_bound(pair, rule);
  const double upper = alpha_upper_bound(mantissa_bits);
  if (!(alpha >= lower) || !(alpha <= upper) || !(alpha > 0.0) || !(alpha < 1.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "alpha = " << alpha << " outside the feasible interval [" << lower << ", " << upper
        << "]";
    throw ConfigError(msg.str());
  }
  CosetTable table = coset_representatives(pair);
  return MmeConfig(std::move(pair), std::move(table), alpha, mantissa_bits, rule);
}

Vector qim_lattice_embed(const NestedPair& pair, const CosetTable& table, std::uint64_t index,
                         const Vector& s) {
  return quantize_to_coset(pair, table, index, s);
}

EmbedResult mme_embed(const Vector& s, std::uint64_t index, const MmeConfig& cfg) {
  const double alpha = cfg.alpha();
  const Vector q = quantize_to_coset(cfg.pair(), cfg.table(), index, s);
  EmbedResult out{alpha * q + (1.0 - alpha) * s, index, s - q};
  // The scaled self-noise must stay in the fine Voronoi cell of q.
  const Vector scaled = out.watermarked - q;
  if (scaled.norm() >= cfg.pair().fine.packing_radius() &&
      !cfg.pair().fine.closest_point(scaled).isZero(0.0)) {
    throw ConfigError("scaled self-noise left the fine Voronoi region; alpha too small");
  }
  return out;
}

RestoreResult mme_extract(const Vector& y, const MmeConfig& cfg) {
  const double alpha = cfg.alpha();
  const NestedPair& pair = cfg.pair();
  const Vector q = pair.fine.closest_point(y);
  const Vector residual = y - q;
  RestoreResult out;
  out.host_estimate = residual / (1.0 - alpha) + q;
  out.message_index = decode_coset(pair, cfg.table(), y);
  const double limit = (1.0 - alpha) * pair.coarse.covering_radius();
  out.composite_noise_ok = residual.norm() <= limit * (1.0 + 1e-9);
  return out;
}

}  // namespace mme
