#include "mme/channel.hpp"

#include "mme/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mme {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

AwgnChannel::AwgnChannel(double sigma, std::uint64_t seed, std::uint64_t stream)
    : sigma_(sigma), seed_(seed), engine_(make_engine(seed, stream)), normal_(0.0, 1.0) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw InvalidParameter("noise standard deviation must be finite and >= 0");
}

Vector AwgnChannel::sample(Eigen::Index n) {
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = sigma_ * normal_(engine_);
  return out;
}

Vector AwgnChannel::apply(const Vector& x) {
  if (sigma_ == 0.0) return x;
  return x + sample(x.size());
}

void AwgnChannel::apply_inplace(std::span<double> samples) {
  if (sigma_ == 0.0) return;
  for (double& v : samples) v += sigma_ * normal_(engine_);
}

double snr_to_sigma(double snr_db, double host_power) {
  if (!(host_power > 0.0)) throw InvalidParameter("host power must be positive");
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::sqrt(host_power / std::pow(10.0, snr_db / 10.0));
}

double swr_db(std::span<const double> host, std::span<const double> watermarked) {
  if (host.size() != watermarked.size())
    throw InvalidParameter("swr: host and watermarked lengths differ");
  double signal = 0.0;
  double mark = 0.0;
  for (std::size_t i = 0; i < host.size(); ++i) {
    signal += host[i] * host[i];
    const double w = watermarked[i] - host[i];
    mark += w * w;
  }
  if (mark == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / mark);
}

double gsnr_theoretical(const MmeConfig& cfg, double sigma) {
  const Lattice& fine = cfg.pair().fine;
  const Lattice& coarse = cfg.pair().coarse;
  const double n = cfg.dimension();
  const double one_minus = 1.0 - cfg.alpha();
  const double self =
      one_minus * one_minus * n * coarse.normalized_second_moment() *
      std::pow(coarse.volume(), 2.0 / n);
  const double denom = self + n * sigma * sigma;
  const double num = 4.0 * fine.packing_radius() * fine.packing_radius();
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return num / denom;
}

double gsnr_theoretical_iqim(const IqimConfig& cfg, int dim, double sigma) {
  const double n = dim;
  const double step = cfg.step();
  return step * step / (n * step * step / 3.0 + n * sigma * sigma);
}

double GsnrAccumulator::gsnr(double packing_radius) const {
  if (count_ == 0) throw InvalidParameter("gsnr: no composite noise samples");
  const double mean = mean_energy();
  if (mean == 0.0) return std::numeric_limits<double>::infinity();
  return 4.0 * packing_radius * packing_radius / mean;
}

double gsnr_empirical(std::span<const Vector> composite_noises, const Lattice& fine) {
  if (composite_noises.empty()) throw InvalidParameter("gsnr: empty composite noise list");
  GsnrAccumulator acc;
  for (const auto& v : composite_noises) acc.add(v);
  return acc.gsnr(fine.packing_radius());
}

double ber(const BitMatrix& sent, const BitMatrix& received) {
  if (sent.rows != received.rows || sent.cols != received.cols)
    throw InvalidParameter("ber: bit matrices have different shapes");
  if (sent.bits.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < sent.bits.size(); ++i)
    errors += static_cast<std::size_t>((sent.bits[i] ^ received.bits[i]) & 1u);
  return static_cast<double>(errors) / static_cast<double>(sent.bits.size());
}

void index_to_bits(std::uint64_t index, int width, std::span<std::uint8_t> out) {
  for (int k = 0; k < width; ++k)
    out[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>((index >> (width - 1 - k)) & 1u);
}

std::uint64_t bits_to_index(std::span<const std::uint8_t> bits) {
  std::uint64_t index = 0;
  for (std::uint8_t b : bits) index = (index << 1) | (b & 1u);
  return index;
}

std::string csv_header() {
  return "scheme,lattice,dim,delta,nesting,rate,alpha,effective_alpha,snr_db,sigma,frames,seed,"
         "feasible,note,swr_db,gsnr_empirical,gsnr_theoretical,ber,restore_rmse,"
         "decode_ok_fraction";
}

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv_row(const MetricsReport& r) {
  std::ostringstream os;
  os << r.scheme << ',' << r.lattice << ',' << r.dim << ',' << num(r.delta) << ','
     << quoted(r.nesting) << ',' << num(r.rate) << ',' << num(r.alpha) << ','
     << num(r.effective_alpha) << ',' << num(r.snr_db) << ',' << num(r.sigma) << ',' << r.frames
     << ',' << r.seed << ',' << (r.feasible ? 1 : 0) << ',' << quoted(r.note) << ','
     << num(r.swr_db) << ',' << num(r.gsnr_empirical) << ',' << num(r.gsnr_theoretical) << ','
     << num(r.ber) << ',' << num(r.restore_rmse) << ',' << num(r.decode_ok_fraction);
  return os.str();
}

}  // namespace mme
