#pragma once

#include "mme/schemes.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mme {

// Additive white Gaussian noise with a deterministic, seed-derived stream.
// One instance per worker; not safe for concurrent use.
class AwgnChannel {
 public:
  AwgnChannel(double sigma, std::uint64_t seed, std::uint64_t stream = 0);

  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }

  Vector apply(const Vector& x);
  void apply_inplace(std::span<double> samples);
  // Pure noise draw of length n.
  Vector sample(Eigen::Index n);

 private:
  double sigma_;
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// Deterministic engine for a (seed, stream) pair; used for hosts, payloads
// and channels so that every experiment is reproducible from its seed.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream);

// sigma = sqrt(host_power / 10^(snr_db / 10)); +inf dB maps to 0.
double snr_to_sigma(double snr_db, double host_power);

// 10 log10(sum s^2 / sum w^2) with w = watermarked - host. Returns +inf when
// the watermark energy is zero.
double swr_db(std::span<const double> host, std::span<const double> watermarked);

// Closed-form GSNR of MME under the flat-host assumption.
double gsnr_theoretical(const MmeConfig& cfg, double sigma);
// Same for IQIM, whose offset r / 2^b is uniform on [0, step): E = step^2 / 3.
double gsnr_theoretical_iqim(const IqimConfig& cfg, int dim, double sigma);

// 4 r_pack^2 / mean ||v||^2 over the composite noise vectors. +inf when every
// vector is zero.
double gsnr_empirical(std::span<const Vector> composite_noises, const Lattice& fine);

// Streaming form of gsnr_empirical for long runs.
class GsnrAccumulator {
 public:
  void add(const Vector& v) {
    energy_ += v.squaredNorm();
    ++count_;
  }
  void merge(const GsnrAccumulator& other) {
    energy_ += other.energy_;
    count_ += other.count_;
  }
  std::uint64_t count() const { return count_; }
  double mean_energy() const { return count_ ? energy_ / static_cast<double>(count_) : 0.0; }
  double gsnr(double packing_radius) const;

 private:
  double energy_ = 0.0;
  std::uint64_t count_ = 0;
};

// Row-major matrix of bits (one row per frame).
struct BitMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  BitMatrix() = default;
  BitMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), bits(r * c, 0) {}
  std::uint8_t& at(std::size_t r, std::size_t c) { return bits[r * cols + c]; }
  std::uint8_t at(std::size_t r, std::size_t c) const { return bits[r * cols + c]; }
};

double ber(const BitMatrix& sent, const BitMatrix& received);

// Most significant bit first.
void index_to_bits(std::uint64_t index, int width, std::span<std::uint8_t> out);
std::uint64_t bits_to_index(std::span<const std::uint8_t> bits);

struct MetricsReport {
  // Echo of the configuration that produced the numbers.
  std::string scheme;
  std::string lattice;
  int dim = 0;
  double delta = 0.0;
  std::string nesting;
  double rate = 0.0;
  double alpha = 0.0;            // requested scaling factor
  double effective_alpha = 0.0;  // beta for IQIM, 1 for QIM
  double snr_db = 0.0;
  double sigma = 0.0;
  std::uint64_t frames = 0;
  std::uint64_t seed = 0;
  bool feasible = true;
  std::string note;

  double swr_db = 0.0;
  double gsnr_empirical = 0.0;
  double gsnr_theoretical = 0.0;
  double ber = 0.0;
  double restore_rmse = 0.0;
  double decode_ok_fraction = 0.0;
};

// Versioned CSV layout. The first line is a comment naming the version.
inline constexpr const char* kCsvVersion = "mmewm-bench-csv v1";
std::string csv_header();
std::string to_csv_row(const MetricsReport& report);

}  // namespace mme
