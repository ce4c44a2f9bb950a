#pragma once

#include "mme/channel.hpp"
#include "mme/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mme {

enum class HostKind { Uniform, Tones, Wav };

HostKind parse_host_kind(std::string_view name);

struct BenchSpec {
  std::vector<Scheme> schemes{Scheme::Mme};
  std::vector<LatticeKind> lattices{LatticeKind::ZN};
  std::vector<int> rates{1};
  std::vector<std::string> alphas{"0.6569"};  // numbers, "bound" or "bound-ss"
  std::vector<double> deltas{2000.0};
  std::vector<double> snrs_db{25.0};          // +inf for a noiseless channel
  int zn_dim = 2;
  int mantissa_bits = 52;
  std::uint64_t frames = 10000;
  std::uint64_t seed = 1;
  HostKind host = HostKind::Uniform;
  double amplitude = 10000.0;  // half-width of the uniform box, or tone peak
  std::optional<std::filesystem::path> wav;
};

// Host samples shared by every cell of a sweep (common random numbers), laid
// out as one long sequence that is cut into frames of the cell's dimension.
std::vector<double> bench_host(const BenchSpec& spec, std::size_t samples);

// Runs one cell. Infeasible parameters produce a row with feasible = false
// and the reason in `note`.
MetricsReport run_cell(const BenchSpec& spec, Scheme scheme, LatticeKind lattice, int rate,
                       const std::string& alpha, double delta, double snr_db,
                       const std::vector<double>& host);

// Full factorial sweep in a fixed cell order (scheme, lattice, rate, alpha,
// delta, snr; last axis fastest).
std::vector<MetricsReport> run_bench(const BenchSpec& spec);

void write_csv(std::ostream& out, const std::vector<MetricsReport>& rows);

}  // namespace mme
