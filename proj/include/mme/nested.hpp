#pragma once

#include "mme/lattice.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mme {

// Diagonal nesting matrix J relating the coarse and fine generators,
// G_c = G_f J.
class NestingMatrix {
 public:
  explicit NestingMatrix(std::vector<int> diagonal);

  // J = factor * I in `dim` dimensions (self-similar shaping).
  static NestingMatrix uniform(int dim, int factor);
  // J = 2^bits * I: `bits` message bits per dimension.
  static NestingMatrix for_rate(int dim, int bits);
  // Parses "2,4" style lists.
  static NestingMatrix parse(const std::string& text);

  const std::vector<int>& diagonal() const { return diag_; }
  int dimension() const { return static_cast<int>(diag_.size()); }
  std::uint64_t determinant() const;
  bool is_self_similar() const;
  // Common diagonal entry; only meaningful when self-similar.
  int similarity_factor() const { return diag_.front(); }
  std::string to_string() const;

 private:
  std::vector<int> diag_;
};

// Fine lattice and the coarse lattice nested inside it.
struct NestedPair {
  Lattice fine;
  Lattice coarse;
  NestingMatrix nesting;
  double rate;  // bits per dimension, log2(det J) / N

  int dimension() const { return fine.dimension(); }
};

// Coarse lattice has generator G_f J. Nesting with unequal diagonal entries
// is only available for ZN, whose rectangular coarse lattice keeps closed-form
// geometric constants.
NestedPair build_nested(LatticeKind kind, double scale, const NestingMatrix& nesting);

// Coset representatives d_i, i in [0, det J), labelled by the mixed-radix
// expansion of i over J's diagonal and reduced into the coarse Voronoi region.
class CosetTable {
 public:
  static constexpr std::uint64_t kDefaultCap = std::uint64_t{1} << 20;

  CosetTable() = default;
  CosetTable(std::vector<Vector> representatives, std::vector<int> radices);

  std::uint64_t size() const { return reps_.size(); }
  const Vector& representative(std::uint64_t index) const;
  const std::vector<Vector>& representatives() const { return reps_; }
  const std::vector<int>& radices() const { return radices_; }

  // Digits of `index` (least significant first).
  Eigen::VectorXi digits(std::uint64_t index) const;
  // Inverse of digits(); coefficients are reduced modulo the radices first.
  std::uint64_t index_of(const Eigen::VectorXi& coefficients) const;

 private:
  std::vector<Vector> reps_;
  std::vector<int> radices_;
};

CosetTable coset_representatives(const NestedPair& pair,
                                 std::uint64_t cap = CosetTable::kDefaultCap);

// Nearest point of the coset d_i + coarse to s.
Vector quantize_to_coset(const NestedPair& pair, const CosetTable& table, std::uint64_t index,
                         const Vector& s);

// Minimum-distance coset decision: reduce the nearest fine point into the
// coarse Voronoi region and invert the labelling.
std::uint64_t decode_coset(const NestedPair& pair, const CosetTable& table, const Vector& y);

}  // namespace mme
