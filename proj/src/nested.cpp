#include "mme/nested.hpp"

#include "mme/errors.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace mme {

NestingMatrix::NestingMatrix(std::vector<int> diagonal) : diag_(std::move(diagonal)) {
  if (diag_.empty()) throw InvalidParameter("nesting matrix needs at least one entry");
  for (int d : diag_)
    if (d < 1) throw InvalidParameter("nesting entries must be integers >= 1");
}

NestingMatrix NestingMatrix::uniform(int dim, int factor) {
  if (dim < 1) throw InvalidParameter("nesting dimension must be >= 1");
  return NestingMatrix(std::vector<int>(static_cast<std::size_t>(dim), factor));
}

NestingMatrix NestingMatrix::for_rate(int dim, int bits) {
  if (bits < 0 || bits > 20) throw InvalidParameter("rate must be an integer in [0, 20]");
  return uniform(dim, 1 << bits);
}

NestingMatrix NestingMatrix::parse(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      throw InvalidParameter("nesting entry '" + item + "' is not an integer");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw InvalidParameter("nesting entry '" + item + "' is not an integer");
    if (v < 1 || v > (1 << 20)) throw InvalidParameter("nesting entries must be in [1, 2^20]");
    out.push_back(static_cast<int>(v));
  }
  return NestingMatrix(std::move(out));
}

std::uint64_t NestingMatrix::determinant() const {
  std::uint64_t det = 1;
  for (int d : diag_) {
    if (det > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(d))
      throw CapacityError("nesting determinant overflows 64 bits");
    det *= static_cast<std::uint64_t>(d);
  }
  return det;
}

bool NestingMatrix::is_self_similar() const {
  for (int d : diag_)
    if (d != diag_.front()) return false;
  return true;
}

std::string NestingMatrix::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < diag_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(diag_[i]);
  }
  return out;
}

NestedPair build_nested(LatticeKind kind, double scale, const NestingMatrix& nesting) {
  const int n = nesting.dimension();
  const int natural = natural_dimension(kind);
  if (natural != 0 && n != natural)
    throw InvalidParameter("nesting has " + std::to_string(n) + " entries but " +
                           std::string(to_string(kind)) + " has dimension " +
                           std::to_string(natural));
  Lattice fine = Lattice::make(kind, scale, n);
  Vector factors(n);
  for (int i = 0; i < n; ++i) factors[i] = nesting.diagonal()[static_cast<std::size_t>(i)];
  if (kind != LatticeKind::ZN && !nesting.is_self_similar())
    throw InvalidParameter("rectangular nesting is only supported for ZN; " +
                           std::string(to_string(kind)) + " needs J = c*I");
  Lattice coarse = fine.scaled(factors);
  const double rate = std::log2(static_cast<double>(nesting.determinant())) / n;
  return NestedPair{std::move(fine), std::move(coarse), nesting, rate};
}

CosetTable::CosetTable(std::vector<Vector> representatives, std::vector<int> radices)
    : reps_(std::move(representatives)), radices_(std::move(radices)) {}

const Vector& CosetTable::representative(std::uint64_t index) const {
  if (index >= reps_.size())
    throw InvalidParameter("coset index " + std::to_string(index) + " out of range [0, " +
                           std::to_string(reps_.size()) + ")");
  return reps_[index];
}

Eigen::VectorXi CosetTable::digits(std::uint64_t index) const {
  Eigen::VectorXi d(static_cast<Eigen::Index>(radices_.size()));
  for (std::size_t k = 0; k < radices_.size(); ++k) {
    const auto radix = static_cast<std::uint64_t>(radices_[k]);
    d[static_cast<Eigen::Index>(k)] = static_cast<int>(index % radix);
    index /= radix;
  }
  return d;
}

std::uint64_t CosetTable::index_of(const Eigen::VectorXi& coefficients) const {
  std::uint64_t index = 0;
  for (std::size_t k = radices_.size(); k-- > 0;) {
    const int radix = radices_[k];
    int digit = coefficients[static_cast<Eigen::Index>(k)] % radix;
    if (digit < 0) digit += radix;
    index = index * static_cast<std::uint64_t>(radix) + static_cast<std::uint64_t>(digit);
  }
  return index;
}

CosetTable coset_representatives(const NestedPair& pair, std::uint64_t cap) {
  const std::uint64_t count = pair.nesting.determinant();
  if (count > cap)
    throw CapacityError("det J = " + std::to_string(count) + " exceeds the coset table cap of " +
                        std::to_string(cap));
  CosetTable shape({}, pair.nesting.diagonal());
  std::vector<Vector> reps;
  reps.reserve(count);
  const Matrix& g = pair.fine.generator();
  for (std::uint64_t i = 0; i < count; ++i) {
    const Vector point = g * shape.digits(i).cast<double>();
    reps.push_back(pair.coarse.reduce(point));
  }
  return CosetTable(std::move(reps), pair.nesting.diagonal());
}

Vector quantize_to_coset(const NestedPair& pair, const CosetTable& table, std::uint64_t index,
                         const Vector& s) {
  const Vector& d = table.representative(index);
  if (s.size() != d.size()) throw InvalidParameter("quantize_to_coset: dimension mismatch");
  return pair.coarse.closest_point(s - d) + d;
}

std::uint64_t decode_coset(const NestedPair& pair, const CosetTable& table, const Vector& y) {
  const Vector estimate = pair.coarse.reduce(pair.fine.closest_point(y));
  // Fine points G_f z and G_f z' share a coset iff z = z' (mod J), so the
  // label follows from the coefficient vector.
  return table.index_of(pair.fine.coefficients(estimate));
}

}  // namespace mme
