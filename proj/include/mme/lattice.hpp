#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace mme {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// The optimal low-dimensional quantizers supported by the library. ZN is the
// integer lattice in any dimension; the others have a fixed dimension.
enum class LatticeKind { ZN, A2, D3, D4, E8 };

std::string_view to_string(LatticeKind kind);
LatticeKind parse_lattice_kind(std::string_view name);

// Fixed dimension of a kind, or 0 for ZN.
int natural_dimension(LatticeKind kind);

// Unit-scale generator matrix as printed in the standard quantizer table.
// Columns are the basis vectors. ZN returns the dim x dim identity.
Matrix unit_generator(LatticeKind kind, int dim = 1);

// A scaled copy of one of the supported lattices, with its geometric constants.
//
// The lattice is {G z : z integer}, where G = unit_generator(kind) scaled by
// `scale`. Integer lattices may additionally carry a different scale per axis
// (rectangular shaping of Z^N); every other kind is scaled uniformly.
//
// Instances are immutable values and safe to share between threads.
class Lattice {
 public:
  // Uniformly scaled lattice. `dim` is required for ZN and must match the
  // natural dimension (or be 0) otherwise.
  static Lattice make(LatticeKind kind, double scale, int dim = 0);

  // Z^N with generator diag(axis_scales).
  static Lattice make_rectangular(const Vector& axis_scales);

  LatticeKind kind() const { return kind_; }
  int dimension() const { return static_cast<int>(axis_scales_.size()); }

  // Uniform scale; for a rectangular Z^N this is the first axis scale.
  double scale() const { return axis_scales_[0]; }
  const Vector& axis_scales() const { return axis_scales_; }
  bool is_uniform() const;

  const Matrix& generator() const { return generator_; }
  double packing_radius() const { return r_pack_; }
  double covering_radius() const { return r_cov_; }
  double normalized_second_moment() const { return nsm_; }
  double volume() const { return volume_; }

  // Same lattice with every scale multiplied by `factor`.
  Lattice scaled(double factor) const;
  // Axis-wise multiplication; only valid for ZN or when all factors are equal.
  Lattice scaled(const Vector& factors) const;

  // Nearest lattice point. Exact ties go to the lexicographically smallest
  // candidate.
  Vector closest_point(const Vector& x) const;

  // x - closest_point(x); lies in the fundamental Voronoi region.
  Vector reduce(const Vector& x) const;

  // Integer coefficient vector z with generator() * z == p, for a lattice
  // point p. Rounds the solved coefficients.
  Eigen::VectorXi coefficients(const Vector& p) const;

  // Whether x is a lattice point: residual of solve-and-round below `tol`
  // (amplitude units).
  bool contains(const Vector& x, double tol = 1e-9) const;

  // Absolute tolerance on squared distances under which two candidate lattice
  // points are treated as equidistant from x.
  double tie_tolerance(const Vector& x) const;

 private:
  Lattice() = default;
  void finish();

  LatticeKind kind_ = LatticeKind::ZN;
  Vector axis_scales_;
  Matrix generator_;
  Matrix generator_inverse_;
  double r_pack_ = 0.0;
  double r_cov_ = 0.0;
  double nsm_ = 0.0;
  double volume_ = 0.0;
};

// Free-function surface mirroring the classic names.
Lattice make_lattice(LatticeKind kind, double scale, int dim = 0);
Vector cvp(const Lattice& lattice, const Vector& x);
Vector mod_lattice(const Lattice& lattice, const Vector& x);

// Exhaustive search over {G z : z in [-radius, radius]^N}, pruned only by a
// bound that can never discard the minimizer inside the box. Test oracle;
// deliberately shares nothing with the structured decoders.
Vector cvp_bruteforce(const Lattice& lattice, const Vector& x, int radius);

// Coefficient box radius that provably contains the closest point to x.
int bruteforce_radius(const Lattice& lattice, const Vector& x);

// Lexicographic order with an absolute tolerance on coordinate equality.
bool lex_less(const Vector& a, const Vector& b, double tol);

}  // namespace mme
