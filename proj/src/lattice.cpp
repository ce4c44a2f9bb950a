#include "mme/lattice.hpp"

#include "mme/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mme {
namespace {

// Neighbour sets in unit coordinates, used to resolve exact ties.
struct NeighbourSet {
  Matrix minimal;  // one minimal vector per column (Voronoi-relevant)
  Matrix short_;   // every nonzero vector with norm <= 2 r_cov
};

NeighbourSet build_neighbours(LatticeKind kind) {
  std::vector<Vector> all;
  double limit = 0.0;
  auto push_if = [&](const Vector& v) {
    const double n2 = v.squaredNorm();
    if (n2 > 1e-12 && n2 <= limit + 1e-9) all.push_back(v);
  };
  switch (kind) {
    case LatticeKind::A2: {
      limit = 4.0 / 3.0;
      const Matrix g = unit_generator(kind);
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) push_if(g * Eigen::Vector2d(a, b));
      break;
    }
    case LatticeKind::D3:
    case LatticeKind::D4: {
      limit = 4.0;
      const int n = natural_dimension(kind);
      Eigen::VectorXi z = Eigen::VectorXi::Constant(n, -2);
      while (true) {
        if (z.sum() % 2 == 0) push_if(z.cast<double>());
        int k = 0;
        while (k < n && z[k] == 2) z[k++] = -2;
        if (k == n) break;
        ++z[k];
      }
      break;
    }
    case LatticeKind::E8: {
      limit = 4.0;
      Eigen::VectorXi z = Eigen::VectorXi::Constant(8, -2);
      while (true) {
        if (z.sum() % 2 == 0) push_if(z.cast<double>());
        int k = 0;
        while (k < 8 && z[k] == 2) z[k++] = -2;
        if (k == 8) break;
        ++z[k];
      }
      // Half-integer part: entries in {-3/2, -1/2, 1/2, 3/2} with even sum.
      Eigen::VectorXi h = Eigen::VectorXi::Zero(8);  // index into kHalf
      static constexpr double kHalf[4] = {-1.5, -0.5, 0.5, 1.5};
      while (true) {
        Vector v(8);
        for (int i = 0; i < 8; ++i) v[i] = kHalf[h[i]];
        const double s = v.sum();
        if (std::fmod(std::abs(s), 2.0) < 1e-9) push_if(v);
        int k = 0;
        while (k < 8 && h[k] == 3) h[k++] = 0;
        if (k == 8) break;
        ++h[k];
      }
      break;
    }
    case LatticeKind::ZN:
      break;
  }
  NeighbourSet out;
  if (all.empty()) return out;
  const int n = static_cast<int>(all.front().size());
  double min2 = std::numeric_limits<double>::infinity();
  for (const auto& v : all) min2 = std::min(min2, v.squaredNorm());
  std::vector<Vector> minimal;
  for (const auto& v : all)
    if (v.squaredNorm() <= min2 + 1e-9) minimal.push_back(v);
  out.minimal.resize(n, static_cast<Eigen::Index>(minimal.size()));
  for (std::size_t i = 0; i < minimal.size(); ++i) out.minimal.col(i) = minimal[i];
  out.short_.resize(n, static_cast<Eigen::Index>(all.size()));
  for (std::size_t i = 0; i < all.size(); ++i) out.short_.col(i) = all[i];
  return out;
}

const NeighbourSet& neighbours(LatticeKind kind) {
  static const NeighbourSet a2 = build_neighbours(LatticeKind::A2);
  static const NeighbourSet d3 = build_neighbours(LatticeKind::D3);
  static const NeighbourSet d4 = build_neighbours(LatticeKind::D4);
  static const NeighbourSet e8 = build_neighbours(LatticeKind::E8);
  switch (kind) {
    case LatticeKind::A2: return a2;
    case LatticeKind::D3: return d3;
    case LatticeKind::D4: return d4;
    case LatticeKind::E8: return e8;
    case LatticeKind::ZN: break;
  }
  static const NeighbourSet empty;
  return empty;
}

// Round-to-D_n: round every coordinate, and if the coordinate sum is odd,
// re-round the coordinate with the largest rounding error the other way.
Vector decode_dn(const Vector& u) {
  Vector f = u.array().round();
  long long parity = 0;
  for (Eigen::Index i = 0; i < f.size(); ++i) parity += static_cast<long long>(f[i]);
  if (parity % 2 == 0) return f;
  Eigen::Index worst = 0;
  double worst_err = -1.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double err = std::abs(u[i] - f[i]);
    if (err > worst_err) {
      worst_err = err;
      worst = i;
    }
  }
  f[worst] += (u[worst] > f[worst]) ? 1.0 : -1.0;
  return f;
}

struct Candidate {
  Vector point;
  double dist2;
};

// Strictly nearer, or tied and lexicographically smaller.
bool better(const Candidate& a, const Candidate& b, double tol_d2, double tol_coord) {
  if (a.dist2 < b.dist2 - tol_d2) return true;
  if (a.dist2 > b.dist2 + tol_d2) return false;
  return lex_less(a.point, b.point, tol_coord);
}

Vector decode_a2(const Vector& u, double tol_d2) {
  static const Matrix g = unit_generator(LatticeKind::A2);
  static const Matrix g_inv = g.inverse();
  const Vector z = g_inv * u;
  const double z0 = std::floor(z[0]);
  const double z1 = std::floor(z[1]);
  Candidate best{Vector(), std::numeric_limits<double>::infinity()};
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 1; ++b) {
      Candidate c;
      c.point = g * Eigen::Vector2d(z0 + a, z1 + b);
      c.dist2 = (u - c.point).squaredNorm();
      if (best.point.size() == 0 || better(c, best, tol_d2, 1e-9)) best = std::move(c);
    }
  }
  return best.point;
}

Vector decode_e8(const Vector& u, double tol_d2) {
  const Vector half = Vector::Constant(8, 0.5);
  Candidate even{decode_dn(u), 0.0};
  even.dist2 = (u - even.point).squaredNorm();
  Candidate odd{decode_dn(u - half) + half, 0.0};
  odd.dist2 = (u - odd.point).squaredNorm();
  return better(odd, even, tol_d2, 1e-9) ? odd.point : even.point;
}

// Replace p by the lexicographically smallest lattice point equidistant from u,
// when u sits on the boundary of p's Voronoi cell.
Vector resolve_ties(LatticeKind kind, const Vector& u, Vector p, double r_pack_unit,
                    double tol_d2) {
  const Vector r = u - p;
  const double d2 = r.squaredNorm();
  const double inner = r_pack_unit - 1e-7;
  if (d2 < inner * inner) return p;
  const NeighbourSet& nb = neighbours(kind);
  // Facet slack for minimal vector v: |v|^2/2 - <r, v>; a tie needs slack ~ 0.
  const Eigen::RowVectorXd dots = r.transpose() * nb.minimal;
  const double half_min2 = 0.5 * nb.minimal.col(0).squaredNorm();
  const double max_dot = dots.maxCoeff();
  if (half_min2 - max_dot > tol_d2) return p;

  Candidate best{p, d2};
  for (Eigen::Index j = 0; j < nb.short_.cols(); ++j) {
    Candidate c;
    c.point = p + nb.short_.col(j);
    c.dist2 = (u - c.point).squaredNorm();
    if (better(c, best, tol_d2, 1e-9)) best = std::move(c);
  }
  return best.point;
}

}  // namespace

std::string_view to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::ZN: return "ZN";
    case LatticeKind::A2: return "A2";
    case LatticeKind::D3: return "D3";
    case LatticeKind::D4: return "D4";
    case LatticeKind::E8: return "E8";
  }
  return "?";
}

LatticeKind parse_lattice_kind(std::string_view name) {
  if (name == "ZN" || name == "Z" || name == "zn" || name == "z") return LatticeKind::ZN;
  if (name == "A2" || name == "a2") return LatticeKind::A2;
  if (name == "D3" || name == "d3" || name == "A3" || name == "a3") return LatticeKind::D3;
  if (name == "D4" || name == "d4") return LatticeKind::D4;
  if (name == "E8" || name == "e8") return LatticeKind::E8;
  throw InvalidParameter("unknown lattice kind '" + std::string(name) + "'");
}

int natural_dimension(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::ZN: return 0;
    case LatticeKind::A2: return 2;
    case LatticeKind::D3: return 3;
    case LatticeKind::D4: return 4;
    case LatticeKind::E8: return 8;
  }
  return 0;
}

Matrix unit_generator(LatticeKind kind, int dim) {
  switch (kind) {
    case LatticeKind::ZN:
      if (dim < 1) throw InvalidParameter("ZN needs a dimension >= 1");
      return Matrix::Identity(dim, dim);
    case LatticeKind::A2: {
      Matrix g(2, 2);
      g << std::sqrt(3.0) / 2.0, 0.0,
           0.5, 1.0;
      return g;
    }
    case LatticeKind::D3: {
      Matrix g(3, 3);
      g << -1, 1, 0,
           -1, -1, 1,
           0, 0, -1;
      return g;
    }
    case LatticeKind::D4: {
      Matrix g(4, 4);
      g << 2, 1, 1, 1,
           0, 1, 0, 0,
           0, 0, 1, 0,
           0, 0, 0, 1;
      return g;
    }
    case LatticeKind::E8: {
      Matrix g = Matrix::Zero(8, 8);
      g(0, 0) = 2.0;
      for (int c = 1; c < 7; ++c) {
        g(c - 1, c) = -1.0;
        g(c, c) = 1.0;
      }
      g.col(7).setConstant(0.5);
      return g;
    }
  }
  throw InvalidParameter("unknown lattice kind");
}

Lattice Lattice::make(LatticeKind kind, double scale, int dim) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw InvalidParameter("lattice scale must be positive and finite");
  const int natural = natural_dimension(kind);
  if (kind == LatticeKind::ZN) {
    if (dim < 1) throw InvalidParameter("ZN needs a dimension >= 1");
  } else if (dim != 0 && dim != natural) {
    throw InvalidParameter(std::string(to_string(kind)) + " has dimension " +
                           std::to_string(natural));
  } else {
    dim = natural;
  }
  Lattice l;
  l.kind_ = kind;
  l.axis_scales_ = Vector::Constant(dim, scale);
  l.finish();
  return l;
}

Lattice Lattice::make_rectangular(const Vector& axis_scales) {
  if (axis_scales.size() < 1) throw InvalidParameter("ZN needs a dimension >= 1");
  for (Eigen::Index i = 0; i < axis_scales.size(); ++i)
    if (!(axis_scales[i] > 0.0) || !std::isfinite(axis_scales[i]))
      throw InvalidParameter("lattice scale must be positive and finite");
  Lattice l;
  l.kind_ = LatticeKind::ZN;
  l.axis_scales_ = axis_scales;
  l.finish();
  return l;
}

void Lattice::finish() {
  const int n = dimension();
  const double s = axis_scales_[0];
  switch (kind_) {
    case LatticeKind::ZN: {
      generator_ = axis_scales_.asDiagonal();
      r_pack_ = 0.5 * axis_scales_.minCoeff();
      r_cov_ = 0.5 * axis_scales_.norm();
      volume_ = axis_scales_.prod();
      const double second = axis_scales_.squaredNorm() / 12.0 / n;
      nsm_ = second / std::pow(volume_, 2.0 / n);
      break;
    }
    case LatticeKind::A2:
      generator_ = s * unit_generator(kind_);
      r_pack_ = 0.5 * s;
      r_cov_ = std::sqrt(3.0) / 3.0 * s;
      nsm_ = 0.080188;
      volume_ = std::sqrt(3.0) / 2.0 * s * s;
      break;
    case LatticeKind::D3:
      generator_ = s * unit_generator(kind_);
      r_pack_ = std::sqrt(2.0) / 2.0 * s;
      r_cov_ = s;
      nsm_ = 0.078745;
      volume_ = 2.0 * std::pow(s, 3);
      break;
    case LatticeKind::D4:
      generator_ = s * unit_generator(kind_);
      r_pack_ = std::sqrt(2.0) / 2.0 * s;
      r_cov_ = s;
      nsm_ = 0.076603;
      volume_ = 2.0 * std::pow(s, 4);
      break;
    case LatticeKind::E8:
      generator_ = s * unit_generator(kind_);
      r_pack_ = std::sqrt(2.0) / 2.0 * s;
      r_cov_ = s;
      nsm_ = 0.071682;
      volume_ = std::pow(s, 8);
      break;
  }
  generator_inverse_ = generator_.inverse();
}

bool Lattice::is_uniform() const {
  return (axis_scales_.array() == axis_scales_[0]).all();
}

Lattice Lattice::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidParameter("scale factor must be positive");
  Lattice l;
  l.kind_ = kind_;
  l.axis_scales_ = axis_scales_ * factor;
  l.finish();
  return l;
}

Lattice Lattice::scaled(const Vector& factors) const {
  if (factors.size() != dimension()) throw InvalidParameter("scale factor dimension mismatch");
  if ((factors.array() <= 0.0).any()) throw InvalidParameter("scale factors must be positive");
  if (kind_ != LatticeKind::ZN && !(factors.array() == factors[0]).all())
    throw InvalidParameter("only ZN supports per-axis scaling");
  Lattice l;
  l.kind_ = kind_;
  l.axis_scales_ = axis_scales_.cwiseProduct(factors);
  l.finish();
  return l;
}

double Lattice::tie_tolerance(const Vector& x) const {
  const double mag = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  return 1e-11 * r_cov_ * (r_cov_ + mag);
}

Vector Lattice::closest_point(const Vector& x) const {
  if (x.size() != dimension())
    throw InvalidParameter("cvp: expected dimension " + std::to_string(dimension()) + ", got " +
                           std::to_string(x.size()));
  const double tol = tie_tolerance(x);
  if (kind_ == LatticeKind::ZN) {
    Vector p(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double a = axis_scales_[i];
      const double t = x[i] / a;
      const double f = std::floor(t);
      // Distances to f and f+1 differ by a^2 (2 frac - 1); ties go down.
      const double frac = t - f;
      const double half_band = 0.5 * tol / (a * a);
      p[i] = a * ((frac > 0.5 + half_band) ? f + 1.0 : f);
    }
    return p;
  }
  const double s = axis_scales_[0];
  const Vector u = x / s;
  const double tol_u = tol / (s * s);
  Vector q;
  switch (kind_) {
    case LatticeKind::A2: q = decode_a2(u, tol_u); break;
    case LatticeKind::D3:
    case LatticeKind::D4: q = decode_dn(u); break;
    case LatticeKind::E8: q = decode_e8(u, tol_u); break;
    case LatticeKind::ZN: break;
  }
  q = resolve_ties(kind_, u, std::move(q), r_pack_ / s, tol_u);
  return s * q;
}

Vector Lattice::reduce(const Vector& x) const { return x - closest_point(x); }

Eigen::VectorXi Lattice::coefficients(const Vector& p) const {
  if (p.size() != dimension()) throw InvalidParameter("coefficients: dimension mismatch");
  const Vector z = generator_inverse_ * p;
  Eigen::VectorXi out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = static_cast<int>(std::llround(z[i]));
  return out;
}

bool Lattice::contains(const Vector& x, double tol) const {
  if (x.size() != dimension()) return false;
  const Vector z = (generator_inverse_ * x).array().round();
  return (generator_ * z - x).norm() < tol;
}

Lattice make_lattice(LatticeKind kind, double scale, int dim) {
  return Lattice::make(kind, scale, dim);
}

Vector cvp(const Lattice& lattice, const Vector& x) { return lattice.closest_point(x); }

Vector mod_lattice(const Lattice& lattice, const Vector& x) { return lattice.reduce(x); }

bool lex_less(const Vector& a, const Vector& b, double tol) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - tol) return true;
    if (a[i] > b[i] + tol) return false;
  }
  return false;
}

int bruteforce_radius(const Lattice& lattice, const Vector& x) {
  const Matrix g_inv = lattice.generator().inverse();
  const double reach = x.norm() + lattice.covering_radius();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < g_inv.rows(); ++k) worst = std::max(worst, g_inv.row(k).norm());
  return static_cast<int>(std::ceil(worst * reach)) + 1;
}

Vector cvp_bruteforce(const Lattice& lattice, const Vector& x, int radius) {
  const int n = lattice.dimension();
  if (x.size() != n) throw InvalidParameter("cvp_bruteforce: dimension mismatch");
  const Matrix& g = lattice.generator();
  // ||x - G z||^2 = ||Q^T x - R z||^2; enumerate z_{n-1}, ..., z_0 and skip
  // only branches whose partial distance already exceeds the best found.
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  const Vector y = qr.householderQ().transpose() * x;
  const double tol = lattice.tie_tolerance(x);

  double bound = std::numeric_limits<double>::infinity();
  {
    // Seed the bound with the rounded-coefficient point when it lies in the box.
    const Vector z0 = (g.inverse() * x).array().round();
    if (z0.cwiseAbs().maxCoeff() <= radius) bound = (x - g * z0).squaredNorm() + tol;
  }

  std::vector<Candidate> found;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);

  auto recurse = [&](auto&& self, int level, double partial) -> void {
    double centre = y[level];
    for (int j = level + 1; j < n; ++j) centre -= r(level, j) * z[j];
    const double diag = r(level, level);
    centre /= diag;
    const double room = bound - partial;
    if (room < 0.0) return;
    double lo = -radius;
    double hi = radius;
    if (std::isfinite(room)) {
      const double half_width = std::sqrt(room) / std::abs(diag);
      lo = std::max(lo, std::ceil(centre - half_width));
      hi = std::min(hi, std::floor(centre + half_width));
    }
    for (double v = lo; v <= hi; v += 1.0) {
      z[level] = v;
      const double term = diag * (centre - v);
      const double d = partial + term * term;
      if (d > bound) continue;
      if (level == 0) {
        const Vector p = g * z;
        const double d2 = (x - p).squaredNorm();
        if (d2 < best) best = d2;
        bound = std::min(bound, best + tol);
        found.push_back({p, d2});
      } else {
        self(self, level - 1, d);
      }
    }
  };
  recurse(recurse, n - 1, 0.0);

  Candidate pick{Vector(), std::numeric_limits<double>::infinity()};
  for (auto& c : found) {
    if (c.dist2 > best + tol) continue;
    if (pick.point.size() == 0 || lex_less(c.point, pick.point, 1e-9 * lattice.covering_radius()))
      pick = std::move(c);
  }
  return pick.point;
}

}  // namespace mme
