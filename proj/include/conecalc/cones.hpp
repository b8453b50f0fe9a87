#pragma once

// Simplicial self-dual cones: the conical hull of an orthonormal basis {u_i}.
// Such a cone equals its own dual, so membership and strict positivity reduce
// to sign conditions on the coordinates <u_i|x>.

#include <string>
#include <utility>

#include "conecalc/error.hpp"
#include "conecalc/numerics.hpp"

namespace conecalc {

inline constexpr double kDefaultConeTol = 1e-9;

class SelfDualCone {
 public:
  /// Generators are the columns of `generators`; they must form a unitary matrix.
  SelfDualCone(std::string space, std::string label, Matrix generators)
      : space_(std::move(space)), label_(std::move(label)), generators_(std::move(generators)) {
    require_square(generators_, "cone generator matrix");
    const Matrix gram = generators_.adjoint() * generators_;
    const double defect = max_abs(gram - identity(gram.rows()));
    if (defect > 1e-10) {
      throw Error(ErrorKind::DimMismatch,
                  "cone generators are not orthonormal (defect " + std::to_string(defect) + ")");
    }
  }

  const std::string& space() const { return space_; }
  const std::string& label() const { return label_; }
  const Matrix& generators() const { return generators_; }
  Eigen::Index dim() const { return generators_.rows(); }
  Vector generator(Eigen::Index i) const { return generators_.col(i); }

  /// <u_i|x> for every generator.
  Vector coordinates(const Vector& x) const {
    check_dim(x);
    return generators_.adjoint() * x;
  }

  Vector from_coordinates(const Vector& c) const { return generators_ * c; }

  /// Matrix of an operator in the generator basis: M_ij = <u_i|A u_j>.
  Matrix in_basis(const Matrix& a) const {
    if (a.rows() != dim() || a.cols() != dim()) {
      throw Error(ErrorKind::DimMismatch, "operator of dimension " + std::to_string(a.rows()) +
                                              " on cone '" + label_ + "' of dimension " +
                                              std::to_string(dim()));
    }
    return generators_.adjoint() * a * generators_;
  }

  void check_dim(const Vector& x) const {
    if (x.size() != dim()) {
      throw Error(ErrorKind::DimMismatch, "vector of dimension " + std::to_string(x.size()) +
                                              " on cone '" + label_ + "' of dimension " +
                                              std::to_string(dim()));
    }
  }

 private:
  std::string space_;
  std::string label_;
  Matrix generators_;
};

/// R_+^n with the standard basis as generators.
inline SelfDualCone orthant(Eigen::Index n, std::string space = {}) {
  if (n < 1) throw Error(ErrorKind::DimMismatch, "orthant dimension must be positive");
  if (space.empty()) space = "C" + std::to_string(n);
  return SelfDualCone(space, "R+^" + std::to_string(n), identity(n));
}

/// Conical hull of {u_i ⊗ v_j}.
inline SelfDualCone tensor_cone(const SelfDualCone& p, const SelfDualCone& q) {
  return SelfDualCone(p.space() + "*" + q.space(), p.label() + "(x)" + q.label(),
                      kron(p.generators(), q.generators()));
}

inline bool contains(const SelfDualCone& p, const Vector& x, double tol = kDefaultConeTol) {
  const Vector c = p.coordinates(x);
  const double bound = tol * x.norm();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c(i).real() < -bound || std::abs(c(i).imag()) > bound) return false;
  }
  return true;
}

/// <ξ|x> > 0 for every nonzero ξ in the cone; for a simplicial cone this is
/// Re<u_i|x> > 0 for every generator. The zero vector is never strictly positive.
inline bool strictly_positive(const SelfDualCone& p, const Vector& x,
                              double tol = kDefaultConeTol) {
  const Vector c = p.coordinates(x);
  const double scale = x.norm();
  if (scale == 0.0) return false;
  const double bound = tol * scale;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c(i).real() < bound || std::abs(c(i).imag()) > bound) return false;
  }
  return true;
}

/// The antilinear involution fixing the cone pointwise: conjugates generator coordinates.
inline Vector involution_J(const SelfDualCone& p, const Vector& x) {
  return p.from_coordinates(p.coordinates(x).conjugate());
}

struct JordanParts {
  Vector plus;
  Vector minus;
};

inline JordanParts jordan_decompose(const SelfDualCone& p, const Vector& x) {
  const Vector c = p.coordinates(x);
  const double imag = c.imag().cwiseAbs().maxCoeff();
  if (imag > 1e-10 * x.norm()) {
    throw Error(ErrorKind::NotReal, "vector is not fixed by the cone involution");
  }
  const RealVector re = c.real();
  return {p.from_coordinates(re.cwiseMax(0.0).cast<cplx>()),
          p.from_coordinates((-re).cwiseMax(0.0).cast<cplx>())};
}

/// u = v1 - v2 + i(w1 - w2) with all four parts in the cone, <v1|v2> = <w1|w2> = 0.
struct FullDecomposition {
  Vector v1, v2, w1, w2;

  Vector recompose() const { return v1 - v2 + cplx(0.0, 1.0) * (w1 - w2); }
};

inline FullDecomposition full_decompose(const SelfDualCone& p, const Vector& u) {
  const Vector c = p.coordinates(u);
  const RealVector re = c.real();
  const RealVector im = c.imag();
  auto lift = [&p](const RealVector& r) { return p.from_coordinates(r.cwiseMax(0.0).cast<cplx>()); };
  return {lift(re), lift(-re), lift(im), lift(-im)};
}

}  // namespace conecalc
