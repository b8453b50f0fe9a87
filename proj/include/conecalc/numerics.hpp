#pragma once

// Dense linear-algebra substrate shared by every other module.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "conecalc/error.hpp"

namespace conecalc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// A square matrix tagged with the identifier of the space it acts on.
struct LinearOperator {
  std::string space;
  Matrix entries;

  Eigen::Index dim() const { return entries.rows(); }
};

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

inline bool is_hermitian(const Matrix& m, double rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  return hermiticity_defect(m) <= rel_tol * max_abs(m);
}

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::DimMismatch, std::string(what) + " is not a nonempty square matrix");
  }
}

inline void require_hermitian(const Matrix& m, const char* what) {
  require_square(m, what);
  if (!is_hermitian(m)) {
    throw Error(ErrorKind::NonHermitian,
                std::string(what) + " fails the Hermitian check (defect " +
                    std::to_string(hermiticity_defect(m)) + ")");
  }
}

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

inline Matrix pauli_x() {
  Matrix s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  return s;
}

inline Matrix pauli_z() {
  Matrix s(2, 2);
  s << 1.0, 0.0, 0.0, -1.0;
  return s;
}

/// Spectral (operator 2-) norm.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

struct Spectrum {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns
  double gap01 = 0.0;      // eigenvalues(1) - eigenvalues(0); 0 in dimension 1 is never read
  double norm = 0.0;       // max |eigenvalue|

  Eigen::Index dim() const { return eigenvalues.size(); }
  double ground_energy() const { return eigenvalues(0); }
  Vector ground_vector() const { return eigenvectors.col(0); }

  /// A lowest eigenvalue separated from the rest by more than rel_gap * norm.
  bool ground_is_simple(double rel_gap = 1e-8) const {
    if (dim() == 1) return true;
    return gap01 > rel_gap * norm;
  }
};

/// Rotates v so that its first component of non-negligible modulus is real positive.
inline void fix_phase(Eigen::Ref<Vector> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > 1e-10 * scale) {
      v *= std::conj(v(i)) / a;
      return;
    }
  }
}

inline Spectrum hermitian_eig(const Matrix& m) {
  require_hermitian(m, "operator");
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::Inconsistent, "eigensolver did not converge");
  }
  Spectrum s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  for (Eigen::Index k = 0; k < s.eigenvectors.cols(); ++k) fix_phase(s.eigenvectors.col(k));
  s.gap01 = s.dim() > 1 ? s.eigenvalues(1) - s.eigenvalues(0) : 0.0;
  s.norm = s.eigenvalues.cwiseAbs().maxCoeff();
  return s;
}

/// f(M) = V f(Λ) V† for Hermitian M.
template <typename F>
Matrix spectral_apply(const Spectrum& s, F&& f) {
  Vector d(s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k) d(k) = f(s.eigenvalues(k));
  return s.eigenvectors * d.asDiagonal() * s.eigenvectors.adjoint();
}

/// e^{tM} for Hermitian M.
inline Matrix op_exp(const Matrix& m, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::DimMismatch, "op_exp: non-finite exponent scale");
  const Spectrum s = hermitian_eig(m);
  Matrix e = spectral_apply(s, [t](double lambda) { return cplx(std::exp(t * lambda), 0.0); });
  return 0.5 * (e + e.adjoint());
}

/// e^{itM} for Hermitian M.
inline Matrix unitary_exp(const Matrix& m, double t) {
  const Spectrum s = hermitian_eig(m);
  return spectral_apply(s, [t](double lambda) { return std::exp(cplx(0.0, t * lambda)); });
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

enum class KeepFactor { First, Second };

/// Partial trace of an operator on C^{d1} ⊗ C^{d2}.
inline Matrix partial_trace(const Matrix& m, Eigen::Index d1, Eigen::Index d2,
                            KeepFactor keep = KeepFactor::First) {
  if (d1 <= 0 || d2 <= 0 || m.rows() != d1 * d2 || m.cols() != d1 * d2) {
    throw Error(ErrorKind::BadFactorization,
                "dimension " + std::to_string(m.rows()) + " does not factor as " +
                    std::to_string(d1) + "x" + std::to_string(d2));
  }
  if (keep == KeepFactor::First) {
    Matrix out = Matrix::Zero(d1, d1);
    for (Eigen::Index a = 0; a < d1; ++a)
      for (Eigen::Index b = 0; b < d1; ++b)
        for (Eigen::Index k = 0; k < d2; ++k) out(a, b) += m(a * d2 + k, b * d2 + k);
    return out;
  }
  Matrix out = Matrix::Zero(d2, d2);
  for (Eigen::Index a = 0; a < d2; ++a)
    for (Eigen::Index b = 0; b < d2; ++b)
      for (Eigen::Index k = 0; k < d1; ++k) out(a, b) += m(k * d2 + a, k * d2 + b);
  return out;
}

inline Matrix density_matrix(const Vector& psi) {
  return psi * psi.adjoint() / psi.squaredNorm();
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

}  // namespace conecalc
