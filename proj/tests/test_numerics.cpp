#include <gtest/gtest.h>

#include "conecalc/numerics.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace conecalc {
namespace {

TEST(HermitianEig, PauliXSpectrum) {
  const Spectrum s = hermitian_eig(pauli_x());
  EXPECT_NEAR(s.eigenvalues(0), -1.0, 1e-14);
  EXPECT_NEAR(s.eigenvalues(1), 1.0, 1e-14);
  EXPECT_NEAR(s.gap01, 2.0, 1e-14);
}

TEST(HermitianEig, IdentityIsDegenerate) {
  const Spectrum s = hermitian_eig(identity(3));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(s.eigenvalues(k), 1.0, 1e-14);
  EXPECT_NEAR(s.gap01, 0.0, 1e-14);
  EXPECT_FALSE(s.ground_is_simple());
}

TEST(HermitianEig, RejectsNonHermitian) {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  try {
    hermitian_eig(m);
    FAIL() << "expected NonHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonHermitian);
  }
}

TEST(HermitianEig, PhaseConventionFirstComponentPositive) {
  testgen::Gen g(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Spectrum s = hermitian_eig(g.hermitian(g.integer(2, 8)));
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
      const Vector v = s.eigenvectors.col(k);
      Eigen::Index first = 0;
      while (std::abs(v(first)) <= 1e-10 * v.cwiseAbs().maxCoeff()) ++first;
      EXPECT_GT(v(first).real(), 0.0);
      EXPECT_NEAR(v(first).imag(), 0.0, 1e-12);
    }
  }
}

TEST(HermitianEig, ResidualsAndReconstructionOnRandomMatrices) {
  testgen::Gen g(12);
  for (int trial = 0; trial < 500; ++trial) {
    const Matrix m = g.hermitian(g.integer(1, 32));
    const Spectrum s = hermitian_eig(m);
    const double norm = spectral_norm(m);
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
      EXPECT_LE((m * s.eigenvectors.col(k) - s.eigenvalues(k) * s.eigenvectors.col(k)).norm(),
                1e-10 * norm);
      if (k > 0) EXPECT_LE(s.eigenvalues(k - 1), s.eigenvalues(k));
    }
    const Matrix rebuilt =
        s.eigenvectors * s.eigenvalues.cast<cplx>().asDiagonal() * s.eigenvectors.adjoint();
    EXPECT_LE(spectral_norm(m - rebuilt), 1e-10 * norm);
  }
}

TEST(OpExp, ZeroTimeIsIdentity) {
  testgen::Gen g(13);
  EXPECT_LE(max_abs(op_exp(g.hermitian(5), 0.0) - identity(5)), 1e-14);
}

TEST(OpExp, MinusPauliXMatchesClosedForm) {
  for (double beta : {0.1, 1.0, 3.0}) {
    const Matrix e = op_exp(-pauli_x(), -beta);
    EXPECT_LE(max_abs(e - oracle::exp_two_level(0.0, -1.0, beta)), 1e-12 * std::cosh(beta));
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) EXPECT_GT(e(i, j).real(), 0.0);
  }
}

TEST(OpExp, AgreesWithPadeAndSemigroupLaw) {
  testgen::Gen g(14);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = g.hermitian(g.integer(1, 10));
    const double s = g.uniform(-1, 1), t = g.uniform(-1, 1);
    const Matrix es = op_exp(m, s), et = op_exp(m, t), est = op_exp(m, s + t);
    EXPECT_LE(max_abs(es * et - est), 1e-9 * std::max(1.0, max_abs(est)));
    EXPECT_LE(max_abs(es - oracle::expm(m, s)), 1e-9 * std::max(1.0, max_abs(es)));
    EXPECT_TRUE(is_hermitian(es, 1e-12));
  }
}

TEST(OpExp, SpectrumMapsExponentially) {
  testgen::Gen g(15);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = g.hermitian(g.integer(1, 8));
    const double t = g.uniform(-1, 1);
    const RealVector lam = hermitian_eig(m).eigenvalues;
    RealVector mapped = lam.unaryExpr([t](double l) { return std::exp(t * l); });
    std::sort(mapped.data(), mapped.data() + mapped.size());
    const RealVector got = hermitian_eig(op_exp(m, t)).eigenvalues;
    for (Eigen::Index k = 0; k < got.size(); ++k)
      EXPECT_NEAR(got(k), mapped(k), 1e-9 * std::max(1.0, mapped(k)));
  }
}

TEST(Kron, IdentitiesAndAction) {
  EXPECT_LE(max_abs(kron(identity(2), identity(3)) - identity(6)), 0.0);
  Vector e1 = Vector::Zero(2), e2 = Vector::Zero(2);
  e1(0) = 1.0;
  e2(1) = 1.0;
  EXPECT_LE((kron(pauli_x(), identity(2)) * kron(e1, e1) - kron(e2, e1)).norm(), 0.0);
}

TEST(Kron, SpectralNormIsMultiplicative) {
  testgen::Gen g(16);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = g.complex_matrix(g.integer(1, 5), g.integer(1, 5));
    const Matrix b = g.complex_matrix(g.integer(1, 5), g.integer(1, 5));
    EXPECT_NEAR(spectral_norm(kron(a, b)), spectral_norm(a) * spectral_norm(b),
                1e-10 * spectral_norm(a) * spectral_norm(b));
  }
}

TEST(PartialTrace, ProductState) {
  testgen::Gen g(17);
  const Vector psi = g.complex_vector(3).normalized();
  const Vector omega = g.complex_vector(2).normalized();
  const Matrix rho = density_matrix(kron(psi, omega));
  EXPECT_LE(max_abs(partial_trace(rho, 3, 2, KeepFactor::First) - density_matrix(psi)), 1e-14);
  EXPECT_LE(max_abs(partial_trace(rho, 3, 2, KeepFactor::Second) - density_matrix(omega)), 1e-14);
}

TEST(PartialTrace, BellStateGivesMaximallyMixed) {
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  EXPECT_LE(max_abs(partial_trace(density_matrix(bell), 2, 2, KeepFactor::First) - 0.5 * identity(2)),
            1e-15);
}

TEST(PartialTrace, EigenvaluesAreSquaredSingularValues) {
  testgen::Gen g(18);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector psi = g.complex_vector(6).normalized();
    Matrix coeff(3, 2);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 2; ++b) coeff(a, b) = psi(2 * a + b);
    const RealVector sv = Eigen::JacobiSVD<Matrix>(coeff).singularValues();
    const RealVector ev = hermitian_eig(partial_trace(density_matrix(psi), 3, 2, KeepFactor::First)).eigenvalues;
    EXPECT_NEAR(ev(2), sv(0) * sv(0), 1e-12);
    EXPECT_NEAR(ev(1), sv(1) * sv(1), 1e-12);
    EXPECT_NEAR(ev(0), 0.0, 1e-12);
  }
}

TEST(PartialTrace, TraceAndPositivityPreserved) {
  testgen::Gen g(19);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d1 = g.integer(1, 4), d2 = g.integer(1, 4);
    const Matrix rho = g.density(d1 * d2, g.integer(1, static_cast<int>(d1 * d2)));
    const Matrix red = partial_trace(rho, d1, d2, KeepFactor::First);
    EXPECT_NEAR(red.trace().real(), 1.0, 1e-10);
    EXPECT_GE(hermitian_eig(red).eigenvalues(0), -1e-12);
    EXPECT_LE(max_abs(red - oracle::trace_out_second(rho, d1, d2)), 1e-13);
  }
}

TEST(PartialTrace, RejectsBadFactorization) {
  try {
    partial_trace(identity(6) / 6.0, 4, 2, KeepFactor::First);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadFactorization);
  }
}

}  // namespace
}  // namespace conecalc
