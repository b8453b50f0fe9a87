#pragma once

// Semigroup-side checks: resolvents, β-sampled positivity of e^{-βH},
// Trotter products and the Duhamel positivity-improvement statement.

#include <cmath>
#include <cstddef>
#include <vector>

#include "conecalc/cones.hpp"
#include "conecalc/error.hpp"
#include "conecalc/numerics.hpp"
#include "conecalc/positivity.hpp"

namespace conecalc {

inline const std::vector<double>& default_beta_samples() {
  static const std::vector<double> betas{0.1, 1.0, 10.0};
  return betas;
}

/// (H + s)^{-1}, defined for s > -E(H).
inline Matrix resolvent(const Matrix& h, double s) {
  const Spectrum spec = hermitian_eig(h);
  if (!(s > -spec.ground_energy() + 1e-10)) {
    throw Error(ErrorKind::SpectralBound,
                "shift " + std::to_string(s) + " does not exceed -E(H) = " +
                    std::to_string(-spec.ground_energy()));
  }
  return spectral_apply(spec, [s](double lambda) { return cplx(1.0 / (lambda + s), 0.0); });
}

/// `count` shifts strictly above -E(H), spread over a few multiples of max(1, ||H||).
inline std::vector<double> sample_shifts(const Matrix& h, std::size_t count = 5) {
  const Spectrum spec = hermitian_eig(h);
  const double unit = std::max(1.0, spec.norm);
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(-spec.ground_energy() + unit * 0.05 * std::pow(3.0, static_cast<double>(k)));
  }
  return out;
}

/// Decides e^{-βH} ⊵ 0 for all β >= 0 by the Metzler criterion, then insists that
/// the sampled exponentials agree: all samples preserving iff H is Metzler.
inline bool semigroup_positive_all_beta(const Matrix& h, const SelfDualCone& p,
                                        const std::vector<double>& betas = default_beta_samples(),
                                        double tol = kDefaultConeTol) {
  const bool metzler = in_class_A(h, p, tol);
  const Spectrum spec = hermitian_eig(h);
  bool sampled = true;
  for (double beta : betas) {
    const Matrix e = spectral_apply(
        spec, [beta](double lambda) { return cplx(std::exp(-beta * lambda), 0.0); });
    sampled = sampled && classify(e, p, tol).preserving;
  }
  if (sampled != metzler) {
    throw Error(ErrorKind::Inconsistent,
                std::string("Metzler criterion says ") + (metzler ? "positive" : "not positive") +
                    " but sampled exponentials disagree");
  }
  return metzler;
}

struct TrotterReport {
  std::vector<int> n_values;
  std::vector<double> errors;
  std::vector<bool> positivity_ok;

  /// errors[k] / errors[k+1].
  std::vector<double> ratios() const {
    std::vector<double> r;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) r.push_back(errors[k] / errors[k + 1]);
    return r;
  }

  bool all_positive() const {
    for (bool b : positivity_ok)
      if (!b) return false;
    return true;
  }

  /// Each doubling of n shrinks the error by the expected factor (ideal / slack, ideal * slack).
  bool decays_like_inverse_n(double ideal_ratio = 2.0, double slack = 3.0) const {
    for (double r : ratios())
      if (!(r > ideal_ratio / slack && r < ideal_ratio * slack)) return false;
    return true;
  }
};

inline Matrix matrix_power(Matrix base, int n) {
  Matrix result = identity(base.rows());
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

/// (e^{-βsH/n} e^{-βtH'/n})^n against e^{-β(sH + tH')}.
inline TrotterReport trotter_verify(const Matrix& h1, const Matrix& h2, double s, double t,
                                    double beta, const std::vector<int>& n_values,
                                    const SelfDualCone& p, double tol = kDefaultConeTol) {
  if (!in_class_A(h1, p, tol)) throw Error(ErrorKind::InputNotInClass, "first Hamiltonian");
  if (!in_class_A(h2, p, tol)) throw Error(ErrorKind::InputNotInClass, "second Hamiltonian");
  const Matrix exact = op_exp(s * h1 + t * h2, -beta);
  const Spectrum spec1 = hermitian_eig(h1);
  const Spectrum spec2 = hermitian_eig(h2);
  TrotterReport r;
  for (int n : n_values) {
    if (n < 1) throw Error(ErrorKind::DimMismatch, "Trotter step count must be positive");
    const double a = beta * s / n;
    const double b = beta * t / n;
    const Matrix f1 = spectral_apply(spec1, [a](double l) { return cplx(std::exp(-a * l), 0.0); });
    const Matrix f2 = spectral_apply(spec2, [b](double l) { return cplx(std::exp(-b * l), 0.0); });
    const Matrix approx = matrix_power(f1 * f2, n);
    r.n_values.push_back(n);
    r.errors.push_back(spectral_norm(approx - exact));
    r.positivity_ok.push_back(classify(approx, p, tol).preserving);
  }
  return r;
}

/// Checks e^{-β(A-B)} ⊳ 0 at every sampled β for A with positive semigroup and B ergodic.
/// Preconditions are enforced; the conclusion is reported, not assumed.
inline bool duhamel_improving_verify(const Matrix& a, const Matrix& b, const SelfDualCone& p,
                                     const std::vector<double>& betas,
                                     double tol = kDefaultConeTol) {
  if (!semigroup_positive_all_beta(a, p, default_beta_samples(), tol)) {
    throw Error(ErrorKind::PreconditionFailed, "e^{-βA} does not preserve the cone");
  }
  require_hermitian(b, "perturbation");
  if (!is_ergodic(b, p, tol).ergodic) {
    throw Error(ErrorKind::PreconditionFailed, "perturbation is not ergodic");
  }
  const Spectrum spec = hermitian_eig(a - b);
  bool all = true;
  for (double beta : betas) {
    if (!(beta > 0.0)) throw Error(ErrorKind::PreconditionFailed, "β must be positive");
    const Matrix e = spectral_apply(
        spec, [beta](double lambda) { return cplx(std::exp(-beta * lambda), 0.0); });
    all = all && classify(e, p, tol).improving;
  }
  return all;
}

}  // namespace conecalc
