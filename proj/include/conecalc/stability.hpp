#pragma once

// Good quantum numbers μ(H) and their invariance along arrow chains.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conecalc/cones.hpp"
#include "conecalc/error.hpp"
#include "conecalc/inheritance.hpp"
#include "conecalc/numerics.hpp"
#include "conecalc/positivity.hpp"

namespace conecalc {

inline constexpr double kCommutationTol = 1e-10;
inline constexpr double kMuTol = 1e-8;

inline double hermitian_norm(const Matrix& m) { return hermitian_eig(m).norm; }

struct CommutationCheck {
  bool commuting = false;
  double commutator_norm = 0.0;
};

inline CommutationCheck commutation_check(const Matrix& h, const Matrix& o,
                                          double tol = kCommutationTol) {
  require_hermitian(h, "Hamiltonian");
  require_hermitian(o, "observable");
  if (h.rows() != o.rows()) {
    throw Error(ErrorKind::DimMismatch, "Hamiltonian and observable act on different spaces");
  }
  CommutationCheck c;
  c.commutator_norm = commutator(h, o).norm();
  const double scale = hermitian_norm(h) * hermitian_norm(o);
  c.commuting = c.commutator_norm <= tol * scale;
  if (c.commuting) {
    // e^{isO} e^{itH} = e^{itH} e^{isO} at two sample points.
    for (const auto& [s, t] : {std::pair{1.0, 1.0}, std::pair{0.3, 2.0}}) {
      const Matrix eo = unitary_exp(o, s);
      const Matrix eh = unitary_exp(h, t);
      if (max_abs(eo * eh - eh * eo) > 1e-8) {
        throw Error(ErrorKind::Inconsistent, "commutator vanishes but exponentials do not commute");
      }
    }
  }
  return c;
}

/// H in the class of Hamiltonians strongly commuting with O.
inline bool in_class_P_O(const Matrix& h, const Matrix& o, double tol = kCommutationTol) {
  return commutation_check(h, o, tol).commuting;
}

struct GoodQuantumNumber {
  double mu = 0.0;
  double snapped_mu = 0.0;  // nearest eigenvalue of O
  double residual = 0.0;    // ||Oψ - μψ||
  double gap01 = 0.0;
  double commutator_norm = 0.0;
  Vector ground_state;
};

/// Nearest eigenvalue, rounded to a power-of-two grid of about 1e-12 relative to the
/// spectral radius so that eigenvalues computed on different spaces compare equal.
inline double snap_to_spectrum(const RealVector& eigenvalues, double x) {
  double best = eigenvalues(0);
  for (Eigen::Index k = 1; k < eigenvalues.size(); ++k)
    if (std::abs(eigenvalues(k) - x) < std::abs(best - x)) best = eigenvalues(k);
  const double radius = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  const double grid = std::ldexp(1.0, std::ilogb(radius) - 40);
  return std::round(best / grid) * grid + 0.0;
}

inline GoodQuantumNumber good_quantum_number(const Matrix& h, const Matrix& o,
                                             const SelfDualCone& p) {
  const CommutationCheck comm = commutation_check(h, o);
  if (!comm.commuting) {
    throw Error(ErrorKind::NotCommuting,
                "||[H,O]|| = " + std::to_string(comm.commutator_norm));
  }
  if (!in_class_A_plus(h, p)) throw Error(ErrorKind::NotInAPlus, "H is not in A+ for the cone");
  const GroundState g = cone_ground_state(h, p);
  if (!g.simple) {
    throw Error(ErrorKind::NotSimple, "ground gap " + std::to_string(g.gap01) + " too small");
  }
  const Spectrum ospec = hermitian_eig(o);
  GoodQuantumNumber q;
  q.ground_state = g.vector;
  q.gap01 = g.gap01;
  q.commutator_norm = comm.commutator_norm;
  q.mu = g.vector.dot(o * g.vector).real();
  q.residual = (o * g.vector - q.mu * g.vector).norm();
  q.snapped_mu = snap_to_spectrum(ospec.eigenvalues, q.mu);
  const double bound = kMuTol * ospec.norm;
  if (q.residual > bound || std::abs(q.mu - q.snapped_mu) > bound) {
    throw Error(ErrorKind::Inconsistent, "ground state is not an eigenvector of O (residual " +
                                             std::to_string(q.residual) + ")");
  }
  return q;
}

/// The observable on the target space of an embedding: τOτ† for unitary τ,
/// O ⊗ 1 for τ = 1 ⊗ ω.
inline Matrix lift_observable(const Matrix& o, const Embedding& emb) {
  const Eigen::Index d = emb.from_dim();
  const Eigen::Index big = emb.to_dim();
  if (o.rows() != d) throw Error(ErrorKind::DimMismatch, "observable does not match embedding");
  if (big == d) return emb.extend(o);
  if (big % d != 0) throw Error(ErrorKind::BadFactorization, "embedding is not a tensor factor");
  const Eigen::Index m = big / d;
  const Vector omega = emb.isometry().col(0).head(m);
  if (max_abs(emb.isometry() - kron(identity(d), Matrix(omega))) > 1e-12) {
    throw Error(ErrorKind::BadFactorization,
                "embedding is not of the form φ ↦ φ ⊗ ω; supply node observables explicitly");
  }
  return kron(o, identity(m));
}

struct TelescopeTerm {
  double overlap = 0.0;              // <ψ_j|τ†ψ_{j+1}>
  double lhs = 0.0;                  // μ_j <ψ_j|τ†ψ_{j+1}>
  double rhs = 0.0;                  // <ψ_j|τ† O_{j+1} ψ_{j+1}>
  double intertwining_defect = 0.0;  // ||τ† O_{j+1} - O_j τ†||
  std::optional<double> mu_from_ratio;
};

struct MuChainReport {
  std::vector<GoodQuantumNumber> mus;
  std::vector<TelescopeTerm> telescope;
  double mu_star = 0.0;
  bool all_equal = false;
};

/// Resolves the observable on every node of a chain, starting from `o` on the first node.
inline std::vector<Matrix> chain_observables(const ArrowChain& chain, const Matrix& o) {
  std::vector<Matrix> obs;
  const auto& nodes = chain.nodes();
  obs.push_back(nodes[0].observable ? *nodes[0].observable : o);
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    if (nodes[k + 1].observable) {
      obs.push_back(*nodes[k + 1].observable);
    } else {
      try {
        obs.push_back(lift_observable(obs.back(), chain.embeddings()[k]));
      } catch (const Error& e) {
        throw Error(e.kind(), e.what(), k + 1);
      }
    }
  }
  return obs;
}

inline MuChainReport mu_chain_invariance(const ArrowChain& chain, const Matrix& o) {
  const ChainReport verified = chain_verify(chain);
  if (verified.failed_link) {
    throw Error(ErrorKind::LinkFailed, verified.failure, verified.failed_link);
  }
  const auto& nodes = chain.nodes();
  const std::vector<Matrix> obs = chain_observables(chain, o);
  MuChainReport r;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const SelfDualCone& p = (k + 1 == nodes.size() && k > 0) ? nodes[k].incoming_cone()
                                                              : nodes[k].cone;
    try {
      r.mus.push_back(good_quantum_number(nodes[k].hamiltonian, obs[k], p));
    } catch (const Error& e) {
      throw Error(e.kind(), e.what(), k);
    }
  }
  const double onorm = hermitian_norm(obs[0]);
  r.mu_star = r.mus[0].snapped_mu;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const Embedding& emb = chain.embeddings()[k];
    TelescopeTerm t;
    const Vector phi = emb.pull_back(r.mus[k + 1].ground_state);
    t.overlap = r.mus[k].ground_state.dot(phi).real();
    t.lhs = r.mus[k].mu * t.overlap;
    t.rhs = r.mus[k].ground_state.dot(emb.pull_back(obs[k + 1] * r.mus[k + 1].ground_state)).real();
    t.intertwining_defect =
        max_abs(emb.isometry().adjoint() * obs[k + 1] - obs[k] * emb.isometry().adjoint());
    if (t.overlap > 1e-12) t.mu_from_ratio = t.rhs / t.overlap;
    r.telescope.push_back(t);
    if (std::abs(r.mus[k + 1].snapped_mu - r.mus[k].snapped_mu) > kMuTol * onorm) {
      throw Error(ErrorKind::MuMismatch,
                  "μ changes from " + std::to_string(r.mus[k].snapped_mu) + " to " +
                      std::to_string(r.mus[k + 1].snapped_mu),
                  k);
    }
  }
  r.all_equal = true;
  return r;
}

// ---------------------------------------------------------------------------
// Stability classes, represented by verified members and their witnesses.

struct StabilityMember {
  std::vector<std::string> witness;  // node ids along the verifying chain
  double mu = 0.0;
};

class StabilityClassRecord {
 public:
  StabilityClassRecord(std::string base, double mu_star)
      : base_(std::move(base)), mu_star_(mu_star) {}

  const std::string& base() const { return base_; }
  double mu_star() const { return mu_star_; }
  const std::map<std::string, StabilityMember>& members() const { return members_; }

  /// Verifies the chain from the base and records its endpoint. The endpoint's
  /// snapped μ must equal mu_star.
  const StabilityMember& add(const ArrowChain& chain, const Matrix& o) {
    if (chain.nodes().front().id != base_) {
      throw Error(ErrorKind::PreconditionFailed, "chain does not start at the class base");
    }
    const MuChainReport r = mu_chain_invariance(chain, o);
    const double mu = r.mus.back().snapped_mu;
    if (std::abs(mu - mu_star_) > kMuTol * std::max(1.0, std::abs(mu_star_))) {
      throw Error(ErrorKind::MuMismatch, "member μ differs from the class value");
    }
    StabilityMember m;
    for (const auto& n : chain.nodes()) m.witness.push_back(n.id);
    m.mu = mu;
    return members_[chain.nodes().back().id] = std::move(m);
  }

 private:
  std::string base_;
  double mu_star_;
  std::map<std::string, StabilityMember> members_;
};

// ---------------------------------------------------------------------------
// The tower H -> H ⊗ 1 - 1 ⊗ σ_1 -> ...

inline Vector uniform_vector(Eigen::Index n) {
  return Vector::Constant(n, cplx(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
}

inline ArrowChain richness_tower(const Matrix& h, const SelfDualCone& p, const Matrix& o,
                                 int depth, const std::string& base_id = "H") {
  if (depth < 0) throw Error(ErrorKind::PreconditionFailed, "depth must be non-negative");
  if (!in_class_A_plus(h, p)) throw Error(ErrorKind::PreconditionFailed, "H is not in A+");
  if (!in_class_P_O(h, o)) throw Error(ErrorKind::PreconditionFailed, "H does not commute with O");
  ArrowChain chain(ChainNode{base_id, h, p, std::nullopt, o});
  const Matrix sigma = pauli_x();
  const Vector omega = uniform_vector(2);
  const SelfDualCone r2 = orthant(2);
  for (int level = 1; level <= depth; ++level) {
    const ChainNode& prev = chain.nodes().back();
    const Eigen::Index d = prev.hamiltonian.rows();
    ChainNode next{base_id + "_" + std::to_string(level),
                   kron(prev.hamiltonian, identity(2)) - kron(identity(d), sigma),
                   tensor_cone(prev.cone, r2), std::nullopt,
                   kron(*prev.observable, identity(2))};
    Embedding emb = tensor_embedding(d, omega, prev.cone.space(), next.cone.space());
    chain.append(std::move(emb), std::move(next));
  }
  return chain;
}

/// ||ψ_{H_ℓ} - ψ_H ⊗ ω^{⊗ℓ}|| for every level of a tower, up to a global phase.
inline std::vector<double> tower_product_defects(const ArrowChain& tower) {
  const auto& nodes = tower.nodes();
  const Vector base = cone_ground_state(nodes[0].hamiltonian, nodes[0].cone).vector;
  Vector expected = base;
  std::vector<double> out;
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    expected = kron(expected, uniform_vector(nodes[k].hamiltonian.rows() / expected.size()));
    const Vector psi = cone_ground_state(nodes[k].hamiltonian, nodes[k].cone).vector;
    const cplx ov = expected.dot(psi);
    const cplx phase = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1.0, 0.0);
    out.push_back((psi - phase * expected).norm());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equivalence H = H_* ⊗ 1 + 1 ⊗ L and weak equivalence via relative entropy.

struct EquivalenceReport {
  bool equivalent = false;
  double residual = 0.0;
  Matrix environment_term;  // best fit L
  bool environment_in_A_plus = false;
};

inline EquivalenceReport is_equivalent(const Matrix& h2, const Matrix& h_star,
                                       const SelfDualCone& env_cone) {
  const Eigen::Index d = h_star.rows();
  if (d == 0 || h2.rows() % d != 0) {
    throw Error(ErrorKind::BadFactorization, "dimension does not factor through the base space");
  }
  const Eigen::Index m = h2.rows() / d;
  if (env_cone.dim() != m) {
    throw Error(ErrorKind::BadFactorization, "environment cone has the wrong dimension");
  }
  require_hermitian(h2, "Hamiltonian");
  const Matrix diff = h2 - kron(h_star, identity(m));
  EquivalenceReport r;
  r.environment_term = partial_trace(diff, d, m, KeepFactor::Second) / static_cast<double>(d);
  r.environment_term = 0.5 * (r.environment_term + r.environment_term.adjoint()).eval();
  r.residual = (diff - kron(identity(d), r.environment_term)).norm();
  r.environment_in_A_plus = in_class_A_plus(r.environment_term, env_cone);
  r.equivalent = r.residual <= 1e-8 * hermitian_norm(h2) && r.environment_in_A_plus;
  return r;
}

inline void require_density_matrix(const Matrix& rho, const char* what) {
  if (rho.rows() != rho.cols() || !is_hermitian(rho, 1e-10)) {
    throw Error(ErrorKind::NotDensityMatrix, std::string(what) + " is not Hermitian");
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) {
    throw Error(ErrorKind::NotDensityMatrix, std::string(what) + " has trace " + std::to_string(tr));
  }
  if (hermitian_eig(rho).eigenvalues(0) < -1e-10) {
    throw Error(ErrorKind::NotDensityMatrix, std::string(what) + " is not positive semidefinite");
  }
}

/// S(ρ|σ) = tr ρ log ρ - tr ρ log σ, +∞ when supp ρ ⊄ supp σ.
inline double relative_entropy(const Matrix& rho, const Matrix& sigma) {
  require_density_matrix(rho, "rho");
  require_density_matrix(sigma, "sigma");
  if (rho.rows() != sigma.rows()) throw Error(ErrorKind::DimMismatch, "density matrix sizes differ");
  const Spectrum rs = hermitian_eig(rho);
  const Spectrum ss = hermitian_eig(sigma);
  double s = 0.0;
  for (Eigen::Index k = 0; k < rs.dim(); ++k) {
    const double p = rs.eigenvalues(k);
    if (p > 0.0) s += p * std::log(p);
  }
  for (Eigen::Index l = 0; l < ss.dim(); ++l) {
    const Vector w = ss.eigenvectors.col(l);
    const double weight = w.dot(rho * w).real();
    const double q = ss.eigenvalues(l);
    if (q < 1e-12) {
      if (weight > 1e-10) return std::numeric_limits<double>::infinity();
      continue;
    }
    s -= weight * std::log(q);
  }
  return std::max(s, 0.0);
}

struct WeakEquivalence {
  bool weak = false;
  double entropy = 0.0;
  std::optional<Vector> omega;  // ψ = ψ_* ⊗ ω when weak
  bool omega_strictly_positive = false;
};

inline WeakEquivalence weak_equivalence_check(const Matrix& h2, const SelfDualCone& p2,
                                              const Matrix& h_star, const SelfDualCone& p_star,
                                              const SelfDualCone& env_cone) {
  const Eigen::Index d = h_star.rows();
  if (d == 0 || h2.rows() % d != 0 || env_cone.dim() * d != h2.rows()) {
    throw Error(ErrorKind::BadFactorization, "dimension does not factor through the base space");
  }
  const Eigen::Index m = h2.rows() / d;
  const GroundState g = cone_ground_state(h2, p2);
  const GroundState gs = cone_ground_state(h_star, p_star);
  if (!g.simple) throw Error(ErrorKind::NotSimple, "perturbed ground state is degenerate");
  if (!gs.simple) throw Error(ErrorKind::NotSimple, "base ground state is degenerate");
  if (!strictly_positive(p2, g.vector) || !strictly_positive(p_star, gs.vector)) {
    throw Error(ErrorKind::PreconditionFailed, "ground states must be strictly positive");
  }
  WeakEquivalence r;
  const Matrix reduced = partial_trace(density_matrix(g.vector), d, m, KeepFactor::First);
  r.entropy = relative_entropy(0.5 * (reduced + reduced.adjoint()), density_matrix(gs.vector));
  r.weak = r.entropy <= 1e-9;
  if (r.weak) {
    Vector omega = Vector::Zero(m);
    for (Eigen::Index a = 0; a < d; ++a)
      omega += std::conj(gs.vector(a)) * g.vector.segment(a * m, m);
    omega /= omega.norm();
    const Vector c = env_cone.coordinates(omega);
    Eigen::Index best = 0;
    c.cwiseAbs().maxCoeff(&best);
    omega *= std::conj(c(best)) / std::abs(c(best));
    r.omega_strictly_positive = strictly_positive(env_cone, omega);
    if (!r.omega_strictly_positive) {
      throw Error(ErrorKind::Inconsistent, "factor ω of a weakly equivalent ground state is not strictly positive");
    }
    r.omega = omega;
  }
  return r;
}

}  // namespace conecalc
