#pragma once

// Embeddings H_1 -> H_2, inheritance of positivity P_1 ⇢ P_2, the arrow
// (H_1, P_1) -> (H_2, P_2) and chains of arrows.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conecalc/cones.hpp"
#include "conecalc/error.hpp"
#include "conecalc/nnls.hpp"
#include "conecalc/numerics.hpp"
#include "conecalc/parallel.hpp"
#include "conecalc/positivity.hpp"

namespace conecalc {

inline constexpr double kInheritanceResidualTol = 1e-8;

/// An isometry τ from a smaller space into a larger one. The projection onto
/// the image is π = ττ†.
class Embedding {
 public:
  Embedding(std::string from_space, std::string to_space, Matrix isometry)
      : from_(std::move(from_space)), to_(std::move(to_space)), tau_(std::move(isometry)) {
    if (tau_.rows() < tau_.cols() || tau_.cols() == 0) {
      throw Error(ErrorKind::DimMismatch, "embedding must map into a space at least as large");
    }
    const double defect = max_abs(tau_.adjoint() * tau_ - identity(tau_.cols()));
    if (defect > 1e-10) {
      throw Error(ErrorKind::DimMismatch,
                  "embedding is not an isometry (defect " + std::to_string(defect) + ")");
    }
  }

  const std::string& from_space() const { return from_; }
  const std::string& to_space() const { return to_; }
  const Matrix& isometry() const { return tau_; }
  Eigen::Index from_dim() const { return tau_.cols(); }
  Eigen::Index to_dim() const { return tau_.rows(); }

  Matrix projection() const { return tau_ * tau_.adjoint(); }

  /// τ† x: coordinates of the projected vector in the smaller space.
  Vector pull_back(const Vector& x) const { return tau_.adjoint() * x; }
  Vector push_forward(const Vector& x) const { return tau_ * x; }

  /// τ† A τ.
  Matrix compress(const Matrix& a) const { return tau_.adjoint() * a * tau_; }
  /// τ A τ† = A ⊕ 0.
  Matrix extend(const Matrix& a) const { return tau_ * a * tau_.adjoint(); }

 private:
  std::string from_;
  std::string to_;
  Matrix tau_;
};

inline Embedding identity_embedding(Eigen::Index n, const std::string& space = "H") {
  return Embedding(space, space, identity(n));
}

/// φ ↦ φ ⊗ ω, with ω normalized.
inline Embedding tensor_embedding(Eigen::Index dim, const Vector& omega,
                                  const std::string& from = "H",
                                  const std::string& to = "H*env") {
  const Vector w = omega / omega.norm();
  return Embedding(from, to, kron(identity(dim), Matrix(w)));
}

/// Inserts a normalized ω as a new tensor factor at position `pos` of a product
/// space with factor dimensions `dims` (pos == dims.size() appends on the right).
inline Embedding insertion_embedding(const std::vector<Eigen::Index>& dims, std::size_t pos,
                                     const Vector& omega, const std::string& from = "H",
                                     const std::string& to = "H*env") {
  if (pos > dims.size()) throw Error(ErrorKind::DimMismatch, "insertion position out of range");
  Eigen::Index left = 1, right = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) (k < pos ? left : right) *= dims[k];
  const Vector w = omega / omega.norm();
  const Matrix tau = kron(kron(identity(left), Matrix(w)), identity(right));
  return Embedding(from, to, tau);
}

inline Embedding compose(const Embedding& first, const Embedding& second) {
  if (first.to_dim() != second.from_dim()) {
    throw Error(ErrorKind::DimMismatch, "embeddings do not compose");
  }
  return Embedding(first.from_space(), second.to_space(), second.isometry() * first.isometry());
}

// ---------------------------------------------------------------------------
// Inheritance P_1 ⇢ P_2: π ⊵ 0 w.r.t. P_2 and π P_2 = P_1.

struct InheritanceReport {
  bool projection_preserving = false;  // (a)
  bool images_in_cone = false;         // (b) π g ∈ P_1 for every generator g of P_2
  bool generators_reached = false;     // (c) every generator of P_1 lies in coni{π g}
  double max_residual = 0.0;
  std::optional<Eigen::Index> unreached_generator;

  bool holds() const { return projection_preserving && images_in_cone && generators_reached; }
};

inline InheritanceReport inheritance_report(const SelfDualCone& p1, const SelfDualCone& p2,
                                            const Embedding& emb,
                                            double tol = kInheritanceResidualTol) {
  if (emb.from_dim() != p1.dim() || emb.to_dim() != p2.dim()) {
    throw Error(ErrorKind::DimMismatch, "embedding dimensions do not match the cones");
  }
  InheritanceReport r;
  r.projection_preserving = classify(emb.projection(), p2).preserving;

  // Coordinates of τ† g_j in the generator basis of P_1, one column per g_j.
  const Matrix coords = p1.generators().adjoint() * emb.isometry().adjoint() * p2.generators();
  const double scale = std::max(max_abs(coords), 1e-300);
  r.images_in_cone = classify_basis_matrix(coords, kDefaultConeTol).preserving ||
                     coords.rows() == 0;
  if (!r.images_in_cone) return r;

  const RealMatrix c = coords.real();
  r.generators_reached = true;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    // Fast path: some image is a positive multiple of u_i.
    bool direct = false;
    for (Eigen::Index j = 0; j < c.cols() && !direct; ++j) {
      if (c(i, j) <= 1e-12 * scale) continue;
      double off = 0.0;
      for (Eigen::Index k = 0; k < c.rows(); ++k)
        if (k != i) off = std::max(off, std::abs(c(k, j)));
      direct = off <= 1e-14 * scale;
    }
    if (direct) continue;
    const RealVector target = RealVector::Unit(c.rows(), i);
    const NnlsResult sol = nnls(c, target);
    r.max_residual = std::max(r.max_residual, sol.residual);
    if (sol.residual > tol) {
      r.generators_reached = false;
      r.unreached_generator = i;
      break;
    }
  }
  return r;
}

inline bool cone_inherits(const SelfDualCone& p1, const SelfDualCone& p2, const Embedding& emb,
                          double tol = kInheritanceResidualTol) {
  return inheritance_report(p1, p2, emb, tol).holds();
}

/// ℰ(A) = πAπ + π^⊥Aπ^⊥ on the larger space.
inline Matrix conditional_expectation(const Embedding& emb, const Matrix& a) {
  if (a.rows() != emb.to_dim() || a.cols() != emb.to_dim()) {
    throw Error(ErrorKind::DimMismatch, "operator does not act on the embedding's target space");
  }
  const Matrix pi = emb.projection();
  const Matrix perp = identity(pi.rows()) - pi;
  return pi * a * pi + perp * a * perp;
}

// ---------------------------------------------------------------------------
// Arrows

enum class ArrowFailure { SourceNotInAPlus, TargetNotInAPlus, ConeNotInherited };

inline const char* to_string(ArrowFailure f) {
  switch (f) {
    case ArrowFailure::SourceNotInAPlus: return "source not in A+";
    case ArrowFailure::TargetNotInAPlus: return "target not in A+";
    case ArrowFailure::ConeNotInherited: return "cone not inherited";
  }
  return "unknown";
}

struct ArrowCheck {
  std::vector<ArrowFailure> failures;
  InheritanceReport inheritance;

  bool holds() const { return failures.empty(); }
  std::string reason() const {
    std::string s;
    for (ArrowFailure f : failures) s += (s.empty() ? "" : "; ") + std::string(to_string(f));
    return s;
  }
};

inline ArrowCheck arrow(const Matrix& h1, const SelfDualCone& p1, const Matrix& h2,
                        const SelfDualCone& p2, const Embedding& emb) {
  ArrowCheck c;
  if (!in_class_A_plus(h1, p1)) c.failures.push_back(ArrowFailure::SourceNotInAPlus);
  if (!in_class_A_plus(h2, p2)) c.failures.push_back(ArrowFailure::TargetNotInAPlus);
  c.inheritance = inheritance_report(p1, p2, emb);
  if (!c.inheritance.holds()) c.failures.push_back(ArrowFailure::ConeNotInherited);
  return c;
}

struct OverlapCheck {
  double overlap = 0.0;       // <ψ_1|τ†ψ_2>
  bool improving_ok = false;  // τ† ℰ(ρ_{ψ_2}) τ ⊳ 0 w.r.t. P_1
};

inline OverlapCheck strict_overlap_unchecked(const Matrix& h1, const SelfDualCone& p1,
                                             const Matrix& h2, const SelfDualCone& p2,
                                             const Embedding& emb) {
  const GroundState g1 = cone_ground_state(h1, p1);
  const GroundState g2 = cone_ground_state(h2, p2);
  const Vector phi = emb.pull_back(g2.vector);
  OverlapCheck o;
  o.overlap = g1.vector.dot(phi).real();
  const Matrix compressed = emb.compress(conditional_expectation(emb, density_matrix(g2.vector)));
  o.improving_ok = classify(compressed, p1).improving;
  return o;
}

inline OverlapCheck strict_overlap_verify(const Matrix& h1, const SelfDualCone& p1,
                                          const Matrix& h2, const SelfDualCone& p2,
                                          const Embedding& emb) {
  const ArrowCheck a = arrow(h1, p1, h2, p2, emb);
  if (!a.holds()) throw Error(ErrorKind::ArrowFailed, a.reason());
  return strict_overlap_unchecked(h1, p1, h2, p2, emb);
}

// ---------------------------------------------------------------------------
// Chains (H_1,P_1) -> (H_2,P'_2), (H_2,P_2) -> (H_3,P'_3), ...

struct ChainNode {
  std::string id;
  Matrix hamiltonian;
  SelfDualCone cone;                         // P_j, used when leaving this node
  std::optional<SelfDualCone> target_cone;   // P'_j, used when arriving; defaults to P_j
  std::optional<Matrix> observable;          // the observable on this node's space, if known

  const SelfDualCone& incoming_cone() const { return target_cone ? *target_cone : cone; }
};

class ArrowChain {
 public:
  explicit ArrowChain(ChainNode first) { nodes_.push_back(std::move(first)); }

  void append(Embedding emb, ChainNode next) {
    if (emb.from_dim() != nodes_.back().hamiltonian.rows() ||
        emb.to_dim() != next.hamiltonian.rows()) {
      throw Error(ErrorKind::DimMismatch, "link embedding does not compose with its nodes",
                  embeddings_.size());
    }
    embeddings_.push_back(std::move(emb));
    nodes_.push_back(std::move(next));
  }

  const std::vector<ChainNode>& nodes() const { return nodes_; }
  std::vector<ChainNode>& nodes() { return nodes_; }
  const std::vector<Embedding>& embeddings() const { return embeddings_; }
  std::size_t link_count() const { return embeddings_.size(); }

  /// H -> H' followed by H' -> H'': the shared node keeps the incoming cone of
  /// the first chain and the outgoing cone of the second.
  static ArrowChain concatenate(const ArrowChain& a, const ArrowChain& b) {
    const Matrix& end = a.nodes_.back().hamiltonian;
    const Matrix& start = b.nodes_.front().hamiltonian;
    if (end.rows() != start.rows() ||
        max_abs(end - start) > 1e-12 * std::max(1.0, max_abs(end))) {
      throw Error(ErrorKind::DimMismatch, "chains do not share their junction Hamiltonian");
    }
    ArrowChain out = a;
    ChainNode& junction = out.nodes_.back();
    junction.target_cone = a.nodes_.back().incoming_cone();
    junction.cone = b.nodes_.front().cone;
    if (!junction.observable) junction.observable = b.nodes_.front().observable;
    for (std::size_t k = 0; k < b.embeddings_.size(); ++k) {
      out.embeddings_.push_back(b.embeddings_[k]);
      out.nodes_.push_back(b.nodes_[k + 1]);
    }
    return out;
  }

 private:
  std::vector<ChainNode> nodes_;
  std::vector<Embedding> embeddings_;
};

struct LinkReport {
  std::size_t index = 0;
  ArrowCheck arrow;
  OverlapCheck overlap;
};

struct ChainReport {
  std::vector<LinkReport> links;
  double overlap_product = 1.0;
  std::optional<std::size_t> failed_link;
  std::string failure;

  bool verified() const { return !failed_link.has_value(); }

  void throw_if_failed() const {
    if (failed_link) throw Error(ErrorKind::LinkFailed, failure, failed_link);
  }
};

inline ChainReport chain_verify(const ArrowChain& chain,
                                std::size_t threads = default_thread_count()) {
  const auto& nodes = chain.nodes();
  ChainReport r;
  r.links.resize(chain.link_count());
  parallel_for(
      chain.link_count(),
      [&](std::size_t k) {
        LinkReport& l = r.links[k];
        l.index = k;
        const ChainNode& src = nodes[k];
        const ChainNode& dst = nodes[k + 1];
        const Embedding& emb = chain.embeddings()[k];
        l.arrow = arrow(src.hamiltonian, src.cone, dst.hamiltonian, dst.incoming_cone(), emb);
        if (l.arrow.holds()) {
          l.overlap = strict_overlap_unchecked(src.hamiltonian, src.cone, dst.hamiltonian,
                                               dst.incoming_cone(), emb);
        }
      },
      threads);
  for (const LinkReport& l : r.links) {
    if (!l.arrow.holds()) {
      r.failed_link = l.index;
      r.failure = l.arrow.reason();
      break;
    }
    if (!(l.overlap.overlap > 1e-12) || !l.overlap.improving_ok) {
      r.failed_link = l.index;
      r.failure = "ground-state overlap not strictly positive";
      break;
    }
    r.overlap_product *= l.overlap.overlap;
  }
  if (r.failed_link) r.overlap_product = 0.0;
  return r;
}

}  // namespace conecalc
