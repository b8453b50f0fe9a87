#pragma once

// The Boolean lattice of perturbations H_I = H_0 ⊗ 1 - X ⊗ Y_I over subsets
// I ⊆ {1..ℓ}, with Y_I the Kronecker sum of the Y_μ, μ ∈ I, in ascending μ.
// Larger I sits lower: H_{I_1} -> H_{I_2} whenever I_1 ⊆ I_2.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conecalc/cones.hpp"
#include "conecalc/error.hpp"
#include "conecalc/inheritance.hpp"
#include "conecalc/numerics.hpp"
#include "conecalc/parallel.hpp"
#include "conecalc/positivity.hpp"
#include "conecalc/semigroup.hpp"
#include "conecalc/stability.hpp"

namespace conecalc {

inline constexpr Eigen::Index kDefaultLatticeDimCap = 4096;

struct LatticeSpec {
  Matrix h0;
  SelfDualCone base_cone;
  Matrix observable;
  Matrix coupling;          // X, acting on the base space
  std::vector<Matrix> ys;   // Y_μ on C^{n_μ}

  std::size_t ell() const { return ys.size(); }
  Eigen::Index base_dim() const { return h0.rows(); }
};

using Subset = std::vector<int>;  // sorted, 1-based

inline std::string subset_label(const Subset& s) {
  if (s.empty()) return "H_0";
  std::string out = "H_{";
  for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k]);
  return out + "}";
}

/// All subsets of {1..ell} ordered by (size, lexicographic).
inline std::vector<Subset> ordered_subsets(std::size_t ell) {
  std::vector<Subset> out;
  for (unsigned mask = 0; mask < (1u << ell); ++mask) {
    Subset s;
    for (std::size_t mu = 0; mu < ell; ++mu)
      if (mask & (1u << mu)) s.push_back(static_cast<int>(mu + 1));
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const Subset& a, const Subset& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Assumption checks

struct LatticeSpecReport {
  bool coupling_preserving = false;  // (i) X ⊵ 0 w.r.t. the base cone
  std::optional<MatrixWitness> coupling_witness;
  bool coupling_commutes = false;    // (ii) [X, O] = 0
  double coupling_commutator = 0.0;
  bool h0_commutes = false;          // [H_0, O] = 0
  std::vector<bool> y_ergodic;       // (iii)
  std::vector<std::optional<std::pair<Eigen::Index, Eigen::Index>>> y_failing_pair;
  bool condition_h = false;          // e^{-βH_0} ⊳ 0 for all β > 0
  std::string failure;

  bool passes() const {
    return coupling_preserving && coupling_commutes && h0_commutes && condition_h &&
           std::all_of(y_ergodic.begin(), y_ergodic.end(), [](bool b) { return b; });
  }
};

inline LatticeSpecReport verify_spec(const LatticeSpec& spec) {
  LatticeSpecReport r;
  auto note = [&r](const std::string& s) { r.failure += (r.failure.empty() ? "" : "; ") + s; };
  const Eigen::Index d = spec.base_dim();
  if (spec.coupling.rows() != d || spec.observable.rows() != d || spec.base_cone.dim() != d) {
    throw Error(ErrorKind::DimMismatch, "lattice operators do not share the base space");
  }
  require_hermitian(spec.coupling, "X");

  const PositivityReport xr = classify(spec.coupling, spec.base_cone);
  r.coupling_preserving = xr.preserving;
  r.coupling_witness = xr.preserving_witness;
  if (!r.coupling_preserving) note("(i) X does not preserve the base cone");

  const CommutationCheck xc = commutation_check(spec.coupling, spec.observable);
  r.coupling_commutes = xc.commuting;
  r.coupling_commutator = xc.commutator_norm;
  if (!r.coupling_commutes) note("(ii) X does not commute with O");

  r.h0_commutes = in_class_P_O(spec.h0, spec.observable);
  if (!r.h0_commutes) note("H_0 does not commute with O");

  for (std::size_t mu = 0; mu < spec.ell(); ++mu) {
    const Matrix& y = spec.ys[mu];
    require_hermitian(y, "Y_mu");
    const SelfDualCone cone = orthant(y.rows());
    bool ok = false;
    std::optional<std::pair<Eigen::Index, Eigen::Index>> pair;
    if (classify(y, cone).preserving) {
      const ErgodicityReport er = is_ergodic(y, cone);
      ok = er.ergodic;
      pair = er.failing_pair;
    }
    r.y_ergodic.push_back(ok);
    r.y_failing_pair.push_back(pair);
    if (!ok) note("(iii) Y_" + std::to_string(mu + 1) + " is not ergodic");
  }

  bool improving = in_class_A_plus(spec.h0, spec.base_cone);
  if (improving) {
    const Spectrum s = hermitian_eig(spec.h0);
    for (double beta : default_beta_samples()) {
      const Matrix e = spectral_apply(s, [beta](double l) { return cplx(std::exp(-beta * l), 0.0); });
      improving = improving && classify(e, spec.base_cone).improving;
    }
  }
  r.condition_h = improving;
  if (!r.condition_h) note("(H) e^{-βH_0} does not improve the base cone");
  return r;
}

// ---------------------------------------------------------------------------
// Nodes

struct LatticeNode {
  Subset subset;
  std::string id;
  Matrix hamiltonian;
  SelfDualCone cone;
  Embedding embedding;  // base space -> node space, φ ↦ φ ⊗ ω_I
  Matrix observable;    // O ⊗ 1
  GoodQuantumNumber mu;
};

/// Y_I = Σ_j 1 ⊗ ... ⊗ Y_{μ_j} ⊗ ... ⊗ 1.
inline Matrix kronecker_sum(const std::vector<Matrix>& factors) {
  Eigen::Index total = 1;
  for (const auto& f : factors) total *= f.rows();
  Matrix sum = Matrix::Zero(total, total);
  Eigen::Index left = 1;
  for (const auto& f : factors) {
    const Eigen::Index right = total / (left * f.rows());
    sum += kron(kron(identity(left), f), identity(right));
    left *= f.rows();
  }
  return sum;
}

inline LatticeNode build_node_unchecked(const LatticeSpec& spec, const Subset& subset) {
  const Eigen::Index d = spec.base_dim();
  std::vector<Matrix> factors;
  Vector omega = Vector::Ones(1);
  SelfDualCone cone = spec.base_cone;
  for (int mu : subset) {
    if (mu < 1 || static_cast<std::size_t>(mu) > spec.ell()) {
      throw Error(ErrorKind::SpecFailed, "subset index " + std::to_string(mu) + " out of range");
    }
    const Matrix& y = spec.ys[mu - 1];
    factors.push_back(y);
    omega = kron(omega, uniform_vector(y.rows()));
    cone = tensor_cone(cone, orthant(y.rows()));
  }
  const Eigen::Index env = omega.size();
  const std::string id = subset_label(subset);
  Matrix h = spec.h0;
  if (!subset.empty()) {
    const Matrix y_sum = kronecker_sum(factors);
    if (!is_ergodic(y_sum, orthant(env)).ergodic) {
      throw Error(ErrorKind::ClassificationFailed, "Y_I is not ergodic for " + id);
    }
    h = kron(spec.h0, identity(env)) - kron(spec.coupling, y_sum);
  }
  if (!in_class_A_plus(h, cone)) {
    throw Error(ErrorKind::ClassificationFailed, id + " is not in A+ for its cone");
  }
  Embedding emb = tensor_embedding(d, omega, spec.base_cone.space(), cone.space());
  Matrix obs = kron(spec.observable, identity(env));
  GoodQuantumNumber q = good_quantum_number(h, obs, cone);
  return LatticeNode{subset, id, std::move(h), std::move(cone), std::move(emb), std::move(obs),
                     std::move(q)};
}

inline LatticeNode build_node(const LatticeSpec& spec, const Subset& subset) {
  const LatticeSpecReport r = verify_spec(spec);
  if (!r.passes()) throw Error(ErrorKind::SpecFailed, r.failure);
  Subset sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::SpecFailed, "subset has repeated elements");
  }
  return build_node_unchecked(spec, sorted);
}

/// Embedding H_{I} -> H_{I ∪ {μ}}: inserts ω_μ at the factor position of μ.
inline Embedding covering_embedding(const LatticeSpec& spec, const Subset& smaller, int mu) {
  std::vector<Eigen::Index> dims{spec.base_dim()};
  std::size_t pos = 1;
  for (int nu : smaller) {
    dims.push_back(spec.ys[nu - 1].rows());
    if (nu < mu) ++pos;
  }
  Subset larger = smaller;
  larger.insert(std::upper_bound(larger.begin(), larger.end(), mu), mu);
  return insertion_embedding(dims, pos, uniform_vector(spec.ys[mu - 1].rows()),
                             subset_label(smaller), subset_label(larger));
}

// ---------------------------------------------------------------------------
// Diagram

struct CoveringEdge {
  std::size_t lower_set = 0;  // index of I
  std::size_t upper_set = 0;  // index of I ∪ {μ}
  int added = 0;              // μ
  double overlap = 0.0;
  bool verified = false;
};

struct HasseDiagram {
  std::vector<LatticeNode> nodes;
  std::vector<CoveringEdge> edges;
  double mu_star = 0.0;

  std::optional<std::size_t> index_of(const Subset& s) const {
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (nodes[k].subset == s) return k;
    return std::nullopt;
  }
};

inline HasseDiagram build_lattice(const LatticeSpec& spec,
                                  Eigen::Index dim_cap = kDefaultLatticeDimCap,
                                  std::size_t threads = default_thread_count()) {
  const LatticeSpecReport report = verify_spec(spec);
  if (!report.passes()) throw Error(ErrorKind::SpecFailed, report.failure);
  Eigen::Index total = spec.base_dim();
  for (const auto& y : spec.ys) total *= y.rows();
  if (total > dim_cap) {
    throw Error(ErrorKind::DimCap, "total dimension " + std::to_string(total) +
                                       " exceeds cap " + std::to_string(dim_cap));
  }

  const std::vector<Subset> subsets = ordered_subsets(spec.ell());
  std::vector<std::optional<LatticeNode>> built(subsets.size());
  parallel_for(
      subsets.size(), [&](std::size_t k) { built[k] = build_node_unchecked(spec, subsets[k]); },
      threads);

  HasseDiagram diagram;
  for (auto& n : built) diagram.nodes.push_back(std::move(*n));
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    for (int mu = 1; mu <= static_cast<int>(spec.ell()); ++mu) {
      if (std::binary_search(subsets[k].begin(), subsets[k].end(), mu)) continue;
      Subset larger = subsets[k];
      larger.insert(std::upper_bound(larger.begin(), larger.end(), mu), mu);
      diagram.edges.push_back(CoveringEdge{k, *diagram.index_of(larger), mu, 0.0, false});
    }
  }

  parallel_for(
      diagram.edges.size(),
      [&](std::size_t e) {
        CoveringEdge& edge = diagram.edges[e];
        const LatticeNode& lo = diagram.nodes[edge.lower_set];
        const LatticeNode& hi = diagram.nodes[edge.upper_set];
        const Embedding emb = covering_embedding(spec, lo.subset, edge.added);
        const ArrowCheck a = arrow(lo.hamiltonian, lo.cone, hi.hamiltonian, hi.cone, emb);
        if (!a.holds()) {
          throw Error(ErrorKind::LinkFailed, lo.id + " -> " + hi.id + ": " + a.reason(), e);
        }
        const OverlapCheck o = strict_overlap_unchecked(lo.hamiltonian, lo.cone, hi.hamiltonian,
                                                        hi.cone, emb);
        if (!(o.overlap > 1e-12) || !o.improving_ok) {
          throw Error(ErrorKind::LinkFailed, lo.id + " -> " + hi.id + ": overlap vanishes", e);
        }
        edge.overlap = o.overlap;
        edge.verified = true;
      },
      threads);

  diagram.mu_star = diagram.nodes.front().mu.snapped_mu;
  const double onorm = hermitian_norm(spec.observable);
  for (std::size_t k = 0; k < diagram.nodes.size(); ++k) {
    if (std::abs(diagram.nodes[k].mu.snapped_mu - diagram.mu_star) > kMuTol * onorm) {
      throw Error(ErrorKind::MuMismatch, diagram.nodes[k].id + " has a different μ", k);
    }
  }
  return diagram;
}

/// Chain H_{I_0} -> H_{I_1} -> ... along a saturated path of subsets, each
/// step adding one element.
inline ArrowChain lattice_chain(const LatticeSpec& spec, const HasseDiagram& diagram,
                                const std::vector<Subset>& path) {
  if (path.empty()) throw Error(ErrorKind::DimMismatch, "empty lattice path");
  auto node_at = [&](const Subset& s) -> const LatticeNode& {
    const auto idx = diagram.index_of(s);
    if (!idx) throw Error(ErrorKind::DimMismatch, "subset not in diagram: " + subset_label(s));
    return diagram.nodes[*idx];
  };
  auto to_chain_node = [](const LatticeNode& n) {
    return ChainNode{n.id, n.hamiltonian, n.cone, std::nullopt, n.observable};
  };
  ArrowChain chain(to_chain_node(node_at(path.front())));
  for (std::size_t k = 1; k < path.size(); ++k) {
    const Subset& lo = path[k - 1];
    const Subset& hi = path[k];
    Subset added;
    std::set_difference(hi.begin(), hi.end(), lo.begin(), lo.end(), std::back_inserter(added));
    if (added.size() != 1 || hi.size() != lo.size() + 1) {
      throw Error(ErrorKind::DimMismatch, "lattice path step is not a covering", k - 1);
    }
    chain.append(covering_embedding(spec, lo, added.front()), to_chain_node(node_at(hi)));
  }
  return chain;
}

/// DOT rendering: one rank per |I|, edges from I ∪ {μ} up to I, H_0 on top.
inline std::string hasse_export(const HasseDiagram& diagram) {
  std::ostringstream out;
  out << "digraph hasse {\n";
  out << "  rankdir=BT;\n";
  out << "  node [shape=plaintext];\n";
  std::size_t k = 0;
  while (k < diagram.nodes.size()) {
    const std::size_t rank = diagram.nodes[k].subset.size();
    out << "  { rank=same;";
    for (; k < diagram.nodes.size() && diagram.nodes[k].subset.size() == rank; ++k) {
      out << " n" << k << " [label=\"" << diagram.nodes[k].id << "\"];";
    }
    out << " }\n";
  }
  std::vector<std::pair<std::size_t, std::size_t>> arrows;
  for (const auto& e : diagram.edges) arrows.emplace_back(e.upper_set, e.lower_set);
  std::sort(arrows.begin(), arrows.end());
  for (const auto& [from, to] : arrows) out << "  n" << from << " -> n" << to << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace conecalc
