#pragma once

// Classification of operators against a simplicial self-dual cone. Everything
// is decided on the matrix M_ij = <u_i|A u_j> in the generator basis:
//   A preserves the cone  <=>  M real and entrywise >= 0,
//   A improves the cone   <=>  M real and entrywise > 0.

#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "conecalc/cones.hpp"
#include "conecalc/error.hpp"
#include "conecalc/numerics.hpp"

namespace conecalc {

inline constexpr double kRoundoffFloor = 1e-14;

struct MatrixWitness {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  cplx value;
};

struct PositivityReport {
  bool preserving = false;
  bool improving = false;
  bool real_form = false;
  std::optional<MatrixWitness> real_form_witness;
  std::optional<MatrixWitness> preserving_witness;
  std::optional<MatrixWitness> improving_witness;
};

inline PositivityReport classify_basis_matrix(const Matrix& m, double tol) {
  PositivityReport r;
  const double scale = max_abs(m);
  MatrixWitness worst_imag, worst_real;
  double max_imag = -1.0;
  double min_real = 0.0;
  bool first = true;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const cplx v = m(i, j);
      if (std::abs(v.imag()) > max_imag) {
        max_imag = std::abs(v.imag());
        worst_imag = {i, j, v};
      }
      if (first || v.real() < min_real) {
        min_real = v.real();
        worst_real = {i, j, v};
        first = false;
      }
    }
  }
  r.real_form = max_imag <= tol * scale;
  if (!r.real_form) {
    r.real_form_witness = worst_imag;
    r.preserving_witness = worst_imag;
    r.improving_witness = worst_imag;
    return r;
  }
  r.preserving = min_real >= -tol * scale;
  r.improving = min_real > tol * scale;
  if (!r.preserving) r.preserving_witness = worst_real;
  if (!r.improving) r.improving_witness = worst_real;
  return r;
}

inline PositivityReport classify(const Matrix& a, const SelfDualCone& p,
                                 double tol = kDefaultConeTol) {
  return classify_basis_matrix(p.in_basis(a), tol);
}

/// A ⊵ B: both leave the real form invariant and A - B preserves the cone.
inline bool operator_order(const Matrix& a, const Matrix& b, const SelfDualCone& p,
                           double tol = kDefaultConeTol) {
  const Matrix ma = p.in_basis(a);
  const Matrix mb = p.in_basis(b);
  if (!classify_basis_matrix(ma, tol).real_form) {
    throw Error(ErrorKind::NotRealForm, "left operand does not preserve the real form");
  }
  if (!classify_basis_matrix(mb, tol).real_form) {
    throw Error(ErrorKind::NotRealForm, "right operand does not preserve the real form");
  }
  return classify_basis_matrix(ma - mb, tol).preserving;
}

// ---------------------------------------------------------------------------
// Digraphs on generators

/// adjacency[i][j] == true means an edge j -> i.
using Adjacency = std::vector<std::vector<bool>>;

struct EdgeSet {
  Adjacency adjacency;
  bool indeterminate = false;  // some off-diagonal entry lies between roundoff and threshold
};

/// Edge j -> i iff sign * Re M_ij > tol * scale (off-diagonal only).
inline EdgeSet edges_from(const Matrix& m, double sign, double tol) {
  const Eigen::Index n = m.rows();
  const double scale = max_abs(m);
  EdgeSet e;
  e.adjacency.assign(n, std::vector<bool>(n, false));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = sign * m(i, j).real();
      if (v > tol * scale) {
        e.adjacency[i][j] = true;
      } else if (std::abs(v) > kRoundoffFloor * scale) {
        e.indeterminate = true;
      }
    }
  }
  return e;
}

/// Shortest path lengths from `source` following edges j -> i.
inline std::vector<int> bfs_distances(const Adjacency& adj, std::size_t source) {
  const std::size_t n = adj.size();
  std::vector<int> dist(n, -1);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const std::size_t j = queue.front();
    queue.pop_front();
    for (std::size_t i = 0; i < n; ++i) {
      if (adj[i][j] && dist[i] < 0) {
        dist[i] = dist[j] + 1;
        queue.push_back(i);
      }
    }
  }
  return dist;
}

inline bool strongly_connected(const Adjacency& adj) {
  const std::size_t n = adj.size();
  if (n <= 1) return true;
  Adjacency reversed(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) reversed[j][i] = adj[i][j];
  for (const Adjacency* g : {&adj, static_cast<const Adjacency*>(&reversed)}) {
    const auto d = bfs_distances(*g, 0);
    for (int v : d)
      if (v < 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Ergodicity

struct ErgodicityReport {
  bool ergodic = false;
  /// k_table[i][j]: least k >= 0 with <u_i|A^k u_j> > 0, if any.
  std::vector<std::vector<std::optional<int>>> k_table;
  std::optional<std::pair<Eigen::Index, Eigen::Index>> failing_pair;
  bool indeterminate = false;

  int max_k() const {
    int k = 0;
    for (const auto& row : k_table)
      for (const auto& v : row)
        if (v) k = std::max(k, *v);
    return k;
  }
};

inline ErgodicityReport is_ergodic(const Matrix& a, const SelfDualCone& p,
                                   double tol = kDefaultConeTol) {
  const Matrix m = p.in_basis(a);
  if (!classify_basis_matrix(m, tol).preserving) {
    throw Error(ErrorKind::NotPreserving, "ergodicity requires a positivity-preserving operator");
  }
  const EdgeSet edges = edges_from(m, 1.0, tol);
  const auto n = static_cast<std::size_t>(m.rows());
  ErgodicityReport r;
  r.indeterminate = edges.indeterminate;
  r.k_table.assign(n, std::vector<std::optional<int>>(n));
  r.ergodic = true;
  for (std::size_t j = 0; j < n; ++j) {
    const auto dist = bfs_distances(edges.adjacency, j);
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i] >= 0) {
        r.k_table[i][j] = dist[i];
      } else if (r.ergodic) {
        r.ergodic = false;
        r.failing_pair = {static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)};
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// The classes of Hamiltonians with positivity preserving / improving semigroups

struct MetzlerReport {
  bool real_form = false;
  bool metzler = false;             // all off-diagonal generator entries <= 0
  bool strongly_connected = false;  // digraph of -H off-diagonals
  bool indeterminate = false;
  std::optional<MatrixWitness> witness;
};

inline MetzlerReport metzler_analysis(const Matrix& h, const SelfDualCone& p,
                                      double tol = kDefaultConeTol) {
  require_hermitian(h, "Hamiltonian");
  const Matrix m = p.in_basis(h);
  const double scale = max_abs(m);
  MetzlerReport r;
  const PositivityReport rf = classify_basis_matrix(m, tol);
  r.real_form = rf.real_form;
  if (!r.real_form) {
    r.witness = rf.real_form_witness;
    return r;
  }
  r.metzler = true;
  double worst = -1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i == j) continue;
      const double v = m(i, j).real();
      if (v > tol * scale && v > worst) {
        r.metzler = false;
        worst = v;
        r.witness = MatrixWitness{i, j, m(i, j)};
      }
    }
  }
  const EdgeSet edges = edges_from(m, -1.0, tol);
  r.indeterminate = edges.indeterminate;
  r.strongly_connected = strongly_connected(edges.adjacency);
  return r;
}

/// H in the class whose semigroup e^{-βH} preserves the cone for all β >= 0.
inline bool in_class_A(const Matrix& h, const SelfDualCone& p, double tol = kDefaultConeTol) {
  const MetzlerReport r = metzler_analysis(h, p, tol);
  return r.real_form && r.metzler;
}

/// H in the class whose resolvents improve the cone: Metzler and irreducible.
inline bool in_class_A_plus(const Matrix& h, const SelfDualCone& p,
                            double tol = kDefaultConeTol) {
  const MetzlerReport r = metzler_analysis(h, p, tol);
  if (!(r.real_form && r.metzler)) return false;
  if (r.indeterminate && !r.strongly_connected) {
    throw Error(ErrorKind::Indeterminate,
                "connectivity depends on off-diagonal entries below the edge threshold");
  }
  return r.strongly_connected;
}

/// sH + tH' for H, H' in the positivity-preserving class; the result is checked to stay there.
inline Matrix positive_combination(const Matrix& h1, const Matrix& h2, double s, double t,
                                   const SelfDualCone& p, double tol = kDefaultConeTol) {
  if (!(s > 0.0) || !(t > 0.0)) {
    throw Error(ErrorKind::InputNotInClass, "combination weights must be positive");
  }
  if (!in_class_A(h1, p, tol)) throw Error(ErrorKind::InputNotInClass, "first operand");
  if (!in_class_A(h2, p, tol)) throw Error(ErrorKind::InputNotInClass, "second operand");
  Matrix out = s * h1 + t * h2;
  if (!in_class_A(out, p, tol)) {
    throw Error(ErrorKind::Inconsistent, "combination left the positivity-preserving class");
  }
  return out;
}

}  // namespace conecalc

namespace conecalc {

struct GroundState {
  double energy = 0.0;
  Vector vector;
  double gap01 = 0.0;
  double norm = 0.0;
  bool simple = false;
};

/// Lowest eigenvector with its phase aligned to the cone: the generator
/// coordinate of largest modulus is made real positive.
inline GroundState cone_ground_state(const Matrix& h, const SelfDualCone& p,
                                     double rel_gap = 1e-8) {
  const Spectrum spec = hermitian_eig(h);
  GroundState g;
  g.energy = spec.ground_energy();
  g.vector = spec.ground_vector();
  g.gap01 = spec.gap01;
  g.norm = spec.norm;
  g.simple = spec.ground_is_simple(rel_gap);
  const Vector c = p.coordinates(g.vector);
  Eigen::Index best = 0;
  c.cwiseAbs().maxCoeff(&best);
  if (std::abs(c(best)) > 0.0) g.vector *= std::conj(c(best)) / std::abs(c(best));
  return g;
}

}  // namespace conecalc
