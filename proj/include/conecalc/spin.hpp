#pragma once

// Spin-1/2 systems: the Marshall-Lieb-Mattis Hamiltonian S_A·S_B, total spin,
// fixed-magnetization sectors and the Marshall sign cone.
//
// Basis convention: site x (1-based) is tensor factor x; in a basis index the
// bit (N - x) holds site x, with 0 = up (S^3 = +1/2) and 1 = down.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "conecalc/cones.hpp"
#include "conecalc/error.hpp"
#include "conecalc/inheritance.hpp"
#include "conecalc/numerics.hpp"
#include "conecalc/positivity.hpp"
#include "conecalc/stability.hpp"

namespace conecalc {

inline constexpr int kMaxSpinSites = 12;

struct SpinSystem {
  int sites = 0;
  std::vector<int> a;  // sublattice A, 1-based
  std::vector<int> b;  // sublattice B, 1-based

  void validate() const {
    if (sites < 1 || sites > kMaxSpinSites) {
      throw Error(ErrorKind::DimCap, "site count must be in [1, " +
                                         std::to_string(kMaxSpinSites) + "]");
    }
    std::vector<int> seen(sites + 1, 0);
    for (const auto* part : {&a, &b}) {
      for (int x : *part) {
        if (x < 1 || x > sites) throw Error(ErrorKind::DimMismatch, "site index out of range");
        if (seen[x]++) throw Error(ErrorKind::DimMismatch, "sublattices overlap at site " + std::to_string(x));
      }
    }
    for (int x = 1; x <= sites; ++x)
      if (!seen[x]) throw Error(ErrorKind::DimMismatch, "site " + std::to_string(x) + " is in neither sublattice");
  }

  double s_star() const { return std::abs(static_cast<double>(a.size()) - static_cast<double>(b.size())) / 2.0; }
};

/// Site x on the complementary set {x | x ∉ A}.
inline SpinSystem bipartition(int sites, std::vector<int> a) {
  std::sort(a.begin(), a.end());
  SpinSystem sys{sites, a, {}};
  for (int x = 1; x <= sites; ++x)
    if (!std::binary_search(a.begin(), a.end(), x)) sys.b.push_back(x);
  sys.validate();
  return sys;
}

inline std::uint32_t site_bit(int sites, int x) { return 1u << (sites - x); }

// ---------------------------------------------------------------------------
// Dense single-site operators (reference route)

class SpinOperators {
 public:
  explicit SpinOperators(int sites) : sites_(sites) {
    if (sites < 1 || sites > kMaxSpinSites) throw Error(ErrorKind::DimCap, "too many spin sites");
    Matrix local[3];
    local[0] = 0.5 * pauli_x();
    local[1] = Matrix(2, 2);
    local[1] << 0.0, cplx(0.0, -0.5), cplx(0.0, 0.5), 0.0;
    local[2] = 0.5 * pauli_z();
    for (int x = 1; x <= sites; ++x) {
      std::array<Matrix, 3> ops;
      const Eigen::Index left = Eigen::Index{1} << (x - 1);
      const Eigen::Index right = Eigen::Index{1} << (sites - x);
      for (int j = 0; j < 3; ++j) ops[j] = kron(kron(identity(left), local[j]), identity(right));
      ops_.push_back(std::move(ops));
    }
  }

  int sites() const { return sites_; }
  /// S_x^{(j)}, x in 1..N, j in 1..3.
  const Matrix& at(int x, int j) const { return ops_.at(x - 1).at(j - 1); }

 private:
  int sites_;
  std::vector<std::array<Matrix, 3>> ops_;
};

inline SpinOperators spin_operators(int sites) { return SpinOperators(sites); }

// ---------------------------------------------------------------------------
// Exchange operators built directly on basis states

using SitePair = std::pair<int, int>;

/// Σ J S_x·S_y over the given pairs, as a matrix on the span of `states`.
/// S_x·S_y is diagonal ±1/4 and flips antiparallel pairs with amplitude 1/2.
inline Matrix exchange_matrix(int sites, const std::vector<SitePair>& pairs,
                              const std::vector<std::uint32_t>& states, double coupling = 1.0) {
  const auto dim = static_cast<Eigen::Index>(states.size());
  std::vector<int> index(std::size_t{1} << sites, -1);
  for (Eigen::Index k = 0; k < dim; ++k) index[states[k]] = static_cast<int>(k);
  Matrix h = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const std::uint32_t s = states[k];
    for (const auto& [x, y] : pairs) {
      const std::uint32_t bx = site_bit(sites, x);
      const std::uint32_t by = site_bit(sites, y);
      const bool parallel = ((s & bx) != 0) == ((s & by) != 0);
      if (x == y) {
        h(k, k) += 0.75 * coupling;
        continue;
      }
      h(k, k) += (parallel ? 0.25 : -0.25) * coupling;
      if (!parallel) {
        const int target = index[s ^ bx ^ by];
        if (target >= 0) h(target, k) += 0.5 * coupling;
      }
    }
  }
  return h;
}

inline std::vector<std::uint32_t> all_states(int sites) {
  std::vector<std::uint32_t> s(std::size_t{1} << sites);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = static_cast<std::uint32_t>(k);
  return s;
}

inline std::vector<SitePair> bipartite_pairs(const SpinSystem& sys) {
  std::vector<SitePair> pairs;
  for (int x : sys.a)
    for (int y : sys.b) pairs.emplace_back(x, y);
  return pairs;
}

inline std::vector<SitePair> all_pairs(int sites) {
  std::vector<SitePair> pairs;
  for (int x = 1; x <= sites; ++x)
    for (int y = 1; y <= sites; ++y) pairs.emplace_back(x, y);
  return pairs;
}

/// H_MLM = S_A · S_B on the full space.
inline Matrix mlm_hamiltonian(const SpinSystem& sys) {
  sys.validate();
  return exchange_matrix(sys.sites, bipartite_pairs(sys), all_states(sys.sites));
}

/// Σ_{edges} J S_x·S_y on the full space.
inline Matrix heisenberg_hamiltonian(int sites, const std::vector<SitePair>& edges,
                                     double coupling = 1.0) {
  if (sites < 1 || sites > kMaxSpinSites) throw Error(ErrorKind::DimCap, "too many spin sites");
  return exchange_matrix(sites, edges, all_states(sites), coupling);
}

struct TotalSpin {
  Matrix s_tot_sq;
  Matrix s3_tot;
};

inline Matrix s3_total(int sites, const std::vector<std::uint32_t>& states) {
  const auto dim = static_cast<Eigen::Index>(states.size());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const int down = std::popcount(states[k]);
    m(k, k) = 0.5 * (sites - 2 * down);
  }
  return m;
}

inline TotalSpin total_spin(int sites) {
  if (sites < 1 || sites > kMaxSpinSites) throw Error(ErrorKind::DimCap, "too many spin sites");
  const auto states = all_states(sites);
  return {exchange_matrix(sites, all_pairs(sites), states), s3_total(sites, states)};
}

// ---------------------------------------------------------------------------
// Magnetization sectors and the Marshall cone

struct MSector {
  double m = 0.0;
  std::vector<std::uint32_t> states;  // ascending basis indices with S^3_tot = m
  Embedding embedding;                // sector -> full space

  Eigen::Index dim() const { return static_cast<Eigen::Index>(states.size()); }
};

inline MSector build_sector(int sites, double m) {
  if (sites < 1 || sites > kMaxSpinSites) throw Error(ErrorKind::DimCap, "too many spin sites");
  const double up_d = sites / 2.0 + m;
  const int up = static_cast<int>(std::lround(up_d));
  if (std::abs(up_d - up) > 1e-12 || up < 0 || up > sites) {
    throw Error(ErrorKind::EmptySector, "no states with S^3_tot = " + std::to_string(m) +
                                            " on " + std::to_string(sites) + " sites");
  }
  std::vector<std::uint32_t> states;
  for (std::uint32_t s = 0; s < (1u << sites); ++s)
    if (std::popcount(s) == sites - up) states.push_back(s);
  Matrix tau = Matrix::Zero(Eigen::Index{1} << sites, static_cast<Eigen::Index>(states.size()));
  for (std::size_t k = 0; k < states.size(); ++k) tau(states[k], static_cast<Eigen::Index>(k)) = 1.0;
  return MSector{m, states, Embedding("M=" + std::to_string(m), "spins", std::move(tau))};
}

/// Operators restricted to a sector, computed on the sector states directly.
inline Matrix sector_mlm_hamiltonian(const SpinSystem& sys, const MSector& sector) {
  return exchange_matrix(sys.sites, bipartite_pairs(sys), sector.states);
}

inline Matrix sector_total_spin_sq(int sites, const MSector& sector) {
  return exchange_matrix(sites, all_pairs(sites), sector.states);
}

/// Marshall sign (-1)^{# down spins on A}.
inline int marshall_sign(const SpinSystem& sys, std::uint32_t state) {
  int down = 0;
  for (int x : sys.a)
    if (state & site_bit(sys.sites, x)) ++down;
  return (down % 2) ? -1 : 1;
}

/// Cone generated by ε(σ)|σ⟩ over the sector's Ising states. `restricted_h`
/// (a Hamiltonian on the sector) must be Metzler in this basis, otherwise SignRuleFailed.
inline SelfDualCone marshall_cone(const SpinSystem& sys, const MSector& sector,
                                  const Matrix& restricted_h) {
  sys.validate();
  if (sector.dim() == 0) throw Error(ErrorKind::EmptySector, "sector is empty");
  if (restricted_h.rows() != sector.dim()) {
    throw Error(ErrorKind::DimMismatch, "Hamiltonian does not act on the sector");
  }
  Matrix g = Matrix::Zero(sector.dim(), sector.dim());
  for (Eigen::Index k = 0; k < sector.dim(); ++k) g(k, k) = static_cast<double>(marshall_sign(sys, sector.states[k]));
  SelfDualCone cone("M=" + std::to_string(sector.m), "marshall", std::move(g));
  if (!in_class_A(restricted_h, cone)) {
    throw Error(ErrorKind::SignRuleFailed, "Hamiltonian is not Metzler in the Marshall basis");
  }
  return cone;
}

inline SelfDualCone marshall_cone(const SpinSystem& sys, const MSector& sector) {
  return marshall_cone(sys, sector, sector_mlm_hamiltonian(sys, sector));
}

struct MlmReport {
  double s_star = 0.0;
  double expected_mu = 0.0;  // S*(S*+1)
  GoodQuantumNumber mu;
  Eigen::Index sector_dim = 0;
  double ground_energy = 0.0;
  RealVector sector_spectrum;
  bool irreducible = false;
  bool ground_strictly_positive = false;
};

inline MlmReport verify_mlm(const SpinSystem& sys, double m = 0.0) {
  sys.validate();
  MlmReport r;
  r.s_star = sys.s_star();
  r.expected_mu = r.s_star * (r.s_star + 1.0);
  if (std::abs(m) > r.s_star + 1e-12) {
    throw Error(ErrorKind::PreconditionFailed, "sector |M| exceeds S*");
  }
  const MSector sector = build_sector(sys.sites, m);
  const SelfDualCone cone = marshall_cone(sys, sector);
  const Matrix h = sector_mlm_hamiltonian(sys, sector);
  const Matrix s2 = sector_total_spin_sq(sys.sites, sector);
  r.sector_dim = sector.dim();
  r.irreducible = in_class_A_plus(h, cone);
  const Spectrum spec = hermitian_eig(h);
  r.sector_spectrum = spec.eigenvalues;
  r.ground_energy = spec.ground_energy();
  r.mu = good_quantum_number(h, s2, cone);
  r.ground_strictly_positive = strictly_positive(cone, r.mu.ground_state);
  if (std::abs(r.mu.snapped_mu - r.expected_mu) > kMuTol * std::max(1.0, r.expected_mu)) {
    throw Error(ErrorKind::MuMismatch, "μ = " + std::to_string(r.mu.snapped_mu) +
                                           " but S*(S*+1) = " + std::to_string(r.expected_mu));
  }
  return r;
}

}  // namespace conecalc
