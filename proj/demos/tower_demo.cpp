// Builds the tower H -> H ⊗ 1 - 1 ⊗ σ_1 -> ... from a qubit seed and prints
// the overlap of every link and the good quantum number at every level.

#include <cstdio>

#include "conecalc/stability.hpp"

int main() {
  using namespace conecalc;
  Matrix h(2, 2);
  h << 0.0, -1.0, -1.0, 0.0;
  const ArrowChain tower = richness_tower(h, orthant(2), pauli_x(), 5);
  const ChainReport links = chain_verify(tower);
  const MuChainReport mus = mu_chain_invariance(tower, pauli_x());
  for (std::size_t k = 0; k < tower.nodes().size(); ++k) {
    std::printf("%-4s dim %3ld  mu %.12f", tower.nodes()[k].id.c_str(),
                static_cast<long>(tower.nodes()[k].hamiltonian.rows()), mus.mus[k].snapped_mu);
    if (k < links.links.size()) std::printf("  overlap %.6f", links.links[k].overlap.overlap);
    std::printf("\n");
  }
  return links.verified() ? 0 : 1;
}
