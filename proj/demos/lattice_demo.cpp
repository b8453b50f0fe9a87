// The perturbation lattice over three environments, written as DOT to stdout.

#include <iostream>

#include "conecalc/lattice.hpp"

int main() {
  using namespace conecalc;
  Matrix h0(2, 2), x(2, 2), y2(3, 3);
  h0 << 0, -1, -1, 0;
  x << 2, 1, 1, 2;
  y2 << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  const LatticeSpec spec{h0, orthant(2), pauli_x(), x, {pauli_x(), y2, pauli_x()}};
  const HasseDiagram d = build_lattice(spec);
  std::cerr << d.nodes.size() << " nodes, " << d.edges.size() << " edges, mu = " << d.mu_star << "\n";
  std::cout << hasse_export(d);
  return 0;
}
