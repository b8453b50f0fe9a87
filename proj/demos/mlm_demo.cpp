// Total spin of the Marshall-Lieb-Mattis ground state for every bipartition
// A = {1..k}, B = the remaining sites.

#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "conecalc/spin.hpp"

int main(int argc, char** argv) {
  using namespace conecalc;
  const int sites = argc > 1 ? std::atoi(argv[1]) : 6;
  std::printf("%3s %3s %6s %14s %14s %6s\n", "|A|", "|B|", "S*", "mu", "S*(S*+1)", "dim");
  for (int k = 1; k < sites; ++k) {
    std::vector<int> a(k);
    std::iota(a.begin(), a.end(), 1);
    const SpinSystem sys = bipartition(sites, a);
    const double m = (sites % 2) ? 0.5 : 0.0;
    const MlmReport r = verify_mlm(sys, m);
    std::printf("%3zu %3zu %6.1f %14.10f %14.10f %6ld\n", sys.a.size(), sys.b.size(), r.s_star,
                r.mu.snapped_mu, r.expected_mu, static_cast<long>(r.sector_dim));
  }
  return 0;
}
