// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "conecalc/cli.hpp"
#include "conecalc/conecalc.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace {

using namespace conecalc;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

/// Simple ground eigenvalue with a strictly positive ground vector in the generator basis.
bool oracle_perron(const Matrix& h, const SelfDualCone& p) {
  const Eigen::MatrixXd m = (p.generators().adjoint() * h * p.generators()).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (m.rows() > 1 && es.eigenvalues()(1) - es.eigenvalues()(0) <= 1e-9 * scale) return false;
  Eigen::VectorXd v = es.eigenvectors().col(0);
  if (v.sum() < 0) v = -v;
  return v.minCoeff() > 1e-9;
}

Outcome perron_frobenius() {
  testgen::Gen gen(101);
  const auto t0 = Clock::now();
  int disagreements = 0, positives = 0;
  for (int k = 0; k < 300; ++k) {
    const Eigen::Index n = gen.integer(1, 12);
    const Matrix m = gen.coin(0.5) ? gen.irreducible_metzler(n, gen.uniform(0.0, 0.5))
                                   : gen.metzler(n, gen.uniform(0.05, 0.6));
    const SelfDualCone p = gen.coin(0.5) ? orthant(n) : gen.rotated_cone(n);
    const Matrix h = p.generators() * m * p.generators().adjoint();
    const bool expected = oracle_perron(h, p);
    positives += expected;
    if (in_class_A_plus(h, p) != expected) ++disagreements;
  }
  const double dt = seconds_since(t0);
  return {disagreements == 0 && dt < 10.0,
          std::to_string(disagreements) + " disagreements, " + std::to_string(positives) +
              "/300 in A+, " + fmt("%.2f s", dt)};
}

Outcome metzler_vs_sampling() {
  testgen::Gen gen(202);
  int disagreements = 0, metzler_count = 0;
  const std::vector<double> betas{0.1, 1.0, 10.0};
  for (int k = 0; k < 300; ++k) {
    const Eigen::Index n = gen.integer(2, 8);
    Matrix m = gen.metzler(n, gen.uniform(0.2, 0.8));
    if (gen.coin(0.5)) {
      const Eigen::Index i = gen.integer(0, static_cast<int>(n) - 2);
      const Eigen::Index j = gen.integer(static_cast<int>(i) + 1, static_cast<int>(n) - 1);
      const double v = gen.uniform(0.5, 1.5);
      m(i, j) = v;
      m(j, i) = v;
    }
    const SelfDualCone p = gen.coin(0.5) ? orthant(n) : gen.rotated_cone(n);
    const Matrix h = p.generators() * m * p.generators().adjoint();
    const bool metzler = in_class_A(h, p);
    metzler_count += metzler;
    bool sampled = true;
    for (double beta : betas) {
      const Eigen::MatrixXd e = (p.generators().adjoint() * oracle::expm(h, -beta) * p.generators()).real();
      sampled = sampled && e.minCoeff() >= -1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());
    }
    if (metzler != sampled) ++disagreements;
  }
  return {disagreements == 0,
          std::to_string(disagreements) + " disagreements, " + std::to_string(metzler_count) + "/300 Metzler"};
}

Outcome trotter() {
  testgen::Gen gen(303);
  std::vector<int> ns;
  for (int n = 4; n <= 256; n *= 2) ns.push_back(n);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool positive = true, ok = true;
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index n = gen.integer(2, 6);
    const SelfDualCone p = orthant(n);
    const Matrix h1 = gen.metzler(n, 0.6);
    const Matrix h2 = gen.metzler(n, 0.6);
    const TrotterReport r = trotter_verify(h1, h2, gen.uniform(0.5, 1.5), gen.uniform(0.5, 1.5), 1.0, ns, p);
    positive = positive && r.all_positive();
    for (double ratio : r.ratios()) {
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ok = ok && ratio >= 4.0 / 3.0 && ratio <= 3.0;
    }
  }
  return {ok && positive, "error ratios per doubling in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) +
                              "], all approximants preserving: " + (positive ? "yes" : "no")};
}

Outcome duhamel() {
  testgen::Gen gen(404);
  const std::vector<double> betas{0.5, 1.0, 2.0};
  double smallest = std::numeric_limits<double>::infinity();
  bool all_verified = true;
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index n = gen.integer(2, 8);
    const SelfDualCone p = gen.coin(0.5) ? orthant(n) : gen.rotated_cone(n);
    const Matrix g = p.generators();
    const Matrix a = g * gen.metzler(n, gen.uniform(0.0, 0.5)) * g.adjoint();
    const Matrix b = g * gen.ergodic_symmetric(n, gen.uniform(0.0, 0.5)) * g.adjoint();
    all_verified = all_verified && duhamel_improving_verify(a, b, p, betas);
    for (double beta : betas) {
      const Eigen::MatrixXd e = (g.adjoint() * oracle::expm(a - b, -beta) * g).real();
      smallest = std::min(smallest, e.minCoeff());
    }
  }
  return {all_verified && smallest > 1e-12,
          "smallest generator-basis entry " + fmt("%.3e", smallest)};
}

Outcome richness() {
  const ArrowChain tower = richness_tower(-pauli_x(), orthant(2), pauli_x(), 5);
  const ChainReport cr = chain_verify(tower);
  const MuChainReport mr = mu_chain_invariance(tower, pauli_x());
  Vector expected(2);
  expected << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Vector seed = expected;
  double defect = 0.0;
  for (std::size_t level = 1; level < tower.nodes().size(); ++level) {
    expected = kron(expected, seed);
    Eigen::SelfAdjointEigenSolver<Matrix> es(tower.nodes()[level].hamiltonian);
    Vector psi = es.eigenvectors().col(0);
    psi *= std::abs(psi.dot(expected)) / psi.dot(expected);
    defect = std::max(defect, (psi - expected).norm());
  }
  bool constant = mr.all_equal;
  for (const auto& q : mr.mus) constant = constant && q.snapped_mu == mr.mus.front().snapped_mu;
  return {cr.verified() && tower.link_count() == 5 && defect <= 1e-10 && constant,
          std::to_string(tower.link_count()) + " links " + (cr.verified() ? "verified" : "FAILED") +
              ", product defect " + fmt("%.2e", defect) + ", mu " + fmt("%.1f", mr.mu_star) +
              (constant ? " constant" : " varies")};
}

LatticeSpec lattice_spec() {
  Matrix x(2, 2);
  x << 2, 1, 1, 2;
  Matrix path = Matrix::Zero(3, 3);
  path(0, 1) = path(1, 0) = path(1, 2) = path(2, 1) = 1;
  Matrix y3(2, 2);
  y3 << 0.5, 1, 1, 0.5;
  return LatticeSpec{-pauli_x(), orthant(2, "C2"), pauli_x(), x, {pauli_x(), path, y3}};
}

Outcome lattice() {
  const LatticeSpec spec = lattice_spec();
  const auto t0 = Clock::now();
  const HasseDiagram d = build_lattice(spec, 512);
  const std::string dot1 = hasse_export(d);
  const double dt = seconds_since(t0);
  bool all_a_plus = true, all_verified = true, mu_exact = true;
  const double mu0 = d.nodes.front().mu.snapped_mu;
  for (const auto& n : d.nodes) {
    all_a_plus = all_a_plus && in_class_A_plus(n.hamiltonian, n.cone);
    mu_exact = mu_exact && n.mu.snapped_mu == mu0;
  }
  for (const auto& e : d.edges) all_verified = all_verified && e.verified;

  const auto dir = std::filesystem::temp_directory_path();
  cli::json doc = cli::read_config_file(std::filesystem::path(CONECALC_CONFIG_DIR) / "lattice_l3.json");
  cli::emit(cli::run("lattice", doc), dir / "conecalc_accept_a");
  cli::emit(cli::run("lattice", doc), dir / "conecalc_accept_b");
  auto slurp = [](const std::filesystem::path& p) {
    std::FILE* f = std::fopen(p.c_str(), "rb");
    std::string s;
    if (!f) return s;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) s.append(buf, got);
    std::fclose(f);
    return s;
  };
  const std::string f1 = slurp(dir / "conecalc_accept_a" / "hasse.dot");
  const std::string f2 = slurp(dir / "conecalc_accept_b" / "hasse.dot");
  const bool identical = !f1.empty() && f1 == f2 && dot1 == hasse_export(build_lattice(spec, 512));
  std::filesystem::remove_all(dir / "conecalc_accept_a");
  std::filesystem::remove_all(dir / "conecalc_accept_b");

  const bool pass = d.nodes.size() == 8 && d.edges.size() == 12 && all_a_plus && all_verified &&
                    mu_exact && identical && dt < 30.0;
  return {pass, std::to_string(d.nodes.size()) + " nodes, " + std::to_string(d.edges.size()) +
                    " edges, A+ " + (all_a_plus ? "all" : "NOT all") + ", arrows " +
                    (all_verified ? "verified" : "FAILED") + ", mu " + (mu_exact ? "exact" : "differs") +
                    ", dot " + (identical ? "identical" : "differs") + ", " + fmt("%.2f s", dt)};
}

Outcome inequivalence() {
  Matrix hs(2, 2);
  hs << 0, -1, -1, 1;
  const Matrix x = Eigen::Vector2cd(1, 2).asDiagonal();
  const Matrix coupled = kron(hs, identity(2)) - kron(x, pauli_x());
  const Matrix decoupled = kron(hs, identity(2)) - kron(identity(2), pauli_x());
  const SelfDualCone r2 = orthant(2), r4 = orthant(4);

  const EquivalenceReport eq = is_equivalent(coupled, hs, r2);
  const WeakEquivalence wc = weak_equivalence_check(coupled, r4, hs, r2, r2);
  const WeakEquivalence wd = weak_equivalence_check(decoupled, r4, hs, r2, r2);
  Vector omega(2);
  omega << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const double omega_err = wd.omega ? (*wd.omega - omega).norm() : std::numeric_limits<double>::infinity();
  const bool pass = !eq.equivalent && !wc.weak && wc.entropy > 1e-6 && wd.weak && omega_err <= 1e-10;
  return {pass, "coupled: equivalent " + std::string(eq.equivalent ? "yes" : "no") + ", S " +
                    fmt("%.3e", wc.entropy) + "; decoupled: weak " + (wd.weak ? "yes" : "no") +
                    ", omega error " + fmt("%.2e", omega_err)};
}

Outcome mlm() {
  const TotalSpin ts = total_spin(4);
  const Eigen::VectorXd s2 = Eigen::SelfAdjointEigenSolver<Matrix>(ts.s_tot_sq).eigenvalues();
  auto in_spectrum = [&](double x) { return (s2.array() - x).abs().minCoeff() <= 1e-8; };
  bool pass = true;
  std::string detail;
  for (const auto& [a, expected] : std::vector<std::pair<std::vector<int>, double>>{{{1, 2}, 0.0}, {{1, 2, 3}, 2.0}}) {
    const auto t0 = Clock::now();
    const MlmReport r = verify_mlm(bipartition(4, a), 0.0);
    const double dt = seconds_since(t0);
    const bool ok = std::abs(r.mu.mu - expected) <= 1e-8 && std::abs(r.mu.snapped_mu - expected) <= 1e-8 &&
                    in_spectrum(r.mu.snapped_mu) && dt < 5.0;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + std::string("|A|=") + std::to_string(a.size()) + " mu " +
              fmt("%.10f", std::abs(r.mu.mu) < 5e-11 ? 0.0 : r.mu.mu) + " " + fmt("(%.3f s)", dt);
  }
  return {pass, detail};
}

Outcome relative_entropy_unit() {
  const Matrix rho = Eigen::Vector2cd(0.5, 0.5).asDiagonal();
  const Matrix sigma = Eigen::Vector2cd(0.25, 0.75).asDiagonal();
  const double formula = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75);
  const double s = relative_entropy(rho, sigma);
  testgen::Gen gen(909);
  const Matrix r = gen.density(4, 4);
  const double self = relative_entropy(r, r);
  const double orth = relative_entropy(Eigen::Vector2cd(1, 0).asDiagonal(), Eigen::Vector2cd(0, 1).asDiagonal());
  const bool pass = std::abs(s - formula) <= 1e-12 && std::abs(self) <= 1e-12 && std::isinf(orth) && orth > 0;
  return {pass, "error " + fmt("%.2e", std::abs(s - formula)) + ", S(rho|rho) " + fmt("%.2e", self) +
                    ", orthogonal " + (std::isinf(orth) ? "inf" : fmt("%.3e", orth))};
}

Outcome chain_invariance() {
  LatticeSpec spec = lattice_spec();
  spec.ys.pop_back();
  const HasseDiagram d = build_lattice(spec, 512);
  const LatticeNode& base = d.nodes.front();
  ArrowChain ident(ChainNode{"H_0", base.hamiltonian, base.cone, std::nullopt, base.observable});
  ident.append(identity_embedding(2, base.cone.space()),
               ChainNode{"H_0'", base.hamiltonian, base.cone, std::nullopt, base.observable});
  const ArrowChain lat = lattice_chain(spec, d, {{}, {1}, {1, 2}});
  const LatticeNode& top = d.nodes[*d.index_of({1, 2})];
  const ArrowChain tower = richness_tower(top.hamiltonian, top.cone, top.observable, 1, top.id);
  ArrowChain chain = ArrowChain::concatenate(ArrowChain::concatenate(ident, lat), tower);

  const ChainReport cr = chain_verify(chain);
  const MuChainReport mr = mu_chain_invariance(chain, spec.observable);
  bool constant = mr.all_equal;
  for (const auto& q : mr.mus) constant = constant && q.snapped_mu == mr.mus.front().snapped_mu;

  ArrowChain broken = chain;
  Matrix x(2, 2);
  x << 2, 1, 1, 2;
  broken.nodes()[2].hamiltonian = kron(spec.h0, identity(2)) + kron(x, spec.ys[0]);
  const ChainReport br = chain_verify(broken);
  const bool localized = br.failed_link && *br.failed_link == 1;

  const bool pass = chain.link_count() == 4 && cr.verified() && constant && localized;
  return {pass, std::to_string(chain.link_count()) + " links " + (cr.verified() ? "verified" : "FAILED") +
                    ", mu " + (constant ? "equal" : "varies") + ", broken link reported at " +
                    (br.failed_link ? std::to_string(*br.failed_link) : std::string("none"))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"perron-frobenius equivalence", perron_frobenius},
      {"metzler criterion vs sampled exponentials", metzler_vs_sampling},
      {"trotter convergence and positivity", trotter},
      {"duhamel positivity improvement", duhamel},
      {"richness tower", richness},
      {"three-site perturbation lattice", lattice},
      {"inequivalence and weak equivalence", inequivalence},
      {"marshall-lieb-mattis quantum numbers", mlm},
      {"relative entropy", relative_entropy_unit},
      {"chain invariance and failure localization", chain_invariance},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%-4s %2zu. %-44s %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
