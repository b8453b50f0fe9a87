#pragma once

// JSON conversions for matrices, vectors, cones and reports, plus a canonical
// writer (sorted keys, %.12e floats, two-space indent, LF) for byte-stable output.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conecalc/cones.hpp"
#include "conecalc/error.hpp"
#include "conecalc/inheritance.hpp"
#include "conecalc/lattice.hpp"
#include "conecalc/numerics.hpp"
#include "conecalc/positivity.hpp"
#include "conecalc/semigroup.hpp"
#include "conecalc/spin.hpp"
#include "conecalc/stability.hpp"

namespace conecalc::io {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& what) {
  throw Error(ErrorKind::SchemaError, what);
}

// ---------------------------------------------------------------------------
// Scalars, vectors, matrices. A complex entry is a number or [re, im].

inline cplx scalar_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  schema_error(where + ": expected a number or [re, im]");
}

inline json scalar_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) schema_error(where + ": expected a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = scalar_from_json(j[k], where + "[" + std::to_string(k) + "]");
  return v;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(scalar_to_json(v(k)));
  return out;
}

inline json real_vector_to_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

/// Row-major list of rows.
inline Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) schema_error(where + ": expected a non-empty list of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) schema_error(where + ": rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) schema_error(where + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          scalar_from_json(j[r][c], where);
    }
  }
  return m;
}

inline json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

/// Cone: {"space", "label", "generators": [column vectors]} or {"kind": "orthant", "dim"}.
inline SelfDualCone cone_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where + ": cone must be an object");
  const std::string kind = j.value("kind", "explicit");
  const std::string space = j.value("space", "");
  if (kind == "orthant") {
    if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<int>() < 1)
      schema_error(where + ": orthant needs a positive integer dim");
    SelfDualCone c = orthant(j["dim"].get<int>());
    return SelfDualCone(space.empty() ? c.space() : space, j.value("label", c.label()), c.generators());
  }
  if (kind != "explicit") schema_error(where + ": unknown cone kind '" + kind + "'");
  if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty())
    schema_error(where + ": explicit cone needs generators");
  const json& g = j["generators"];
  const Vector first = vector_from_json(g[0], where + ".generators[0]");
  Matrix gen(first.size(), static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vector v = vector_from_json(g[k], where + ".generators[" + std::to_string(k) + "]");
    if (v.size() != first.size()) schema_error(where + ": generators differ in length");
    gen.col(static_cast<Eigen::Index>(k)) = v;
  }
  return SelfDualCone(space, j.value("label", ""), gen);
}

inline json cone_to_json(const SelfDualCone& c) {
  json gens = json::array();
  for (Eigen::Index k = 0; k < c.dim(); ++k) gens.push_back(vector_to_json(c.generator(k)));
  return {{"space", c.space()}, {"label", c.label()}, {"generators", gens}};
}

// ---------------------------------------------------------------------------
// Reports

inline json witness_to_json(const std::optional<MatrixWitness>& w) {
  if (!w) return nullptr;
  return {{"row", w->row}, {"col", w->col}, {"value", scalar_to_json(w->value)}};
}

inline json to_json(const PositivityReport& r) {
  return {{"preserving", r.preserving},
          {"improving", r.improving},
          {"real_form", r.real_form},
          {"real_form_witness", witness_to_json(r.real_form_witness)},
          {"preserving_witness", witness_to_json(r.preserving_witness)},
          {"improving_witness", witness_to_json(r.improving_witness)}};
}

inline json to_json(const ErgodicityReport& r) {
  json table = json::array();
  for (const auto& row : r.k_table) {
    json jr = json::array();
    for (const auto& v : row) jr.push_back(v ? json(*v) : json(nullptr));
    table.push_back(std::move(jr));
  }
  json pair = nullptr;
  if (r.failing_pair) pair = json::array({r.failing_pair->first, r.failing_pair->second});
  return {{"ergodic", r.ergodic}, {"k_table", table}, {"failing_pair", pair},
          {"indeterminate", r.indeterminate}};
}

inline json to_json(const MetzlerReport& r) {
  return {{"real_form", r.real_form}, {"metzler", r.metzler},
          {"strongly_connected", r.strongly_connected}, {"indeterminate", r.indeterminate},
          {"witness", witness_to_json(r.witness)}};
}

inline json to_json(const GoodQuantumNumber& q) {
  return {{"mu", q.mu}, {"snapped_mu", q.snapped_mu}, {"residual", q.residual},
          {"gap01", q.gap01}, {"commutator_norm", q.commutator_norm},
          {"ground_state", vector_to_json(q.ground_state)}};
}

inline json to_json(const TrotterReport& r) {
  return {{"n_values", r.n_values}, {"errors", r.errors}, {"ratios", r.ratios()},
          {"positivity_ok", r.positivity_ok}, {"all_positive", r.all_positive()}};
}

inline json to_json(const InheritanceReport& r) {
  return {{"projection_preserving", r.projection_preserving},
          {"images_in_cone", r.images_in_cone},
          {"generators_reached", r.generators_reached},
          {"max_residual", r.max_residual},
          {"unreached_generator", r.unreached_generator ? json(*r.unreached_generator) : json(nullptr)}};
}

inline json to_json(const ChainReport& r) {
  json links = json::array();
  for (const auto& l : r.links) {
    links.push_back({{"index", l.index},
                     {"arrow", l.arrow.holds()},
                     {"reason", l.arrow.reason()},
                     {"inheritance", to_json(l.arrow.inheritance)},
                     {"overlap", l.overlap.overlap},
                     {"improving_ok", l.overlap.improving_ok}});
  }
  return {{"links", links}, {"overlap_product", r.overlap_product}, {"verified", r.verified()},
          {"failed_link", r.failed_link ? json(*r.failed_link) : json(nullptr)},
          {"failure", r.failure}};
}

inline json to_json(const MuChainReport& r) {
  json mus = json::array();
  for (const auto& q : r.mus) mus.push_back({{"mu", q.mu}, {"snapped_mu", q.snapped_mu},
                                             {"residual", q.residual}, {"gap01", q.gap01}});
  json tel = json::array();
  for (const auto& t : r.telescope) {
    tel.push_back({{"overlap", t.overlap}, {"lhs", t.lhs}, {"rhs", t.rhs},
                   {"intertwining_defect", t.intertwining_defect},
                   {"mu_from_ratio", t.mu_from_ratio ? json(*t.mu_from_ratio) : json(nullptr)}});
  }
  return {{"mus", mus}, {"telescope", tel}, {"mu_star", r.mu_star}, {"all_equal", r.all_equal}};
}

inline json to_json(const HasseDiagram& d) {
  json nodes = json::array();
  for (const auto& n : d.nodes) {
    nodes.push_back({{"id", n.id}, {"subset", n.subset}, {"dim", n.hamiltonian.rows()},
                     {"mu", n.mu.mu}, {"snapped_mu", n.mu.snapped_mu}, {"gap01", n.mu.gap01}});
  }
  json edges = json::array();
  for (const auto& e : d.edges) {
    edges.push_back({{"from", d.nodes[e.lower_set].id}, {"to", d.nodes[e.upper_set].id},
                     {"added", e.added}, {"overlap", e.overlap}, {"verified", e.verified}});
  }
  return {{"node_list", nodes}, {"edge_list", edges}, {"mu_star", d.mu_star},
          {"nodes", d.nodes.size()}, {"edges", d.edges.size()}};
}

inline json to_json(const MlmReport& r) {
  return {{"s_star", r.s_star}, {"expected_mu", r.expected_mu}, {"mu", r.mu.mu},
          {"snapped_mu", r.mu.snapped_mu}, {"sector_dim", r.sector_dim},
          {"ground_energy", r.ground_energy}, {"sector_spectrum", real_vector_to_json(r.sector_spectrum)},
          {"irreducible", r.irreducible}, {"ground_strictly_positive", r.ground_strictly_positive}};
}

inline json to_json(const EquivalenceReport& r) {
  return {{"equivalent", r.equivalent}, {"residual", r.residual},
          {"environment_term", matrix_to_json(r.environment_term)},
          {"environment_in_A_plus", r.environment_in_A_plus}};
}

inline json to_json(const WeakEquivalence& r) {
  return {{"weak", r.weak}, {"entropy", r.entropy},
          {"omega", r.omega ? vector_to_json(*r.omega) : json(nullptr)},
          {"omega_strictly_positive", r.omega_strictly_positive}};
}

// ---------------------------------------------------------------------------
// Canonical text

inline std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

namespace detail {

inline void canonical(const json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: keys already sorted
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        canonical(it.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out += pad;
        canonical(j[k], out, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump(-1, ' ', false, json::error_handler_t::replace);
  }
}

}  // namespace detail

inline std::string canonical_dump(const json& j) {
  std::string out;
  detail::canonical(j, out, 0);
  out += "\n";
  return out;
}

}  // namespace conecalc::io
