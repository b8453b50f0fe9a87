#pragma once

// Batch front-end: config ingestion, task dispatch and report emission.
// Exit codes: 0 pass, 1 task failure or error (including I/O), 2 schema error.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "conecalc/io.hpp"

#ifndef CONECALC_VERSION
#define CONECALC_VERSION "1.0.0"
#endif

namespace conecalc::cli {

using nlohmann::json;
using io::schema_error;

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks{"classify", "mu",        "chain",    "lattice",
                                              "trotter",  "spin-demo", "richness", "weak-equiv"};
  return tasks;
}

inline bool is_known_task(const std::string& t) {
  for (const auto& k : known_tasks())
    if (k == t) return true;
  return false;
}

struct Tolerances {
  double cone = kDefaultConeTol;
};

struct RunConfig {
  int version = 1;
  std::string task;
  std::map<std::string, Eigen::Index> spaces;
  std::map<std::string, SelfDualCone> cones;
  std::map<std::string, Matrix> operators;
  json params = json::object();
  Tolerances tolerances;

  const SelfDualCone& cone(const std::string& id) const {
    auto it = cones.find(id);
    if (it == cones.end()) schema_error("unknown cone id '" + id + "'");
    return it->second;
  }
  const Matrix& op(const std::string& id) const {
    auto it = operators.find(id);
    if (it == operators.end()) schema_error("unknown operator id '" + id + "'");
    return it->second;
  }
};

struct RunReport {
  std::string task;
  std::string status;  // pass | fail | error
  json payload = json::object();
  std::string tool_version = CONECALC_VERSION;
  std::string config_digest;

  json to_json() const {
    return {{"task", task}, {"status", status}, {"payload", payload},
            {"tool_version", tool_version}, {"config_digest", config_digest}};
  }
};

struct RunOutcome {
  RunReport report;
  std::map<std::string, std::string> artifacts;  // file name -> contents
  int exit_code = 0;
};

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::IoError, "SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 15];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) schema_error(where + ": missing '" + key + "'");
  return j[key];
}

inline std::string require_string(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_string()) schema_error(where + "." + key + " must be a string");
  return v.get<std::string>();
}

inline double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) schema_error(where + "." + key + " must be a number");
  return j[key].get<double>();
}

inline int int_or(const json& j, const char* key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) schema_error(where + "." + key + " must be an integer");
  return j[key].get<int>();
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  using namespace detail;
  if (!j.is_object()) schema_error("config must be a JSON object");
  RunConfig c;
  const json& version = require(j, "version", "config");
  if (!version.is_number_integer() || version.get<int>() != 1) schema_error("config version must be 1");
  if (j.contains("task")) {
    if (!j["task"].is_string() || !is_known_task(j["task"].get<std::string>()))
      schema_error("unknown task");
    c.task = j["task"].get<std::string>();
  }
  if (j.contains("spaces")) {
    if (!j["spaces"].is_array()) schema_error("spaces must be a list");
    for (const json& s : j["spaces"]) {
      const std::string id = require_string(s, "id", "space");
      const json& dim = require(s, "dim", "space " + id);
      if (!dim.is_number_integer() || dim.get<int>() < 1) schema_error("space " + id + ": bad dim");
      if (!c.spaces.emplace(id, dim.get<int>()).second) schema_error("duplicate space id '" + id + "'");
    }
  }
  auto check_space = [&c](const json& obj, Eigen::Index dim, const std::string& where) {
    if (!obj.contains("space")) return;
    const std::string s = obj["space"].get<std::string>();
    auto it = c.spaces.find(s);
    if (it == c.spaces.end()) schema_error(where + ": unknown space id '" + s + "'");
    if (it->second != dim) schema_error(where + ": dimension does not match space '" + s + "'");
  };
  if (j.contains("cones")) {
    if (!j["cones"].is_array()) schema_error("cones must be a list");
    for (const json& cj : j["cones"]) {
      const std::string id = require_string(cj, "id", "cone");
      SelfDualCone cone = [&] {
        try {
          return io::cone_from_json(cj, "cone " + id);
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::SchemaError) throw;
          schema_error("cone " + id + ": " + e.what());
        }
      }();
      check_space(cj, cone.dim(), "cone " + id);
      if (!c.cones.emplace(id, std::move(cone)).second) schema_error("duplicate cone id '" + id + "'");
    }
  }
  if (j.contains("operators")) {
    if (!j["operators"].is_array()) schema_error("operators must be a list");
    for (const json& oj : j["operators"]) {
      const std::string id = require_string(oj, "id", "operator");
      Matrix m = io::matrix_from_json(require(oj, "matrix", "operator " + id), "operator " + id);
      if (m.rows() != m.cols()) schema_error("operator " + id + " is not square");
      check_space(oj, m.rows(), "operator " + id);
      if (!c.operators.emplace(id, std::move(m)).second) schema_error("duplicate operator id '" + id + "'");
    }
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) schema_error("params must be an object");
    c.params = j["params"];
  }
  if (j.contains("tolerances")) {
    c.tolerances.cone = number_or(j["tolerances"], "cone", c.tolerances.cone, "tolerances");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Tasks. Each returns (status, payload) or throws.

struct TaskResult {
  bool pass = true;
  json payload = json::object();
  std::map<std::string, std::string> artifacts;
};

namespace detail {

inline std::string param_id(const RunConfig& c, const char* key) {
  return require_string(c.params, key, "params");
}

inline Embedding link_from_json(const RunConfig& c, const json& lj, Eigen::Index from,
                                Eigen::Index to, const std::string& where) {
  const std::string kind = lj.value("kind", "identity");
  if (kind == "identity") {
    if (from != to) schema_error(where + ": identity link between different dimensions");
    return identity_embedding(from);
  }
  if (kind == "tensor") {
    Vector omega = lj.contains("omega") ? io::vector_from_json(lj["omega"], where + ".omega")
                                        : uniform_vector(to / from);
    if (omega.size() * from != to) schema_error(where + ": omega has the wrong length");
    return tensor_embedding(from, omega, "", "");
  }
  if (kind == "explicit") {
    const Matrix tau = lj.contains("isometry_id") ? c.op(lj["isometry_id"].get<std::string>())
                                                  : io::matrix_from_json(require(lj, "isometry", where), where);
    if (tau.rows() != to || tau.cols() != from) schema_error(where + ": isometry has the wrong shape");
    return Embedding("", "", tau);
  }
  schema_error(where + ": unknown link kind '" + kind + "'");
}

inline LatticeSpec lattice_spec(const RunConfig& c) {
  std::vector<Matrix> ys;
  const json& yj = require(c.params, "ys", "params");
  if (!yj.is_array()) schema_error("params.ys must be a list of operator ids");
  for (const json& y : yj) ys.push_back(c.op(y.get<std::string>()));
  return LatticeSpec{c.op(param_id(c, "h0")), c.cone(param_id(c, "cone")),
                     c.op(param_id(c, "observable")), c.op(param_id(c, "coupling")), ys};
}

}  // namespace detail

inline TaskResult task_classify(const RunConfig& c) {
  const Matrix& a = c.op(detail::param_id(c, "operator"));
  const SelfDualCone& p = c.cone(detail::param_id(c, "cone"));
  const double tol = c.tolerances.cone;
  TaskResult r;
  const PositivityReport pr = classify(a, p, tol);
  r.payload = io::to_json(pr);
  if (pr.preserving && is_hermitian(a)) r.payload["ergodicity"] = io::to_json(is_ergodic(a, p, tol));
  if (is_hermitian(a)) {
    r.payload["metzler"] = io::to_json(metzler_analysis(a, p, tol));
    r.payload["in_class_A"] = in_class_A(a, p, tol);
    r.payload["in_class_A_plus"] = in_class_A_plus(a, p, tol);
  }
  return r;
}

inline TaskResult task_mu(const RunConfig& c) {
  TaskResult r;
  r.payload = io::to_json(good_quantum_number(c.op(detail::param_id(c, "hamiltonian")),
                                              c.op(detail::param_id(c, "observable")),
                                              c.cone(detail::param_id(c, "cone"))));
  return r;
}

inline TaskResult task_chain(const RunConfig& c) {
  using namespace detail;
  const json& nj = require(c.params, "nodes", "params");
  if (!nj.is_array() || nj.empty()) schema_error("params.nodes must be a non-empty list");
  auto make_node = [&](const json& n, std::size_t k) {
    const std::string where = "params.nodes[" + std::to_string(k) + "]";
    ChainNode node{n.value("id", "node" + std::to_string(k)), c.op(require_string(n, "hamiltonian", where)),
                   c.cone(require_string(n, "cone", where)), std::nullopt, std::nullopt};
    if (n.contains("target_cone")) node.target_cone = c.cone(n["target_cone"].get<std::string>());
    if (n.contains("observable")) node.observable = c.op(n["observable"].get<std::string>());
    return node;
  };
  ArrowChain chain(make_node(nj[0], 0));
  const json links = c.params.value("links", json::array());
  if (links.size() + 1 != nj.size()) schema_error("params.links must have one entry per link");
  for (std::size_t k = 1; k < nj.size(); ++k) {
    ChainNode node = make_node(nj[k], k);
    Embedding emb = link_from_json(c, links[k - 1], chain.nodes().back().hamiltonian.rows(),
                                   node.hamiltonian.rows(), "params.links[" + std::to_string(k - 1) + "]");
    chain.append(std::move(emb), std::move(node));
  }
  TaskResult r;
  const ChainReport cr = chain_verify(chain);
  r.payload["chain"] = io::to_json(cr);
  r.pass = cr.verified();
  if (r.pass && (c.params.contains("observable") || chain.nodes()[0].observable)) {
    const Matrix o = c.params.contains("observable") ? c.op(param_id(c, "observable"))
                                                     : *chain.nodes()[0].observable;
    r.payload["mu"] = io::to_json(mu_chain_invariance(chain, o));
  }
  return r;
}

inline TaskResult task_lattice(const RunConfig& c) {
  const LatticeSpec spec = detail::lattice_spec(c);
  const auto cap = static_cast<Eigen::Index>(
      detail::int_or(c.params, "dim_cap", static_cast<int>(kDefaultLatticeDimCap), "params"));
  const HasseDiagram d = build_lattice(spec, cap);
  TaskResult r;
  r.payload = io::to_json(d);
  r.artifacts["hasse.dot"] = hasse_export(d);
  return r;
}

inline TaskResult task_trotter(const RunConfig& c) {
  using namespace detail;
  std::vector<int> ns{1, 2, 4, 8, 16, 32, 64, 128, 256};
  if (c.params.contains("n_values")) ns = c.params["n_values"].get<std::vector<int>>();
  const TrotterReport tr = trotter_verify(
      c.op(param_id(c, "h1")), c.op(param_id(c, "h2")), number_or(c.params, "s", 1.0, "params"),
      number_or(c.params, "t", 1.0, "params"), number_or(c.params, "beta", 1.0, "params"), ns,
      c.cone(param_id(c, "cone")), c.tolerances.cone);
  TaskResult r;
  r.payload = io::to_json(tr);
  r.payload["decays_like_inverse_n"] = tr.decays_like_inverse_n();
  r.pass = tr.all_positive() && tr.decays_like_inverse_n();
  return r;
}

inline TaskResult task_spin_demo(const RunConfig& c) {
  const int sites = detail::int_or(c.params, "sites", 4, "params");
  std::vector<int> a;
  if (c.params.contains("partition")) {
    a = c.params["partition"].get<std::vector<int>>();
  } else {
    for (int x = 1; x <= sites; x += 2) a.push_back(x);
  }
  const double m = detail::number_or(c.params, "sector", 0.0, "params");
  const SpinSystem sys = bipartition(sites, a);
  TaskResult r;
  r.payload = io::to_json(verify_mlm(sys, m));
  r.payload["sites"] = sites;
  r.payload["partition_a"] = sys.a;
  r.payload["partition_b"] = sys.b;
  r.payload["sector"] = m;
  return r;
}

inline TaskResult task_richness(const RunConfig& c) {
  using namespace detail;
  const int depth = int_or(c.params, "depth", 5, "params");
  const Matrix& o = c.op(param_id(c, "observable"));
  const ArrowChain tower = richness_tower(c.op(param_id(c, "hamiltonian")),
                                         c.cone(param_id(c, "cone")), o, depth);
  TaskResult r;
  const ChainReport cr = chain_verify(tower);
  r.payload["chain"] = io::to_json(cr);
  r.pass = cr.verified();
  if (r.pass) {
    r.payload["mu"] = io::to_json(mu_chain_invariance(tower, o));
    const std::vector<double> defects = tower_product_defects(tower);
    r.payload["product_defects"] = defects;
    for (double d : defects) r.pass = r.pass && d <= 1e-10;
  }
  return r;
}

inline TaskResult task_weak_equiv(const RunConfig& c) {
  using namespace detail;
  const Matrix& h2 = c.op(param_id(c, "h2"));
  const Matrix& hs = c.op(param_id(c, "h_star"));
  const SelfDualCone& env = c.cone(param_id(c, "env_cone"));
  TaskResult r;
  r.payload["equivalence"] = io::to_json(is_equivalent(h2, hs, env));
  r.payload["weak"] = io::to_json(weak_equivalence_check(h2, c.cone(param_id(c, "cone2")), hs,
                                                         c.cone(param_id(c, "cone_star")), env));
  return r;
}

// ---------------------------------------------------------------------------
// Driver

inline TaskResult dispatch(const RunConfig& c) {
  if (c.task == "classify") return task_classify(c);
  if (c.task == "mu") return task_mu(c);
  if (c.task == "chain") return task_chain(c);
  if (c.task == "lattice") return task_lattice(c);
  if (c.task == "trotter") return task_trotter(c);
  if (c.task == "spin-demo") return task_spin_demo(c);
  if (c.task == "richness") return task_richness(c);
  if (c.task == "weak-equiv") return task_weak_equiv(c);
  schema_error("unknown task '" + c.task + "'");
}

/// Runs `task` on the config document. Deterministic given the document.
inline RunOutcome run(const std::string& task, const json& doc) {
  RunOutcome out;
  out.report.task = task;
  out.report.config_digest = sha256_hex(io::canonical_dump(doc));
  try {
    if (!is_known_task(task)) schema_error("unknown task '" + task + "'");
    RunConfig config = parse_config(doc);
    if (!config.task.empty() && config.task != task) {
      schema_error("config is for task '" + config.task + "', not '" + task + "'");
    }
    config.task = task;
    TaskResult r = dispatch(config);
    out.report.status = r.pass ? "pass" : "fail";
    out.report.payload = std::move(r.payload);
    out.artifacts = std::move(r.artifacts);
    out.exit_code = r.pass ? 0 : 1;
  } catch (const Error& e) {
    out.report.status = "error";
    out.report.payload = {{"error", to_string(e.kind())}, {"message", e.what()},
                          {"index", e.index() ? json(*e.index()) : json(nullptr)}};
    out.artifacts.clear();
    out.exit_code = e.kind() == ErrorKind::SchemaError ? 2 : 1;
  } catch (const json::exception& e) {
    out.report.status = "error";
    out.report.payload = {{"error", to_string(ErrorKind::SchemaError)}, {"message", e.what()},
                          {"index", nullptr}};
    out.artifacts.clear();
    out.exit_code = 2;
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  f << contents;
  f.close();
  if (!f) throw Error(ErrorKind::IoError, "write to " + path.string() + " failed");
}

/// Writes report.json and any artifacts into out_dir.
inline void emit(const RunOutcome& outcome, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error(ErrorKind::IoError, "cannot create output directory " + out_dir.string());
  }
  write_file(out_dir / "report.json", io::canonical_dump(outcome.report.to_json()));
  for (const auto& [name, contents] : outcome.artifacts) write_file(out_dir / name, contents);
}

inline json read_config_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace conecalc::cli
