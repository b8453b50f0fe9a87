// conecalc <task> --config <file> --out <dir> [--tol X]

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "conecalc/cli.hpp"

namespace {

std::vector<int> parse_partition(const std::string& text) {
  std::vector<int> sites;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) sites.push_back(std::stoi(item));
  }
  return sites;
}

}  // namespace

int main(int argc, char** argv) {
  using conecalc::cli::json;

  CLI::App app{"conecalc: cone positivity and stability-class calculator"};
  app.set_version_flag("--version", std::string(CONECALC_VERSION));
  std::string task;
  std::string config_path;
  std::string out_dir;
  std::optional<double> tol;
  std::optional<int> sites;
  std::string partition;
  std::optional<double> sector;

  app.add_option("task", task, "classify | mu | chain | lattice | trotter | spin-demo | richness | weak-equiv")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--tol", tol, "cone tolerance override");
  app.add_option("--sites", sites, "spin-demo: number of sites");
  app.add_option("--partition", partition, "spin-demo: comma-separated sites of sublattice A");
  app.add_option("--sector", sector, "spin-demo: magnetization sector M");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json doc;
    if (!config_path.empty()) {
      doc = conecalc::cli::read_config_file(config_path);
    } else if (task == "spin-demo") {
      doc = {{"version", 1}, {"task", "spin-demo"}, {"params", json::object()}};
    } else {
      std::cerr << "conecalc: --config is required for task " << task << "\n";
      return 2;
    }
    if (doc.is_object()) {
      if (tol) doc["tolerances"]["cone"] = *tol;
      if (sites) doc["params"]["sites"] = *sites;
      if (!partition.empty()) doc["params"]["partition"] = parse_partition(partition);
      if (sector) doc["params"]["sector"] = *sector;
    }
    const conecalc::cli::RunOutcome outcome = conecalc::cli::run(task, doc);
    conecalc::cli::emit(outcome, out_dir);
    std::cout << task << ": " << outcome.report.status;
    if (outcome.report.status == "error") std::cout << " (" << outcome.report.payload["message"].get<std::string>() << ")";
    std::cout << "\n";
    return outcome.exit_code;
  } catch (const conecalc::Error& e) {
    std::cerr << "conecalc: " << conecalc::to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == conecalc::ErrorKind::SchemaError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "conecalc: " << e.what() << "\n";
    return 2;
  }
}
