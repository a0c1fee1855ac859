// qdlab: run verification suites, probe quasidensity, compute discrete
// conjugates, and emit machine-readable reports.
//
// Exit codes: 0 all checks pass, 1 at least one check failed, 2 bad
// configuration or unparseable input.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdlab/convexcalc.hpp"
#include "qdlab/quasidensity.hpp"
#include "qdlab/suites.hpp"

namespace {

using qdlab::RunConfig;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Arguments that look like JSON documents are taken inline; anything else is
// a file path.
std::string inline_or_file(const std::string& arg) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) return arg;
  return read_file(arg);
}

// Reports go to --out when given, else into $QDLAB_OUT_DIR under a stable
// name, else to stdout. The bytes are identical in all three cases.
void emit(const std::string& text, const RunConfig& cfg, const std::string& stem) {
  std::string path;
  if (cfg.out) {
    path = *cfg.out;
  } else if (const char* dir = std::getenv("QDLAB_OUT_DIR")) {
    path = std::string(dir) + "/" + stem + "." + cfg.format;
  }
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << text;
}

int finish_suite(const qdlab::SuiteReport& rep, const RunConfig& cfg, const std::string& stem) {
  emit(cfg.format == "csv" ? qdlab::report_csv(rep) : qdlab::report_json(rep, cfg), cfg, stem);
  if (!rep.all_pass()) {
    std::cerr << rep.suite << ": " << rep.failures() << " check(s) failed\n";
    return 1;
  }
  return 0;
}

int cmd_suite(const std::string& name, const RunConfig& cfg) {
  return finish_suite(qdlab::run_suite(name, cfg), cfg, "suite-" + name);
}

int cmd_sum_theorem(const RunConfig& cfg) {
  return finish_suite(qdlab::run_sum_theorem(cfg), cfg, "sum-theorem");
}

int cmd_probe(const std::string& op_arg, const std::string& points_arg, const RunConfig& cfg) {
  qdlab::OperatorGraph S = qdlab::operator_from_arg(op_arg);
  std::vector<qdlab::PairedPoint> pts =
      qdlab::points_from_json(inline_or_file(points_arg), S.space());
  if (pts.empty()) throw std::invalid_argument("probe: empty point list");
  std::vector<qdlab::Certificate> certs;
  certs.reserve(pts.size());
  for (const auto& c : pts) certs.push_back(qdlab::probe(S, c, cfg.tol_opt, cfg.budget()));
  emit(qdlab::certificates_json(certs), cfg, "probe");
  return 0;  // certificates are findings, not failures
}

int cmd_conjugate(const std::string& grid_arg, const RunConfig& cfg) {
  qdlab::GridFunction f = qdlab::grid_function_from_json(inline_or_file(grid_arg));
  qdlab::Grid dual =
      cfg.grid ? qdlab::parse_grid_spec(*cfg.grid) : qdlab::default_dual_grid(f);
  qdlab::GridFunction fstar = qdlab::conjugate(f, dual);
  emit(cfg.format == "csv" ? qdlab::grid_function_csv(fstar) : qdlab::grid_function_json(fstar),
       cfg, "conjugate");
  return 0;
}

int cmd_gallery(const std::string& name, const RunConfig& cfg) {
  std::vector<qdlab::GallerySample> rows = qdlab::gallery_bound_samples(name, cfg);
  if (cfg.format == "csv") {
    emit(qdlab::gallery_csv(rows), cfg, "gallery-" + name);
  } else {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& s : rows)
      arr.push_back({{"sample", s.id}, {"rL", s.r}, {"lower_bound", s.bound}, {"slack", s.slack}});
    emit(arr.dump(2) + "\n", cfg, "gallery-" + name);
  }
  int bad = 0;
  for (const auto& s : rows)
    if (s.slack < -1e-9) ++bad;
  if (bad > 0) {
    std::cerr << "gallery " << name << ": " << bad << " sample(s) below the lower bound\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasidensity desk laboratory"};
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "RNG seed for randomized checks")
      ->envname("QDLAB_SEED")
      ->capture_default_str();
  app.add_option("--tol-exact", cfg.tol_exact, "tolerance for exact identities")
      ->capture_default_str();
  app.add_option("--tol-opt", cfg.tol_opt, "tolerance for optimization-backed checks")
      ->capture_default_str();
  app.add_option("--truncation", cfg.truncation, "sequence-space cutoff N")
      ->capture_default_str();
  std::string grid_spec, out_path;
  auto* grid_opt = app.add_option("--grid", grid_spec, "per-axis grid override lo:hi:n[,lo:hi:n]");
  auto* out_opt = app.add_option("--out", out_path, "report destination (default stdout)");
  app.add_option("--format", cfg.format, "report format: json or csv")->capture_default_str();

  std::string suite_name, op_arg, points_arg, grid_file, gallery_name;

  auto* suite = app.add_subcommand("suite", "run a named verification suite");
  suite->add_option("name", suite_name, "suite name (or 'all')")->required();
  suite->fallthrough();

  auto* probe = app.add_subcommand("probe", "probe an operator for quasidensity");
  probe->add_option("operator", op_arg, "operator JSON (file or inline) or builtin name")
      ->required();
  probe->add_option("points", points_arg, "probe points JSON (file or inline)")->required();
  probe->fallthrough();

  auto* conj = app.add_subcommand("conjugate", "discrete Fenchel conjugate of a grid function");
  conj->add_option("grid_function", grid_file, "grid function JSON (file or inline)")->required();
  conj->fallthrough();

  auto* sumthm = app.add_subcommand("sum-theorem", "episum / coincidence desk check");
  sumthm->fallthrough();

  auto* gallery = app.add_subcommand("gallery", "per-sample lower-bound table for a gallery operator");
  gallery->add_option("name", gallery_name, "gallery name: skewq, bstele, tail")->required();
  gallery->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // help/version exit clean; bad usage is a config error
  }

  try {
    if (*grid_opt) cfg.grid = grid_spec;
    if (*out_opt) cfg.out = out_path;
    cfg.validate();
    if (*suite) return cmd_suite(suite_name, cfg);
    if (*probe) return cmd_probe(op_arg, points_arg, cfg);
    if (*conj) return cmd_conjugate(grid_file, cfg);
    if (*sumthm) return cmd_sum_theorem(cfg);
    if (*gallery) return cmd_gallery(gallery_name, cfg);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;  // unreachable: require_subcommand(1)
}
