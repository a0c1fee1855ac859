#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdlab/grid.hpp"
#include "qdlab/operators.hpp"
#include "qdlab/quasidensity.hpp"

namespace qdlab {

struct RunConfig {
  std::uint64_t seed = 2026;
  double tol_exact = 1e-12;
  double tol_opt = 1e-6;
  int truncation = 64;
  std::optional<std::string> grid;  // per-axis override "lo:hi:n,lo:hi:n"
  std::optional<std::string> out;   // report destination (default stdout)
  std::string format = "json";      // "json" or "csv"

  void validate() const;  // throws std::invalid_argument on bad knobs
  Budget budget() const;
};

struct CheckRow {
  std::string suite;
  std::string name;
  std::string anchor;      // stable check id carried into reports
  double residual = 0.0;   // measured violation, 0 when clean
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckRow> rows;

  int failures() const;
  bool all_pass() const { return failures() == 0; }
};

// Suite names: identities, conjugates, episums, fitzpatrick, quasidensity,
// gallery, all. Throws std::invalid_argument for unknown names.
const std::vector<std::string>& suite_names();
SuiteReport run_suite(const std::string& name, const RunConfig& cfg);

// Desk-scale sum-rule scenario (episum of two identity Fitzpatrick functions,
// coincidence of the @-transform against the doubled-identity graph) on the
// default 65x65 box or a 2-D --grid override.
SuiteReport run_sum_theorem(const RunConfig& cfg);

// Per-sample bound table behind `gallery <name>` (names: skewq, bstele, tail).
struct GallerySample {
  int id = 0;
  double r = 0.0;      // measured r_L value
  double bound = 0.0;  // closed-form lower bound for this sample
  double slack = 0.0;  // r - bound, nonnegative when the bound holds
};
std::vector<GallerySample> gallery_bound_samples(const std::string& name, const RunConfig& cfg);
std::string gallery_csv(const std::vector<GallerySample>& samples);

// --- serialization (byte-deterministic for fixed inputs) ---

std::string report_json(const SuiteReport& rep, const RunConfig& cfg);
std::string report_csv(const SuiteReport& rep);

std::string grid_function_json(const GridFunction& f);
GridFunction grid_function_from_json(const std::string& text);
std::string grid_function_csv(const GridFunction& f);

std::string operator_json(const OperatorGraph& S);
OperatorGraph operator_from_json(const std::string& text);
// file path, inline JSON document, or builtin name (tail, skewq, bstele)
OperatorGraph operator_from_arg(const std::string& arg);

std::string certificate_json(const Certificate& cert);
std::string certificates_json(const std::vector<Certificate>& certs);

std::vector<PairedPoint> points_from_json(const std::string& text, const PairedSpace& space);

// "lo:hi:n,lo:hi:n" -> Grid (1..4 axes)
Grid parse_grid_spec(const std::string& spec);

}  // namespace qdlab
