// Python bindings for the main desk operations: bilinear forms, probes,
// discrete conjugates, verification suites, and the sequence-space gallery
// rules. Structured payloads travel as JSON strings so the byte-deterministic
// serializers stay the single source of truth.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "qdlab/convexcalc.hpp"
#include "qdlab/gallery.hpp"
#include "qdlab/quasidensity.hpp"
#include "qdlab/suites.hpp"

namespace py = pybind11;
using namespace qdlab;

namespace {

std::vector<double> dense(const FinTailSeq& s) { return s.prefix(); }

RunConfig make_config(std::uint64_t seed, double tol_exact, double tol_opt, int truncation) {
  RunConfig cfg;
  cfg.seed = seed;
  cfg.tol_exact = tol_exact;
  cfg.tol_opt = tol_opt;
  cfg.truncation = truncation;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "quasidensity desk laboratory";

  m.def(
      "q_form",
      [](const std::vector<double>& x, const std::vector<double>& xs) {
        return q_form(PairedPoint::finite(x, xs));
      },
      py::arg("x"), py::arg("xstar"), "coupling <x, x*> of a finite euclidean pair");
  m.def(
      "r_form",
      [](const std::vector<double>& x, const std::vector<double>& xs) {
        return r_form(PairedPoint::finite(x, xs));
      },
      py::arg("x"), py::arg("xstar"),
      "|x|^2/2 + |x*|^2/2 + <x, x*> of a finite euclidean pair");

  m.def("suite_names", [] { return suite_names(); });
  m.def(
      "run_suite_json",
      [](const std::string& name, std::uint64_t seed, double tol_exact, double tol_opt,
         int truncation) {
        RunConfig cfg = make_config(seed, tol_exact, tol_opt, truncation);
        return report_json(run_suite(name, cfg), cfg);
      },
      py::arg("name"), py::arg("seed") = 2026, py::arg("tol_exact") = 1e-12,
      py::arg("tol_opt") = 1e-6, py::arg("truncation") = 64,
      "run a verification suite and return its JSON report");

  m.def(
      "probe_json",
      [](const std::string& operator_arg, const std::string& points_json, double tol,
         std::uint64_t seed, int truncation) {
        OperatorGraph S = operator_from_arg(operator_arg);
        RunConfig cfg = make_config(seed, 1e-12, tol, truncation);
        std::vector<Certificate> certs;
        for (const auto& c : points_from_json(points_json, S.space()))
          certs.push_back(probe(S, c, tol, cfg.budget()));
        return certificates_json(certs);
      },
      py::arg("operator"), py::arg("points"), py::arg("tol") = 1e-6, py::arg("seed") = 2026,
      py::arg("truncation") = 64,
      "probe an operator (builtin name, inline JSON, or file) at PairedPoint list JSON");

  m.def(
      "conjugate_json",
      [](const std::string& grid_function, const std::optional<std::string>& grid_spec) {
        GridFunction f = grid_function_from_json(grid_function);
        Grid dual = grid_spec ? parse_grid_spec(*grid_spec) : default_dual_grid(f);
        return grid_function_json(conjugate(f, dual));
      },
      py::arg("grid_function"), py::arg("grid") = std::nullopt,
      "discrete Fenchel conjugate of a grid function (JSON in, JSON out)");

  m.def(
      "tail_apply",
      [](const std::vector<double>& xs) {
        return dense(gallery::tail_apply(FinTailSeq::from_dense(xs)));
      },
      py::arg("xstar"));
  m.def(
      "skew_apply",
      [](const std::vector<double>& x) {
        return dense(gallery::skew_apply(FinTailSeq::from_dense(x)));
      },
      py::arg("x"));
  m.def(
      "bs_apply",
      [](const std::vector<double>& xs) {
        return dense(gallery::bs_apply(FinTailSeq::from_dense(xs)));
      },
      py::arg("xstar"));
  m.def("k_conjugate", &gallery::k_conjugate, py::arg("mu"),
        "conjugate of <., ones>^2 at 2 mu ones");
  m.def(
      "skew_bound",
      [](const std::vector<double>& x) {
        gallery::SkewBound b = gallery::skew_bound(FinTailSeq::from_dense(x));
        return py::make_tuple(b.r, b.chain);
      },
      py::arg("x"), "(r, chain) for the one-tenth probe floor");
}
