#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rtf/geomside.hpp"
#include "rtf/harness.hpp"
#include "rtf/heckemeasure.hpp"
#include "rtf/lfunc.hpp"
#include "rtf/qfield.hpp"
#include "rtf/spectralside.hpp"
#include "rtf/torusmap.hpp"

namespace py = pybind11;
using namespace rtf;

namespace {

py::dict row_to_dict(const ReportRow& r) {
  py::dict d;
  d["experiment"] = r.experiment;
  d["D"] = r.D;
  d["N"] = r.N;
  d["k"] = r.k;
  d["omega"] = r.omega;
  d["fp"] = r.fp;
  if (r.has_spectral) d["spectral"] = r.spectral;
  if (r.has_geometric) d["geometric"] = r.geometric;
  if (r.has_classical) d["classical"] = r.classical;
  if (r.has_afe) d["afe"] = r.afe;
  if (r.has_reference) d["reference"] = r.reference;
  if (r.has_dev) {
    d["abs_dev"] = r.abs_dev;
    d["rel_dev"] = r.rel_dev;
  }
  d["status"] = r.status;
  d["pass"] = r.pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rtfdesk, m) {
  m.doc() = "desk-scale relative trace formula toolkit";

  m.def(
      "class_number",
      [](long D) { return ClassGroup(make_field(D)).h(); },
      py::arg("D"), "class number of Q(sqrt(D)), D a negative fundamental discriminant");

  m.def(
      "class_group_structure",
      [](long D) { return ClassGroup(make_field(D)).cyclic_orders(); },
      py::arg("D"), "invariant factors of the class group");

  m.def(
      "class_set_weights",
      [](long N) {
        ClassSet X = right_ideal_classes(maximal_order(build_algebra(N), N));
        return X.weights;
      },
      py::arg("N"), "unit weights w_x of the right ideal classes at level N");

  m.def(
      "brandt_eigenvalues",
      [](long N, std::vector<long> primes) {
        ClassSet X = right_ideal_classes(maximal_order(build_algebra(N), N));
        EigenData ed = eigen_decompose(X, primes);
        std::vector<std::map<long, double>> out;
        for (auto& f : ed.cusp_forms) out.push_back(f.ap);
        return out;
      },
      py::arg("N"), py::arg("primes"),
      "Hecke eigenvalue dictionaries of the cuspidal Brandt eigenforms");

  m.def(
      "verify_average_row",
      [](long D, long N, std::size_t omega_index, const std::string& fp, double tol, bool afe) {
        return row_to_dict(average_row(D, N, omega_index, fp, tol, afe));
      },
      py::arg("D"), py::arg("N"), py::arg("omega_index") = 0, py::arg("fp") = "identity",
      py::arg("tol") = 1e-8, py::arg("afe") = false,
      "spectral vs geometric vs classical for one configuration");

  m.def(
      "geometric_report",
      [](long D, long N, std::size_t omega_index) {
        QuadField E = make_field(D);
        ClassGroup pic(E);
        GeomConfig cfg{N, E, &pic, characters(pic)[omega_index], 1, 0, 1, std::nullopt};
        GeomReport rep = geometric_total(cfg);
        py::dict d;
        d["irregular"] = rep.irregular;
        d["total"] = rep.total;
        py::list reg;
        for (auto& t : rep.regular) {
          py::dict e;
          e["n"] = t.n;
          e["value"] = t.value;
          reg.append(e);
        }
        d["regular"] = reg;
        return d;
      },
      py::arg("D"), py::arg("N"), py::arg("omega_index") = 0);

  m.def(
      "plancherel_max_err",
      [](long q, int max_n) { return plancherel_suite(q, max_n).max_err(); },
      py::arg("q"), py::arg("max_n") = 6);

  m.def("plancherel_interval", &plancherel_interval, py::arg("p"), py::arg("lo"), py::arg("hi"),
        "mu_p of an interval for the Plancherel probability measure");

  m.def(
      "equidist_limit",
      [](long p, long D, double lo, double hi) {
        return equidist_limit_constant(p, make_field(D), 1, 0) * plancherel_interval(p, lo, hi);
      },
      py::arg("p"), py::arg("D"), py::arg("lo") = -2.0, py::arg("hi") = 2.0);

  m.def(
      "newform_central_value",
      [](long N, long nmax) {
        ClassSet X = right_ideal_classes(maximal_order(build_algebra(N), N));
        if (nmax == 0) nmax = default_nmax(static_cast<double>(N));
        std::vector<long> primes;
        for (long p : primes_up_to(nmax))
          if (N % p != 0) primes.push_back(p);
        EigenData ed = eigen_decompose(X, primes);
        std::vector<double> out;
        for (auto& f : ed.cusp_forms) {
          EigenAp g;
          g.N = N;
          g.k = 1;
          g.ap = f.ap;
          auto L = build_lseries(LKind::newform, g, 0, nullptr, nullptr, nmax);
          out.push_back(afe_value(L, 0.5).finite.real());
        }
        return out;
      },
      py::arg("N"), py::arg("nmax") = 0,
      "analytically normalized central values L(1/2, f) of the level-N weight-2 newforms");

  m.def(
      "run_experiment_json",
      [](const std::string& config_json) {
        RunReport rep = run_experiment(config_from_json(config_json));
        return report_to_json(rep);
      },
      py::arg("config_json"), "run a JSON-configured experiment; returns the JSON report");

  m.def("ingest_eigenform", [](const std::string& path) {
    IngestedForm f = ingest_eigenform(path);
    py::dict d;
    d["level"] = f.level;
    d["weight"] = f.weight2k;
    d["label"] = f.label;
    d["an"] = f.an;
    return d;
  });
}
