#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rtf/harness.hpp"
#include "rtf/heckemeasure.hpp"
#include "rtf/spectralside.hpp"

using namespace rtf;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream f(path, std::ios::binary);
  f << body;
  return path;
}

}  // namespace

TEST_CASE("ingest: well-formed file and error reporting") {
  auto path = write_temp("rtf_form_ok.txt",
                         "# level-11 weight-2 eigenform\n"
                         "level 11 weight 2 label 11a\n"
                         "1,1\n2,-2\n3,-1\n5,1\n7,-2\n11,1\n13,4\n");
  IngestedForm f = ingest_eigenform(path);
  CHECK(f.level == 11);
  CHECK(f.weight2k == 2);
  CHECK(f.label == "11a");
  CHECK(f.an.at(2) == -2.0);
  EigenAp g = to_eigenap(f, 13);
  CHECK(g.k == 1);
  CHECK(g.ap.at(13) == 4.0);
  // coverage gap beyond the listed primes
  CHECK_THROWS_WITH_AS(to_eigenap(f, 20), doctest::Contains("missing a_17"), std::runtime_error);

  auto bad1 = write_temp("rtf_form_bad1.txt", "level 11 weight 2 label x\n1,1\n4;8\n");
  CHECK_THROWS_WITH_AS(ingest_eigenform(bad1), doctest::Contains(":3:"), std::runtime_error);
  auto bad2 = write_temp("rtf_form_bad2.txt", "weight 2 level 11 label x\n1,1\n");
  CHECK_THROWS_WITH_AS(ingest_eigenform(bad2), doctest::Contains("header"), std::runtime_error);
  auto bad3 = write_temp("rtf_form_bad3.txt", "level 11 weight 3 label x\n1,1\n");
  CHECK_THROWS_WITH_AS(ingest_eigenform(bad3), doctest::Contains("even"), std::runtime_error);
  auto bad4 = write_temp("rtf_form_bad4.txt", "level 11 weight 2 label x\n1,1\n2,-2\n2,-2\n");
  CHECK_THROWS_WITH_AS(ingest_eigenform(bad4), doctest::Contains("duplicate"), std::runtime_error);
  auto bad5 = write_temp("rtf_form_bad5.txt", "level 11 weight 2 label x\n2,-2\n");
  CHECK_THROWS_WITH_AS(ingest_eigenform(bad5), doctest::Contains("a_1"), std::runtime_error);
}

TEST_CASE("config: JSON round trip and strictness") {
  ExperimentConfig cfg = config_from_json(
      R"({"experiment":"verify-average","D":[-4],"N":[11,19],"omega":"all",)"
      R"("fp":["identity","T_3"],"tol":1e-9,"afe":true,"J":[0.5,1.5],"jobs":3})");
  CHECK(cfg.experiment == "verify-average");
  CHECK(cfg.D == std::vector<i64>{-4});
  CHECK(cfg.N == std::vector<i64>{11, 19});
  CHECK(cfg.omega == "all");
  CHECK(cfg.fp.size() == 2);
  CHECK(cfg.tol == 1e-9);
  CHECK(cfg.afe);
  CHECK(cfg.J_lo == 0.5);
  CHECK(cfg.jobs == 3);
  ExperimentConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.N == cfg.N);
  CHECK(back.J_hi == cfg.J_hi);
  CHECK_THROWS_AS(config_from_json(R"({"experiment":"x","bogus":1})"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(R"({"D":[-4]})"), std::invalid_argument);
}

TEST_CASE("average_row: identities and closed-form references") {
  ReportRow r = average_row(-4, 11, 0, "identity", 1e-8);
  CHECK(r.pass);
  CHECK(r.status == "ok");
  CHECK(r.spectral == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.geometric == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.classical == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(r.reference == doctest::Approx(0.4));

  // empty cusp space: everything 0 (trivial-omega reference vanishes too)
  ReportRow z = average_row(-3, 5, 0, "identity", 1e-8);
  CHECK(z.pass);
  CHECK(std::abs(z.classical) < 1e-12);
  CHECK(std::abs(z.reference) < 1e-12);

  // below stability there is no closed-form reference; the two sides still
  // agree (here both vanish: no cusp forms, nontrivial character)
  ReportRow b = average_row(-23, 5, 1, "identity", 1e-8);
  CHECK(b.pass);
  CHECK(b.omega == "chi1(ord 3)");
  CHECK_FALSE(b.has_reference);
  CHECK(b.abs_dev < 1e-10);

  // nontrivial character in the stability range: reference is h itself
  ReportRow n = average_row(-23, 37, 1, "identity", 1e-8);
  CHECK(n.pass);
  CHECK(n.reference == doctest::Approx(3.0));
  CHECK(n.classical == doctest::Approx(3.0).epsilon(1e-8));

  // inadmissible pair is a skip, not a failure
  ReportRow s = average_row(-4, 13, 0, "identity", 1e-8);
  CHECK(s.pass);
  CHECK(s.status.substr(0, 4) == "skip");
}

TEST_CASE("average_row: Hecke-weighted identity and stability skip") {
  ReportRow r = average_row(-4, 11, 0, "T_2", 1e-8);
  CHECK(r.pass);
  CHECK(r.status == "ok");
  CHECK(r.rel_dev < 1e-10);
  // T_3 pushes the effective stability bound past N = 11
  ReportRow s = average_row(-4, 11, 0, "T_3", 1e-8);
  CHECK(s.status == "skip: weighted configuration below the stability range");
}

TEST_CASE("plancherel_interval: mass, symmetry, emptiness") {
  CHECK(plancherel_interval(3, -2, 2) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(plancherel_interval(3, 0, 2) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(plancherel_interval(3, -2, 0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(plancherel_interval(3, 1, 1) == 0.0);
  CHECK(plancherel_interval(2, -1, 1) + plancherel_interval(2, 1, 2) +
            plancherel_interval(2, -2, -1) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("equidistribution limit constant: closed form at p=3, D=-4") {
  QuadField E = make_field(-4);
  // 2 * L(1,eta)(1 + 1/3) * (1 - 1/9)^{-1} = 2 * (1/4)(4/3)(9/8) = 3/4
  CHECK(equidist_limit_constant(3, E, 1, 0) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("euler_factor_removal: local closed forms") {
  QuadField E4 = make_field(-4);
  ClassGroup pic4(E4);
  auto om4 = characters(pic4)[0];
  // inert p: the ratio collapses to 1/(1 - 1/p) independently of b_p
  for (double bp : {-1.9, -0.3, 0.0, 1.2, 1.999})
    CHECK(euler_factor_removal(3, bp, E4, pic4, om4) ==
          doctest::Approx(1.0 / (1.0 - 1.0 / 3.0)).epsilon(1e-12));
  // split p with trivial Omega: (1 + 1/p - x/sqrt p) / ((1-1/p)(1 + 1/p + x/sqrt p))
  QuadField E23 = make_field(-23);
  ClassGroup pic23(E23);
  auto oms23 = characters(pic23);
  const double p = 2.0;
  for (double bp : {-1.5, 0.4, 1.8}) {
    double expect = (1.0 + 1.0 / p - bp / std::sqrt(p)) /
                    ((1.0 - 1.0 / p) * (1.0 + 1.0 / p + bp / std::sqrt(p)));
    CHECK(euler_factor_removal(2, bp, E23, pic23, oms23[0]) ==
          doctest::Approx(expect).epsilon(1e-12));
    // nontrivial class character: still real and positive
    CHECK(euler_factor_removal(2, bp, E23, pic23, oms23[1]) > 0);
  }
}

TEST_CASE("equidist_report: trend toward the limit") {
  ExperimentConfig cfg;
  cfg.experiment = "equidist";
  cfg.D = {-4};
  cfg.p = 3;
  cfg.J_lo = 0;
  cfg.J_hi = 2;
  cfg.N = {7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83};
  cfg.jobs = 4;
  RunReport rep = equidist_report(cfg);
  CHECK(rep.all_pass());
  CHECK(rep.rows.size() == cfg.N.size());
  for (auto& r : rep.rows) CHECK(r.reference == doctest::Approx(0.375).epsilon(1e-10));
  // running-mean deviation shrinks on a clear majority of steps
  int shrink = 0, steps = 0;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    ++steps;
    if (rep.rows[i].abs_dev < rep.rows[i - 1].abs_dev - 1e-15) ++shrink;
  }
  CHECK(3 * shrink >= 2 * (steps - 3));  // the empty-cusp prefix holds flat
  CHECK(rep.rows.back().abs_dev < rep.rows.front().abs_dev);
}

TEST_CASE("subconvexity_scan: positivity and fitted envelope") {
  ExperimentConfig cfg;
  cfg.experiment = "subconvexity";
  cfg.D = {-4, -3};
  cfg.N = {7, 11, 19, 23};
  cfg.omega = "all";
  cfg.jobs = 2;
  RunReport rep = subconvexity_scan(cfg);
  CHECK(rep.all_pass());
  bool some = false;
  for (auto& r : rep.rows) {
    if (!r.has_spectral) continue;
    some = true;
    CHECK(r.spectral <= r.reference * (1.0 + 1e-9));
    CHECK(r.geometric >= -1e-12);
  }
  CHECK(some);
}

TEST_CASE("CSV: RFC-4180 quoting and jobs-independence") {
  ReportRow r;
  r.experiment = "verify-average";
  r.omega = "trivial";
  r.fp = "identity";
  r.status = "skip: prime 5 of N not inert in E, really";
  std::string csv = rows_to_csv({r});
  CHECK(csv.find("\"skip: prime 5 of N not inert in E, really\"") != std::string::npos);
  CHECK(csv.substr(0, 10) == "experiment");

  ExperimentConfig cfg = config_from_json(
      R"({"experiment":"verify-average","D":[-4,-3],"N":[11,17],"omega":"all",)"
      R"("fp":["identity","T_2"]})");
  cfg.jobs = 1;
  std::string one = rows_to_csv(run_experiment(cfg).rows);
  cfg.jobs = 8;
  std::string eight = rows_to_csv(run_experiment(cfg).rows);
  CHECK(one == eight);
}

TEST_CASE("classical AFE route matches the closed form at D=-4, N=11") {
  auto X = right_ideal_classes(maximal_order(build_algebra(11), 11));
  std::vector<i64> primes;
  for (i64 p : primes_up_to(460))
    if (p != 11) primes.push_back(p);
  EigenData ed = eigen_decompose(X, primes);
  std::vector<EigenAp> forms;
  for (auto& f : ed.cusp_forms) {
    EigenAp g;
    g.N = 11;
    g.k = 1;
    g.ap = f.ap;
    forms.push_back(std::move(g));
  }
  CHECK(classical_afe_value(forms, -4) == doctest::Approx(0.4).epsilon(1e-5));
}
