#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rtf/geomside.hpp"
#include "rtf/harness.hpp"
#include "rtf/heckemeasure.hpp"
#include "rtf/qfield.hpp"
#include "rtf/spectralside.hpp"

using namespace rtf;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_grid(const std::string& experiment, const std::string& config_path,
             const std::string& out_dir, int jobs, double tol, long nmax, long seed) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = config_from_json(read_file(config_path));
    if (cfg.experiment != experiment)
      throw std::invalid_argument("config experiment \"" + cfg.experiment +
                                  "\" does not match the subcommand");
  } else {
    cfg.experiment = experiment;
    cfg.fp.push_back("identity");
  }
  if (jobs > 0) cfg.jobs = jobs;
  if (tol > 0) cfg.tol = tol;
  if (nmax > 0) cfg.nmax = nmax;
  if (seed >= 0) cfg.seed = seed;
  RunReport rep = run_experiment(cfg);
  write_report(rep, out_dir);
  int fails = 0, skips = 0;
  for (auto& r : rep.rows) {
    if (!r.pass) ++fails;
    if (r.status.rfind("skip", 0) == 0) ++skips;
  }
  std::printf("%s: %zu rows, %d failed, %d skipped -> %s/%s.{csv,json}\n", experiment.c_str(),
              rep.rows.size(), fails, skips, out_dir.c_str(), experiment.c_str());
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relative-trace-formula desk calculator"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path, out_dir = ".";
  int jobs = 0;
  double tol = 0;
  long nmax = 0, seed = -1;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--jobs", jobs, "worker threads");
  app.add_option("--tol", tol, "tolerance override");
  app.add_option("--nmax", nmax, "AFE coefficient cutoff override");
  app.add_option("--seed", seed, "reserved; affects nothing numerical");

  // --- classgroup ---
  std::vector<long> cg_D;
  auto* cg = app.add_subcommand("classgroup", "class group of Q(sqrt(D))");
  cg->add_option("--D", cg_D, "fundamental discriminants (< 0)")->required();

  // --- classset ---
  std::vector<long> cs_N;
  auto* cs = app.add_subcommand("classset", "right ideal classes of the level-N order");
  cs->add_option("--N", cs_N, "levels (squarefree, odd number of primes)")->required();

  // --- geometric ---
  long g_D = 0, g_N = 0;
  int g_k = 1, g_m = 0;
  auto* ge = app.add_subcommand("geometric", "geometric side of the identity");
  ge->add_option("--D", g_D)->required();
  ge->add_option("--N", g_N)->required();
  ge->add_option("--k", g_k);
  ge->add_option("--m", g_m);

  // --- measure-check ---
  std::vector<long> mc_q{2, 3, 5, 7, 9};
  auto* mc = app.add_subcommand("measure-check", "Plancherel / I-tilde identity suite");
  mc->add_option("--q", mc_q, "residue cardinalities");

  // --- grid experiments ---
  app.add_subcommand("verify-average", "spectral vs geometric vs classical reference");
  app.add_subcommand("equidist", "weighted equidistribution trend");
  app.add_subcommand("subconvexity", "subconvexity-shape scan");

  // --- ingest ---
  std::string in_file;
  long in_nmax = 0;
  auto* ing = app.add_subcommand("ingest", "validate an eigenform coefficient file");
  ing->add_option("--file", in_file, "coefficient file")->required();
  ing->add_option("--nmax", in_nmax, "required prime coverage");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cg->parsed()) {
      for (long D : cg_D) {
        QuadField E = make_field(D);
        ClassGroup pic(E);
        std::printf("D=%ld h=%ld cyclic=[", D, pic.h());
        auto& cy = pic.cyclic_orders();
        for (std::size_t i = 0; i < cy.size(); ++i)
          std::printf("%s%ld", i ? "," : "", cy[i]);
        std::printf("] u=%d\n", E.u);
      }
      return 0;
    }
    if (cs->parsed()) {
      for (long N : cs_N) {
        ClassSet X = right_ideal_classes(maximal_order(build_algebra(N), N));
        mpq_class mass = 0;
        std::printf("N=%ld classes=%zu weights=[", N, X.reps.size());
        for (std::size_t i = 0; i < X.weights.size(); ++i) {
          std::printf("%s%ld", i ? "," : "", X.weights[i]);
          mass += mpq_class(1, X.weights[i]);
        }
        std::printf("] mass=%s\n", mass.get_str().c_str());
      }
      return 0;
    }
    if (ge->parsed()) {
      QuadField E = make_field(g_D);
      ClassGroup pic(E);
      auto oms = characters(pic);
      GeomConfig cfg{g_N, E, &pic, oms[0], g_k, g_m, 1, std::nullopt};
      GeomReport rep = geometric_total(cfg);
      std::printf("D=%ld N=%ld k=%d m=%d irregular=%.12g regular_terms=%zu total=%.12g\n", g_D,
                  g_N, g_k, g_m, rep.irregular, rep.regular.size(), rep.total);
      for (auto& t : rep.regular)
        std::printf("  n=%ld value=%.12g%s\n", t.n, t.value.real(),
                    t.exact ? (" (= " + t.value_q.get_str() + ")").c_str() : "");
      return 0;
    }
    if (mc->parsed()) {
      bool ok = true;
      for (long q : mc_q) {
        SuiteReport rep = plancherel_suite(q);
        bool pass = rep.pass(1e-10);
        ok = ok && pass;
        std::printf("q=%ld checks=%zu max_err=%.3e %s\n", q, rep.checks.size(), rep.max_err(),
                    pass ? "pass" : "FAIL");
      }
      return ok ? 0 : 1;
    }
    if (ing->parsed()) {
      IngestedForm f = ingest_eigenform(in_file);
      if (in_nmax > 0) to_eigenap(f, in_nmax);
      std::printf("%s: level=%ld weight=%d label=%s coefficients=%zu%s\n", in_file.c_str(),
                  f.level, f.weight2k, f.label.c_str(), f.an.size(),
                  in_nmax > 0 ? " (prime coverage ok)" : "");
      return 0;
    }
    for (const char* name : {"verify-average", "equidist", "subconvexity"})
      if (app.get_subcommand(name)->parsed())
        return run_grid(name, config_path, out_dir, jobs, tol, nmax, seed);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 0;
}
