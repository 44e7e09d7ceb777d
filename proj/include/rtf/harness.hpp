#ifndef RTF_HARNESS_HPP
#define RTF_HARNESS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtf/lfunc.hpp"
#include "rtf/qfield.hpp"

namespace rtf {

// ---------------------------------------------------------------------------
// Eigenform coefficient ingestion.
// Format: UTF-8 text, '#' comment lines, one header "level N weight 2k label
// STR", then data lines "n,a_n" with exact integers.
struct IngestedForm {
  i64 level = 0;
  int weight2k = 0;
  std::string label;
  std::map<i64, double> an;
};

// throws std::runtime_error with "<path>:<line>: message" on malformed input
IngestedForm ingest_eigenform(const std::string& path);

// extract prime data; requires coverage of every prime <= n_max (and a_n
// consistent with multiplicativity where both sides are present)
EigenAp to_eigenap(const IngestedForm& f, i64 n_max);

// ---------------------------------------------------------------------------
// Experiment configuration (one JSON document).
struct ExperimentConfig {
  std::string experiment;            // verify-average | equidist | subconvexity
  std::vector<i64> D;                // fundamental discriminants (< 0)
  std::vector<i64> N;                // levels
  int k = 1;                         // half the weight (weight = 2k)
  std::string omega = "trivial";     // trivial | all | index:<j>
  std::vector<std::string> fp;       // "identity" or "T_<p>"
  double tol = 1e-8;                 // spectral-vs-geometric relative gate
  bool afe = false;                  // add the independent AFE column
  i64 nmax = 0;                      // AFE coefficient cutoff (0 = heuristic)
  i64 p = 3;                         // equidistribution prime
  double J_lo = 0.0, J_hi = 2.0;     // equidistribution window for a_p/sqrt(p)
  double eps = 0.01;                 // subconvexity exponent epsilon
  std::string ingest;                // optional coefficient file (k > 1 AFE)
  int jobs = 1;
  long seed = 0;                     // reserved; affects nothing numerical
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// One result row. Deviations are recomputed from the stored values on output,
// never cached independently.
struct ReportRow {
  std::string experiment;
  i64 D = 0, N = 0;
  int k = 1;
  std::string omega;     // "trivial" or "chi<j>(ord <r>)"
  std::string fp;        // "identity" or "T_<p>"
  double spectral = 0, geometric = 0, classical = 0, afe = 0, reference = 0;
  bool has_spectral = false, has_geometric = false, has_classical = false, has_afe = false,
       has_reference = false;
  double abs_dev = 0, rel_dev = 0;
  bool has_dev = false;
  double time_ms = 0;
  std::string status = "ok";  // "ok" | "skip: ..." | "fail: ..."
  bool pass = true;
};

struct RunReport {
  ExperimentConfig cfg;
  std::vector<ReportRow> rows;
  bool all_pass() const;
};

// Dispatches on cfg.experiment; rows are computed by a worker pool of
// cfg.jobs threads and aggregated in config order (byte-deterministic).
RunReport run_experiment(const ExperimentConfig& cfg);

RunReport verify_average(const ExperimentConfig& cfg);
RunReport equidist_report(const ExperimentConfig& cfg);
RunReport subconvexity_scan(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Individual row primitives (also used by the acceptance suite).

// spectral vs geometric vs classical for one (D, N, Omega, fp); omega_index
// selects from characters(pic); fp_name as in ExperimentConfig::fp
ReportRow average_row(i64 D, i64 N, std::size_t omega_index, const std::string& fp_name,
                      double tol, bool with_afe = false, i64 nmax = 0);

// classical AFE route: sum over the Brandt eigenforms of
// c_k * L_fin(1/2, f) L_fin(1/2, f x chi_D) / (f, f),
// c_k = (2k-2)! u sqrt(d) / (2 pi (4 pi)^{2k-1}); k = 1 uses the Brandt
// eigen-data at level N, k > 1 a single ingested form
double classical_afe_value(const std::vector<EigenAp>& forms, i64 D, i64 nmax = 0);

// mu_p(J) for the Plancherel probability measure at residue cardinality p
double plancherel_interval(i64 p, double lo, double hi);

// limit constant of the weighted equidistribution law (excluding mu_p(J)):
// 2 binom(2k-2, k+m-1)^{-1} L^{S(Omega) cup p}(1, eta) L(2, 1_{Q_p})
double equidist_limit_constant(i64 p, const QuadField& E, int k, int m);

// per-form local correction removing the Euler factors at p:
// L_p(1, Ad) / L_p(1/2, pi_E x Omega) for a form with eigenvalue b_p =
// a_p / sqrt(p) (k = 1 normalization), p coprime to N c(Omega)
double euler_factor_removal(i64 p, double bp, const QuadField& E, const ClassGroup& pic,
                            const ClassCharacter& omega);

// ---------------------------------------------------------------------------
// Persistence.
std::string rows_to_csv(const std::vector<ReportRow>& rows);
std::string report_to_json(const RunReport& rep);
// writes <out_dir>/<experiment>.csv and .json; creates out_dir if needed
void write_report(const RunReport& rep, const std::string& out_dir);

}  // namespace rtf

#endif
