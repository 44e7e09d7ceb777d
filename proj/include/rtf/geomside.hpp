#ifndef RTF_GEOMSIDE_HPP
#define RTF_GEOMSIDE_HPP

#include <optional>
#include <vector>

#include "rtf/heckemeasure.hpp"
#include "rtf/qfield.hpp"

namespace rtf {

// Inputs for the geometric side. fp absent means the identity test element at
// the auxiliary prime (support ideal Z_p, |I| = 1).
struct GeomConfig {
  i64 N = 1;
  QuadField E;
  const ClassGroup* pic = nullptr;
  ClassCharacter omega;
  int k = 1;
  int m = 0;
  i64 c_omega = 1;
  std::optional<HeckeElement> fp;
};

struct SupportPoint {
  i64 n = 0;
  mpq_class xi;  // n / (n + d_eff)
};

struct RegularTerm {
  i64 n = 0;
  cplx value = 0;
  bool exact = false;      // set for trivial Omega, k = 1
  mpq_class value_q;       // the exact rational value when exact
};

struct GeomReport {
  double irregular = 0;
  std::vector<RegularTerm> regular;
  double total = 0;
};

// checks the standing hypotheses (|m| < k, N squarefree with an odd number of
// prime factors, every p | N inert in E); throws invalid_argument otherwise
void validate_geom_config(const GeomConfig& cfg);

// exact rational evaluation of the archimedean weight polynomial
// P_{k,m}(x) = (1-x)^{1-k} sum_i C(k+m-1, i) C(k-m-1, i) (-x)^i, |m| < k
mpq_class pkm_eval_q(int k, int m, const mpq_class& xi);
double pkm_eval(int k, int m, double xi);

// norm of the support ideal of fp: q^{max n in the coefficient support}
i64 fp_support_norm(const GeomConfig& cfg);

// the finite set of regular orbits: n in N*Z with -d_eff < n < 0
// (d_eff = |D| c(Omega) |I(fp)|) whose xi = n/(n+d_eff) satisfies the local
// membership conditions (odd valuation at p | N, local norm conditions away
// from N, negativity at infinity)
std::vector<SupportPoint> regular_support(const GeomConfig& cfg);

// explicit regular orbital sum for unramified Omega and identity fp; each term
// carries its 4/|D| prefactor so that total = irregular + sum(regular)
std::vector<RegularTerm> regular_sum(const GeomConfig& cfg);

// irregular (identity double-coset) contribution:
// 4 L(1,eta) L_{S(Omega)}(1,eta) / sqrt(c |D|) * (1 + delta-term) * Itilde;
// the completed L(1,eta) = h/(u sqrt d), while the partial product
// L_{S(Omega)}(1,eta) is empty (= 1) for an unramified Omega, and the
// delta-term vanishes for N > 1
double irregular_terms(const GeomConfig& cfg, cplx fp_transform);

GeomReport geometric_total(const GeomConfig& cfg);

}  // namespace rtf

#endif
