#ifndef RTF_LFUNC_HPP
#define RTF_LFUNC_HPP

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "rtf/qfield.hpp"

namespace rtf {

using cplx = std::complex<double>;

// Completed gamma factor data: a product of Gamma_R(s + mu) = pi^{-(s+mu)/2}
// Gamma((s+mu)/2) and Gamma_C(s + mu) = 2 (2pi)^{-(s+mu)} Gamma(s + mu).
enum class GammaKind { gamma_r, gamma_c };
struct GammaFactor {
  GammaKind kind = GammaKind::gamma_r;
  double mu = 0;
};

// Dirichlet series in the analytic normalization: Lambda(s) = C^{s/2} gamma(s)
// L(s) with L(s) = sum coeff[n] n^{-s} and functional equation
// Lambda(s) = sign * conj-dual Lambda(2*center - s); center = 1/2 throughout.
// residue is the residue of Lambda at s = 1 (zeta only).
struct LSeries {
  int degree = 0;
  std::vector<cplx> coeff;  // 1-based; coeff[0] unused
  double conductor = 1;
  std::vector<GammaFactor> gamma_data;
  double sign = 1;
  double center = 0.5;
  double residue = 0;
  std::string label;
};

enum class LKind { zeta, quad_char, newform, newform_twist, rankin, sym2 };

// Hecke eigenvalue data for a weight-2k level-N eigenform, unnormalized
// (|a_p| <= 2 p^{(2k-1)/2}). Entries at p | N may be omitted for the degree-2
// kinds; they are then resolved (a_p = +-p^{k-1}) through the functional
// equation gate together with the sign.
struct EigenAp {
  i64 N = 1;
  int k = 1;
  std::map<i64, double> ap;
};

i64 default_nmax(double conductor);

// kind-specific inputs: D (fundamental < 0) for quad_char / newform_twist /
// rankin; pic+omega for rankin with a class character. f is ignored for
// zeta / quad_char.
LSeries build_lseries(LKind kind, const EigenAp& f, i64 D, const ClassGroup* pic,
                      const ClassCharacter* omega, i64 n_max);

// C^{s/2} * gamma(s) for the series' gamma data
cplx gamma_factor(const LSeries& L, double s);

// functional-equation self-consistency residual on a probe grid:
// max |Lambda(s) - sign Lambda(1-s)| / max |Lambda(s)|, the two sides
// evaluated with independent split points of the smoothed AFE
double fe_residual(const LSeries& L);

struct AfeResult {
  cplx completed;  // Lambda(s0)
  cplx finite;     // L(s0) = Lambda(s0) / (C^{s0/2} gamma(s0))
  double residual; // the gate value that admitted the series
};

// smoothed approximate functional equation; throws if the residual gate
// (<= 1e-6) fails
AfeResult afe_value(const LSeries& L, double s0);

// Petersson norm (f, f) on Gamma_0(N) via the symmetric square:
// (f, f) = Lambda(1, Sym^2 f) / 2^{2k} (Rankin-Selberg unfolding, N squarefree)
double petersson_norm(const EigenAp& f, i64 n_max = 0);

// independent oracles
double zeta_euler_maclaurin(double s);
double leibniz_l1_chi4();
cplx clgamma(cplx z);

}  // namespace rtf

#endif
