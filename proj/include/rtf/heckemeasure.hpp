#ifndef RTF_HECKEMEASURE_HPP
#define RTF_HECKEMEASURE_HPP

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rtf/arith.hpp"

namespace rtf {

using cplx = std::complex<double>;

// Element sum c_n f_n of the spherical Hecke algebra of PGL(2) over a local
// field with residue cardinality q; f_n = characteristic function of the
// double coset of diag(pi^n, 1).
struct HeckeElement {
  i64 q = 2;
  std::map<int, cplx> coeff;

  static HeckeElement identity(i64 q) { return HeckeElement{q, {{0, 1.0}}}; }
  static HeckeElement basis(int n, i64 q) { return HeckeElement{q, {{n, 1.0}}}; }
  cplx c(int n) const {
    auto it = coeff.find(n);
    return it == coeff.end() ? cplx(0.0) : it->second;
  }
};

// Spherical transform of f_n at x = q^s + q^{-s} in [-2,2]; polynomial of
// degree n in x, evaluated by the Chebyshev-type recursion.
double hecke_hat_basis(int n, i64 q, double x);
cplx hecke_hat(const HeckeElement& f, double x);

enum class SplitType { split, inert, ramified };

// Local data of Omega at p: its conductor exponent and, when unramified, the
// unit value Omega(pi_{E_p}).
struct LocalOmega {
  SplitType type = SplitType::inert;
  int n_cond = 0;
  cplx value_pi_E = 1.0;
};

// Measures on [-2,2]: every measure here is (smooth factor) * Sato-Tate.
struct MeasureSpec {
  enum class Kind { sato_tate, plancherel, twisted } kind = Kind::sato_tate;
  i64 q = 0;                 // residue cardinality for plancherel/twisted
  LocalOmega omega;          // for twisted
  double factor(double x) const;   // density relative to mu_infty
  long double factor_l(long double x) const;
  double density(double x) const;  // absolute density on (-2,2)
  double mass() const;             // closed-form total mass
};

MeasureSpec sato_tate_measure();
MeasureSpec plancherel_measure(i64 q);
MeasureSpec twisted_measure(i64 p, const LocalOmega& omega);

// Adaptive quadrature of f against mu over [-2,2] (theta substitution kills
// the endpoint square roots); absolute error target tol.
double integrate(const std::function<double(double)>& f, const MeasureSpec& mu, double tol = 1e-13);
cplx integrate_c(const std::function<cplx(double)>& f, const MeasureSpec& mu, double tol = 1e-13);

struct IdentityCheck {
  std::string name;
  cplx lhs = 0, rhs = 0;
  double err() const { return std::abs(lhs - rhs); }
};

struct SuiteReport {
  std::vector<IdentityCheck> checks;
  double max_err() const;
  bool pass(double tol) const { return max_err() <= tol; }
};

// Plancherel / corollary / Lambda_delta identities for f_n, n, m <= max_n,
// delta in {1, -1, i}.
SuiteReport plancherel_suite(i64 q, int max_n = 10, double quad_tol = 1e-13);

// The local distribution I~ computed two independent ways: the explicit coset
// sums and the integral of f-hat against the twisted measure (divided by
// L(1, eta_p) when Omega_p is unramified). Returns (coset, integral).
std::pair<cplx, cplx> i_tilde(const HeckeElement& f, const LocalOmega& omega);

// Coset-route value alone (exact finite sum).
cplx i_tilde_coset(const HeckeElement& f, const LocalOmega& omega);

// L(1, eta_p) for the local quadratic character attached to E_p/Q_p.
double local_l_eta(i64 q, SplitType type);

}  // namespace rtf

#endif
