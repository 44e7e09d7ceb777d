#include "rtf/heckemeasure.hpp"

#include <cmath>
#include <stdexcept>

namespace rtf {

long double hecke_hat_basis_l(int n, i64 q, long double x) {
  if (n < 0) throw std::invalid_argument("hecke_hat_basis: n >= 0 required");
  if (n == 0) return 1.0L;
  // a_k = q^{ks} + q^{-ks}, b_m = q^{ms} + q^{(m-2)s} + ... + q^{-ms}
  std::vector<long double> a(n + 1);
  a[0] = 2.0L;
  if (n >= 1) a[1] = x;
  for (int k = 2; k <= n; ++k) a[k] = x * a[k - 1] - a[k - 2];
  long double b = 0.0L;  // b_{n-2}
  if (n >= 2) {
    long double b0 = (n % 2 == 0) ? 1.0L : x;  // b with m = n mod 2
    for (int m = (n % 2) + 2; m <= n - 2; m += 2) b0 = a[m] + b0;
    b = b0;
  }
  long double qd = static_cast<long double>(q);
  return std::pow(qd, n / 2.0L) * (a[n] + (1.0L - 1.0L / qd) * b);
}

double hecke_hat_basis(int n, i64 q, double x) {
  return static_cast<double>(hecke_hat_basis_l(n, q, x));
}

cplx hecke_hat(const HeckeElement& f, double x) {
  cplx s = 0;
  for (auto& [n, c] : f.coeff) s += c * hecke_hat_basis(n, f.q, x);
  return s;
}

long double MeasureSpec::factor_l(long double x) const {
  using lc = std::complex<long double>;
  switch (kind) {
    case Kind::sato_tate:
      return 1.0L;
    case Kind::plancherel: {
      long double qd = static_cast<long double>(q);
      long double r = std::sqrt(qd) + 1.0L / std::sqrt(qd);
      return (qd + 1.0L) / (r * r - x * x);
    }
    case Kind::twisted: {
      long double qd = static_cast<long double>(q);
      if (omega.n_cond > 0) return 1.0L;  // local L-factor is 1 for ramified Omega_p
      long double rq = 1.0L / std::sqrt(qd);
      lc z(omega.value_pi_E.real(), omega.value_pi_E.imag());
      switch (omega.type) {
        case SplitType::split: {
          lc l1 = 1.0L - x * z * rq + z * z / qd;
          lc l2 = 1.0L - x / z * rq + 1.0L / (z * z * qd);
          return 1.0L / std::real(l1 * l2);  // product is real for |z| = 1
        }
        case SplitType::inert: {
          long double t = (1.0L + 1.0L / qd);
          return 1.0L / (t * t - x * x / qd);
        }
        case SplitType::ramified: {
          lc l = 1.0L - x * z * rq + 1.0L / qd;
          return 1.0L / std::real(l);  // z = +-1 for a unitary class character
        }
      }
      return 1.0L;
    }
  }
  return 1.0L;
}

double MeasureSpec::factor(double x) const { return static_cast<double>(factor_l(x)); }

double MeasureSpec::density(double x) const {
  return factor(x) * std::sqrt(4.0 - x * x) / (2.0 * M_PI);
}

double MeasureSpec::mass() const {
  switch (kind) {
    case Kind::sato_tate:
    case Kind::plancherel:
      return 1.0;
    case Kind::twisted:
      if (omega.n_cond > 0) return 1.0;
      return local_l_eta(q, omega.type);
  }
  return 1.0;
}

MeasureSpec sato_tate_measure() { return MeasureSpec{MeasureSpec::Kind::sato_tate, 0, {}}; }

MeasureSpec plancherel_measure(i64 q) {
  if (q < 2) throw std::invalid_argument("plancherel_measure: q >= 2");
  return MeasureSpec{MeasureSpec::Kind::plancherel, q, {}};
}

MeasureSpec twisted_measure(i64 p, const LocalOmega& omega) {
  if (p < 2) throw std::invalid_argument("twisted_measure: p >= 2");
  if (omega.n_cond == 0 && std::abs(std::abs(omega.value_pi_E) - 1.0) > 1e-12)
    throw std::invalid_argument("twisted_measure: Omega(pi_E) must be unitary");
  return MeasureSpec{MeasureSpec::Kind::twisted, p, omega};
}

double local_l_eta(i64 q, SplitType type) {
  double qd = static_cast<double>(q);
  switch (type) {
    case SplitType::split:
      return 1.0 / (1.0 - 1.0 / qd);
    case SplitType::inert:
      return 1.0 / (1.0 + 1.0 / qd);
    case SplitType::ramified:
      return 1.0;  // eta_p ramified
  }
  return 1.0;
}

namespace {

using ld = long double;
using lfun = std::function<ld(ld)>;

// Adaptive Simpson on [a, b]; tol is absolute.
ld simpson(const lfun& g, ld a, ld b, ld fa, ld fm, ld fb, ld whole, ld tol, int depth) {
  ld m = 0.5L * (a + b);
  ld lm = 0.5L * (a + m), rm = 0.5L * (m + b);
  ld flm = g(lm), frm = g(rm);
  ld left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
  ld right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
  ld delta = left + right - whole;
  if (std::abs(delta) <= 15.0L * tol || depth > 48) {
    if (depth > 48 && std::abs(delta) > 1e6L * tol)
      throw std::runtime_error("integrate: adaptive quadrature failed to converge");
    return left + right + delta / 15.0L;
  }
  return simpson(g, a, m, fa, flm, fm, left, tol / 2.0L, depth + 1) +
         simpson(g, m, b, fm, frm, fb, right, tol / 2.0L, depth + 1);
}

// integral over theta in [0, pi]; tolerance floored at the rounding level of
// the integrand's magnitude.
ld integrate_theta(const lfun& g, ld tol) {
  ld scale = 0.0L;
  for (int i = 0; i <= 64; ++i) scale = std::max(scale, std::abs(g(M_PIl * i / 64.0L)));
  ld eff = std::max(tol, scale * 1e-18L * M_PIl);
  ld a = 0.0L, b = M_PIl;
  ld fa = g(a), fb = g(b), fm = g(0.5L * (a + b));
  ld whole = (b - a) / 6.0L * (fa + 4.0L * fm + fb);
  return simpson(g, a, b, fa, fm, fb, whole, eff, 0);
}

ld integrate_l(const lfun& f, const MeasureSpec& mu, ld tol) {
  // x = 2 cos(theta): mu_infty -> (2/pi) sin^2(theta) dtheta on [0, pi]
  auto g = [&](ld th) {
    ld x = 2.0L * std::cos(th);
    ld s = std::sin(th);
    return f(x) * mu.factor_l(x) * (2.0L / M_PIl) * s * s;
  };
  return integrate_theta(g, tol);
}

}  // namespace

double integrate(const std::function<double(double)>& f, const MeasureSpec& mu, double tol) {
  return static_cast<double>(
      integrate_l([&](ld x) { return static_cast<ld>(f(static_cast<double>(x))); }, mu, tol));
}

cplx integrate_c(const std::function<cplx(double)>& f, const MeasureSpec& mu, double tol) {
  double re = integrate([&](double x) { return std::real(f(x)); }, mu, tol);
  double im = integrate([&](double x) { return std::imag(f(x)); }, mu, tol);
  return {re, im};
}

double SuiteReport::max_err() const {
  double m = 0;
  for (auto& c : checks) m = std::max(m, c.err());
  return m;
}

SuiteReport plancherel_suite(i64 q, int max_n, double quad_tol) {
  SuiteReport rep;
  MeasureSpec mq = plancherel_measure(q);
  MeasureSpec minf = sato_tate_measure();
  const long double qd = static_cast<long double>(q);
  using lcplx = std::complex<long double>;
  const std::vector<lcplx> deltas{{1, 0}, {-1, 0}, {0, 1}};
  // long-double end-to-end: the basis transforms reach ~q^{max_n/2} in size,
  // and the checks cancel down to O(1), so double-precision integrands would
  // leave noise right at the 1e-10 acceptance line. The quadrature tolerance
  // of a pair check is scaled by its final divisor.
  auto int_re = [&](const lfun& g, const MeasureSpec& mu, long double tol) {
    return static_cast<double>(integrate_l(g, mu, tol));
  };
  auto int_cx = [&](const std::function<lcplx(long double)>& g, const MeasureSpec& mu,
                    long double tol) {
    double re = int_re([&](long double x) { return std::real(g(x)); }, mu, tol);
    double im = int_re([&](long double x) { return std::imag(g(x)); }, mu, tol);
    return cplx(re, im);
  };

  for (int n = 0; n <= max_n; ++n) {
    auto fhat = [&](long double x) { return hecke_hat_basis_l(n, q, x); };
    // f_n(1) = delta_{n,0}
    double lhs0 = (n == 0) ? 1.0 : 0.0;
    rep.checks.push_back(
        {"f" + std::to_string(n) + "(1) = int fhat dmu_q", lhs0, int_re(fhat, mq, quad_tol)});
    // f_n(pi^m), m >= 1
    for (int m = 1; m <= max_n; ++m) {
      long double div = (1.0L + 1.0L / qd) * std::pow(qd, static_cast<long double>(m));
      double lhs = (n == m) ? 1.0 : 0.0;
      double rhs = int_re([&](long double x) { return fhat(x) * hecke_hat_basis_l(m, q, x); },
                          mq, quad_tol * div) /
                   static_cast<double>(div);
      rep.checks.push_back(
          {"f" + std::to_string(n) + "(pi^" + std::to_string(m) + ") via mu_q", lhs, rhs});
    }
    // corollary, first identity, delta in {1,-1,i}
    for (lcplx delta : deltas) {
      cplx lhs = cplx(lhs0) + cplx(delta) * ((n == 1) ? 1.0 : 0.0);
      cplx rhs = int_cx(
                     [&](long double x) {
                       return fhat(x) * (1.0L + std::sqrt(qd) * delta * x + qd);
                     },
                     mq, quad_tol * (qd + 1.0L)) /
                 static_cast<double>(qd + 1.0L);
      rep.checks.push_back({"corollary delta twist, f" + std::to_string(n), lhs, rhs});
    }
    // corollary, second identity
    double lhs2 = lhs0 - ((n == 2) ? 1.0 : 0.0);
    rep.checks.push_back({"f" + std::to_string(n) + "(1) - f(pi^2) = int fhat dmu_infty", lhs2,
                          int_re(fhat, minf, quad_tol)});
    // Lambda_delta
    for (lcplx delta : deltas) {
      cplx lhs = (n == 0) ? cplx(1.0)
                          : cplx(std::pow(delta, n) + std::pow(delta, -n));
      cplx rhs = int_cx(
          [&](long double x) -> lcplx {
            lcplx den1 = 1.0L - delta * x / std::sqrt(qd) + delta * delta / qd;
            lcplx den2 = 1.0L - x / (delta * std::sqrt(qd)) + 1.0L / (delta * delta * qd);
            return fhat(x) * (1.0L - 1.0L / qd) / (den1 * den2);
          },
          minf, quad_tol);
      rep.checks.push_back({"Lambda_delta f" + std::to_string(n), lhs, rhs});
    }
  }
  return rep;
}

cplx i_tilde_coset(const HeckeElement& f, const LocalOmega& omega) {
  if (omega.n_cond > 0) return f.c(0) - f.c(2);
  switch (omega.type) {
    case SplitType::inert:
      return f.c(0);
    case SplitType::ramified:
      return f.c(0) + omega.value_pi_E * f.c(1);
    case SplitType::split: {
      cplx s = f.c(0);
      cplx z = omega.value_pi_E;
      int top = f.coeff.empty() ? 0 : f.coeff.rbegin()->first;
      for (int m = 1; m <= top; ++m) s += (std::pow(z, m) + std::pow(z, -m)) * f.c(m);
      return s;
    }
  }
  return 0;
}

std::pair<cplx, cplx> i_tilde(const HeckeElement& f, const LocalOmega& omega) {
  cplx coset = i_tilde_coset(f, omega);
  MeasureSpec mu = twisted_measure(f.q, omega);
  cplx integral = integrate_c([&](double x) { return hecke_hat(f, x); }, mu);
  if (omega.n_cond == 0) integral /= local_l_eta(f.q, omega.type);
  return {coset, integral};
}

}  // namespace rtf
