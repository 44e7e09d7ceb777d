#include "rtf/geomside.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace rtf {

namespace {

mpz_class binom(long n, long r) {
  if (r < 0 || r > n) return 0;
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(r));
  return out;
}

// class index of the different (sqrt(D) O_E): the unique ideal of norm |D|
std::size_t different_class(const ClassGroup& pic) {
  auto ids = ideals_of_norm(pic, pic.field().d_abs);
  if (ids.size() != 1) throw std::runtime_error("different_class: not unique");
  return ids[0].class_index;
}

bool omega_is_real(const ClassCharacter& omega) {
  for (std::size_t i = 0; i < omega.size(); ++i)
    if (omega.angle(i).second > 2) return false;
  return true;
}

}  // namespace

void validate_geom_config(const GeomConfig& cfg) {
  if (std::abs(cfg.m) >= cfg.k) throw std::invalid_argument("geom: need |m| < k");
  if (cfg.N < 2 || !is_squarefree(cfg.N))
    throw std::invalid_argument("geom: N must be squarefree > 1");
  auto ps = prime_divisors(cfg.N);
  if (ps.size() % 2 == 0)
    throw std::invalid_argument("geom: N needs an odd number of prime factors");
  for (i64 p : ps)
    if (eta(cfg.E, p) != -1)
      throw std::invalid_argument("geom: prime " + std::to_string(p) + " of N not inert in E");
  if (cfg.pic == nullptr || cfg.pic->field().disc != cfg.E.disc)
    throw std::invalid_argument("geom: class group missing or for the wrong field");
  if (cfg.omega.size() != cfg.pic->elements().size())
    throw std::invalid_argument("geom: character size mismatch");
  if (cfg.c_omega != 1) throw std::invalid_argument("geom: ramified Omega unsupported");
}

mpq_class pkm_eval_q(int k, int m, const mpq_class& xi) {
  if (std::abs(m) >= k) throw std::invalid_argument("pkm_eval: need |m| < k");
  if (xi >= 1) throw std::invalid_argument("pkm_eval: need xi < 1");
  mpq_class s = 0, pw = 1;
  for (int i = 0; i <= k - std::abs(m) - 1; ++i) {
    s += mpq_class(binom(k + m - 1, i) * binom(k - m - 1, i)) * pw;
    pw *= -xi;
  }
  mpq_class one_minus = 1 - xi, denom = 1;
  for (int i = 0; i < k - 1; ++i) denom *= one_minus;
  return s / denom;
}

double pkm_eval(int k, int m, double xi) {
  if (std::abs(m) >= k) throw std::invalid_argument("pkm_eval: need |m| < k");
  if (xi >= 1) throw std::invalid_argument("pkm_eval: need xi < 1");
  double s = 0, pw = 1;
  for (int i = 0; i <= k - std::abs(m) - 1; ++i) {
    s += binom(k + m - 1, i).get_d() * binom(k - m - 1, i).get_d() * pw;
    pw *= -xi;
  }
  return s * std::pow(1.0 - xi, 1 - k);
}

i64 fp_support_norm(const GeomConfig& cfg) {
  if (!cfg.fp) return 1;
  int nmax = 0;
  for (auto& [n, c] : cfg.fp->coeff)
    if (std::abs(c) > 0 && n > nmax) nmax = n;
  i64 out = 1;
  for (int i = 0; i < nmax; ++i) out *= cfg.fp->q;
  return out;
}

std::vector<SupportPoint> regular_support(const GeomConfig& cfg) {
  validate_geom_config(cfg);
  const i64 d_eff = cfg.E.d_abs * cfg.c_omega * fp_support_norm(cfg);
  const i64 D = cfg.E.disc;
  std::vector<SupportPoint> out;
  for (i64 n = -cfg.N; n > -d_eff; n -= cfg.N) {
    const i64 b = n + d_eff;  // > 0, so xi = n/b < 0 and the infinite condition holds
    bool ok = true;
    for (i64 p : prime_divisors(cfg.N)) {
      i64 v = valuation(-n, p) - valuation(b, p);
      if (v < 1 || v % 2 == 0) ok = false;
    }
    if (!ok) continue;
    // away from N: xi must be a local norm from E, i.e. (xi, D)_p = 1;
    // xi and n*b lie in the same square class
    const i64 a = n * b;
    for (i64 p : prime_divisors(2 * cfg.E.d_abs * std::abs(a)))
      if (cfg.N % p != 0 && hilbert(a, D, p) != 1) ok = false;
    if (!ok) continue;
    mpq_class xi(n, b);
    xi.canonicalize();
    out.push_back(SupportPoint{n, xi});
  }
  return out;
}

std::vector<RegularTerm> regular_sum(const GeomConfig& cfg) {
  validate_geom_config(cfg);
  const bool plain = !cfg.fp || fp_support_norm(cfg) == 1;
  if (!plain || cfg.c_omega != 1) {
    if (regular_support(cfg).empty()) return {};
    throw std::invalid_argument("regular_sum: only the identity test element is supported");
  }
  const i64 d = cfg.E.d_abs, D = cfg.E.disc, N = cfg.N;
  if (N >= d) return {};  // stability range
  if (d % 2 == 0)
    throw std::invalid_argument("regular_sum: E ramified at 2 is unsupported");
  const ClassGroup& pic = *cfg.pic;
  const std::size_t diff_inv = pic.index_of(pic.inverse(pic.elements()[different_class(pic)]));
  const bool exact = omega_is_real(cfg.omega);

  std::vector<RegularTerm> out;
  for (i64 n = -N; n > -d; n -= N) {
    const i64 b = n + d;  // > 0
    bool ok = true;
    // 1 + d/n = b/n must be a local norm at the ramified primes
    for (i64 p : prime_divisors(d))
      if (hilbert(n * b, D, p) != 1) ok = false;
    if (!ok) continue;
    RegularTerm t;
    t.n = n;
    const i64 r1 = static_cast<i64>(ideals_of_norm(pic, -n / N).size());
    const i64 sg = sigma_common_divisors(d, b);
    auto ids = ideals_of_norm(pic, b);
    mpq_class pref(4 * r1 * sg, d);
    pref.canonicalize();
    if (exact) {
      mpq_class s = 0;
      for (auto& id : ids) {
        auto ang = cfg.omega.angle(
            pic.index_of(pic.compose(pic.elements()[diff_inv], pic.elements()[id.class_index])));
        s += (ang.first == 0) ? 1 : -1;
      }
      t.value_q = pref * s * pkm_eval_q(cfg.k, cfg.m, mpq_class(mpq_class(n) / b));
      t.exact = true;
      t.value = t.value_q.get_d();
    } else {
      cplx s = 0;
      for (auto& id : ids)
        s += cfg.omega.value(
            pic.index_of(pic.compose(pic.elements()[diff_inv], pic.elements()[id.class_index])));
      t.value = pref.get_d() * s *
                pkm_eval(cfg.k, cfg.m, static_cast<double>(n) / static_cast<double>(b));
    }
    out.push_back(std::move(t));
  }
  return out;
}

double irregular_terms(const GeomConfig& cfg, cplx fp_transform) {
  validate_geom_config(cfg);
  const double d = static_cast<double>(cfg.E.d_abs);
  const double l1 = static_cast<double>(cfg.pic->h()) / (cfg.E.u * std::sqrt(d));
  // the partial Euler product over S(Omega) is empty (= 1) for an unramified
  // Omega, so only one completed L(1, eta) = h/(u sqrt d) survives; the
  // delta(N) correction vanishes since N > 1
  const double c = 4.0 * l1 / std::sqrt(static_cast<double>(cfg.c_omega) * d);
  cplx v = c * fp_transform;
  if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v)))
    throw std::runtime_error("irregular_terms: non-real value");
  return v.real();
}

GeomReport geometric_total(const GeomConfig& cfg) {
  validate_geom_config(cfg);
  cplx itilde = 1.0;
  if (cfg.fp) {
    LocalOmega lo;
    lo.n_cond = 0;
    int e = eta(cfg.E, cfg.fp->q);
    lo.type = e == 1 ? SplitType::split : (e == -1 ? SplitType::inert : SplitType::ramified);
    lo.value_pi_E = 1.0;
    if (e != -1) {
      auto ids = ideals_of_norm(*cfg.pic, cfg.fp->q);
      if (ids.empty()) throw std::runtime_error("geometric_total: no prime above q");
      lo.value_pi_E = cfg.omega.value(ids[0].class_index);
    }
    itilde = i_tilde_coset(*cfg.fp, lo);
  }
  GeomReport rep;
  rep.irregular = irregular_terms(cfg, itilde);
  rep.regular = regular_sum(cfg);
  cplx tot = rep.irregular;
  for (auto& t : rep.regular) tot += t.value;
  if (std::abs(tot.imag()) > 1e-9 * std::max(1.0, std::abs(tot)))
    throw std::runtime_error("geometric_total: non-real total");
  rep.total = tot.real();
  return rep;
}

}  // namespace rtf
