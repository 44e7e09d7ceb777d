#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rtf/lfunc.hpp"
#include "rtf/spectralside.hpp"

using namespace rtf;

namespace {

constexpr double PI = std::numbers::pi;

// Hecke eigenvalues of the level-11 weight-2 form from the Brandt route
const EigenAp& eleven_a(i64 pmax = 420) {
  static EigenAp f = [&] {
    auto X = right_ideal_classes(maximal_order(build_algebra(11), 11));
    std::vector<i64> primes;
    for (i64 p : primes_up_to(pmax))
      if (p != 11) primes.push_back(p);
    auto ed = eigen_decompose(X, primes);
    EigenAp g;
    g.N = 11;
    g.k = 1;
    for (auto& [p, lam] : ed.cusp_forms[0].ap) g.ap[p] = lam;
    return g;
  }();
  return f;
}

EigenAp dummy;

}  // namespace

TEST_CASE("zeta: AFE vs Euler-Maclaurin oracle") {
  CHECK(zeta_euler_maclaurin(2.0) == doctest::Approx(PI * PI / 6.0).epsilon(1e-13));
  auto L = build_lseries(LKind::zeta, dummy, 0, nullptr, nullptr, 60);
  auto r = afe_value(L, 0.5);
  CHECK(r.residual < 1e-8);
  double lam_ref = std::pow(PI, -0.25) * std::tgamma(0.25) * zeta_euler_maclaurin(0.5);
  CHECK(r.completed.real() == doctest::Approx(lam_ref).epsilon(1e-9));
  CHECK(std::abs(r.completed.imag()) < 1e-12);
  CHECK(r.finite.real() == doctest::Approx(zeta_euler_maclaurin(0.5)).epsilon(1e-9));
  auto r2 = afe_value(L, 2.0);
  CHECK(r2.finite.real() == doctest::Approx(PI * PI / 6.0).epsilon(1e-9));
}

TEST_CASE("L(1, chi_{-4}) = pi/4 via AFE and the Leibniz oracle") {
  CHECK(leibniz_l1_chi4() == doctest::Approx(PI / 4.0).epsilon(1e-8));
  auto L = build_lseries(LKind::quad_char, dummy, -4, nullptr, nullptr, 120);
  auto r = afe_value(L, 1.0);
  CHECK(r.residual < 1e-8);
  CHECK(r.finite.real() == doctest::Approx(PI / 4.0).epsilon(1e-9));
  CHECK(r.finite.real() == doctest::Approx(leibniz_l1_chi4()).epsilon(1e-7));
  // completed/finite consistency at the center
  auto rc = afe_value(L, 0.5);
  CHECK(rc.completed.real() ==
        doctest::Approx((rc.finite * gamma_factor(L, 0.5)).real()).epsilon(1e-12));
}

TEST_CASE("level-11 newform: FE-gate resolution and central value") {
  auto& f = eleven_a();
  CHECK(f.ap.at(2) == doctest::Approx(-2.0));
  auto L = build_lseries(LKind::newform, f, 0, nullptr, nullptr, 200);
  CHECK(fe_residual(L) < 1e-8);
  // the resolved Steinberg coefficient: a_11 = +1 (sign +1)
  CHECK(L.coeff[11].real() * std::sqrt(11.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(L.sign == 1.0);
  auto r = afe_value(L, 0.5);
  CHECK(r.finite.real() == doctest::Approx(0.2538418608559).epsilon(1e-7));
  // sanity in the region of absolute convergence
  double direct = 0;
  for (std::size_t n = 1; n < L.coeff.size(); ++n) direct += L.coeff[n].real() * std::pow(n, -2.5);
  CHECK(afe_value(L, 2.5).finite.real() == doctest::Approx(direct).epsilon(1e-3));
  // multiplicativity spot checks
  CHECK(std::abs(L.coeff[6] - L.coeff[2] * L.coeff[3]) < 1e-14);
  CHECK(std::abs(L.coeff[35] - L.coeff[5] * L.coeff[7]) < 1e-14);
}

TEST_CASE("twist by chi_{-4} passes the gate") {
  auto L = build_lseries(LKind::newform_twist, eleven_a(), -4, nullptr, nullptr, 400);
  CHECK(fe_residual(L) < 1e-8);
  auto r = afe_value(L, 0.5);
  CHECK(std::abs(r.finite.imag()) < 1e-10);
  CHECK(r.finite.real() > 0);
  // coefficients vanish on even n (chi_{-4} support)
  CHECK(std::abs(L.coeff[2]) == 0);
  CHECK(std::abs(L.coeff[6]) == 0);
}

TEST_CASE("rankin with trivial Omega factors as f times its twist") {
  auto& f = eleven_a();
  auto E = make_field(-4);
  ClassGroup pic(E);
  auto om = characters(pic)[0];
  auto L4 = build_lseries(LKind::rankin, f, -4, &pic, &om, 400);
  CHECK(L4.conductor == doctest::Approx(1936.0));
  auto Lf = build_lseries(LKind::newform, f, 0, nullptr, nullptr, 400);
  auto Lt = build_lseries(LKind::newform_twist, f, -4, nullptr, nullptr, 400);
  // termwise Dirichlet convolution identity
  for (std::size_t n = 1; n <= 400; ++n) {
    cplx conv = 0;
    for (std::size_t d = 1; d <= n; ++d)
      if (n % d == 0) conv += Lf.coeff[d] * Lt.coeff[n / d];
    CHECK(std::abs(L4.coeff[n] - conv) < 1e-12);
  }
  // central values multiply
  auto v4 = afe_value(L4, 0.5);
  auto vf = afe_value(Lf, 0.5);
  auto vt = afe_value(Lt, 0.5);
  CHECK(v4.finite.real() ==
        doctest::Approx(vf.finite.real() * vt.finite.real()).epsilon(1e-5));
}

TEST_CASE("Petersson norm and the classical average at D=-4, N=11") {
  auto& f = eleven_a();
  double ff = petersson_norm(f);
  CHECK(ff > 0);
  // the plain integral over Gamma_0(11)\H; index-normalized references list
  // this value divided by [SL_2(Z) : Gamma_0(11)] = 12
  CHECK(ff == doctest::Approx(12.0 * 0.00390834565612459).epsilon(1e-6));
  // (u sqrt(d) / (8 pi^2)) L(1,f) L(1, f x chi_{-4}) / (f,f) = 2/5
  auto Lf = build_lseries(LKind::newform, f, 0, nullptr, nullptr, 200);
  auto Lt = build_lseries(LKind::newform_twist, f, -4, nullptr, nullptr, 400);
  double lhs = (2.0 * 2.0 / (8.0 * PI * PI)) * afe_value(Lf, 0.5).finite.real() *
               afe_value(Lt, 0.5).finite.real() / ff;
  CHECK(lhs == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("errors: coefficient gaps and bad inputs") {
  EigenAp sparse;
  sparse.N = 11;
  sparse.k = 1;
  sparse.ap[2] = -2.0;  // everything else missing
  CHECK_THROWS_AS(build_lseries(LKind::newform, sparse, 0, nullptr, nullptr, 100),
                  std::runtime_error);
  CHECK_THROWS_AS(build_lseries(LKind::quad_char, dummy, -5, nullptr, nullptr, 100),
                  std::invalid_argument);  // -5 not fundamental
  CHECK_THROWS_AS(build_lseries(LKind::newform_twist, eleven_a(), -11 * 4, nullptr, nullptr, 100),
                  std::invalid_argument);  // gcd(N, D) != 1
  CHECK_THROWS_AS(build_lseries(LKind::zeta, dummy, 0, nullptr, nullptr, 5),
                  std::invalid_argument);  // n_max too small
}
