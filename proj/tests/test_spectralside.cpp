#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rtf/geomside.hpp"
#include "rtf/spectralside.hpp"

using namespace rtf;

namespace {

ClassSet class_set(i64 N) { return right_ideal_classes(maximal_order(build_algebra(N), N)); }

}  // namespace

TEST_CASE("eigen decomposition labels the Eisenstein line and cusp forms") {
  // N=2: one class, no cusp forms
  auto X2 = class_set(2);
  auto ed2 = eigen_decompose(X2);
  CHECK(ed2.cusp_forms.empty());
  REQUIRE(ed2.eisenstein.size() == 1);

  // N=11: one cusp form with a_2 = -2, a_3 = -1
  auto X11 = class_set(11);
  auto ed = eigen_decompose(X11, {2, 3});
  REQUIRE(ed.cusp_forms.size() == 1);
  CHECK(ed.cusp_forms[0].ap.at(2) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(ed.cusp_forms[0].ap.at(3) == doctest::Approx(-1.0).epsilon(1e-12));
  // Eisenstein function is constant
  REQUIRE(ed.eisenstein.size() == 2);
  CHECK(ed.eisenstein[0] == doctest::Approx(ed.eisenstein[1]).epsilon(1e-12));
  // normalized and orthogonal in the mass inner product sum u v / w
  double ip = 0, nrm = 0;
  for (std::size_t x = 0; x < 2; ++x) {
    ip += ed.eisenstein[x] * ed.cusp_forms[0].phi[x] / X11.weights[x];
    nrm += ed.eisenstein[x] * ed.eisenstein[x] / X11.weights[x];
  }
  CHECK(std::abs(ip) < 1e-10);
  CHECK(nrm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("irrational eigenvalue pair at N=23 splits correctly") {
  auto X = class_set(23);
  auto ed = eigen_decompose(X, {2});
  REQUIRE(ed.cusp_forms.size() == 2);
  double a = ed.cusp_forms[0].ap.at(2), b = ed.cusp_forms[1].ap.at(2);
  // x^2 + x - 1 = 0: the two conjugate a_2 values of the level-23 newforms
  CHECK(a + b == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(a * b == doctest::Approx(-1.0).epsilon(1e-9));
  for (auto& f : ed.cusp_forms)
    for (auto& [p, lam] : f.ap) CHECK(std::abs(lam) <= 2 * std::sqrt(double(p)) + 1e-9);
}

TEST_CASE("spectral average routes agree and match by-hand values") {
  // N=5, D=-3: single class, cusp space empty
  {
    auto X = class_set(5);
    auto E = make_field(-3);
    auto [R, emb] = find_embedded_order(X.order, E);
    auto Xr = right_ideal_classes(R);
    ClassGroup pic(E);
    auto pd = iota_map(emb, pic, Xr);
    auto rep = spectral_average(Xr, pd, characters(pic)[0], E);
    CHECK(rep.raw_period_sum == doctest::Approx(0.0));
    CHECK(rep.eisenstein_correction > 0);
    CHECK(rep.eigen_route == doctest::Approx(rep.delta_route).epsilon(1e-10));
  }
  // N=11, D=-4: positive cusp contribution
  {
    auto E = make_field(-4);
    auto [R, emb] = find_embedded_order(maximal_order(build_algebra(11), 11), E);
    auto X = right_ideal_classes(R);
    ClassGroup pic(E);
    auto pd = iota_map(emb, pic, X);
    auto rep = spectral_average(X, pd, characters(pic)[0], E);
    CHECK(rep.raw_period_sum > 0);
    CHECK(rep.eigen_route == doctest::Approx(rep.delta_route).epsilon(1e-10));
    for (double s : rep.summands) CHECK(s >= 0);
    // delta route by hand: the single ideal class lands on one class x0
    double by_hand = static_cast<double>(X.weights[pd.iota[0]]);
    CHECK(rep.delta_route == doctest::Approx(by_hand).epsilon(1e-12));
  }
}

TEST_CASE("nontrivial character with injective iota: delta route = sum w") {
  auto E = make_field(-23);
  auto [R, emb] = find_embedded_order(maximal_order(build_algebra(37), 37), E);
  auto X = right_ideal_classes(R);
  ClassGroup pic(E);
  auto pd = iota_map(emb, pic, X);
  for (auto& om : characters(pic)) {
    auto rep = spectral_average(X, pd, om, E);
    double expect = 0;
    for (std::size_t y = 0; y < pd.iota.size(); ++y) expect += static_cast<double>(X.weights[pd.iota[y]]);
    CHECK(rep.delta_route == doctest::Approx(expect).epsilon(1e-12));
    CHECK(rep.eigen_route == doctest::Approx(rep.delta_route).epsilon(1e-10));
  }
}

TEST_CASE("Hecke weights: identity neutral, linear in the transform") {
  auto E = make_field(-4);
  auto [R, emb] = find_embedded_order(maximal_order(build_algebra(11), 11), E);
  auto X = right_ideal_classes(R);
  ClassGroup pic(E);
  auto pd = iota_map(emb, pic, X);
  auto om = characters(pic)[0];
  auto plain = spectral_average(X, pd, om, E);
  auto id = spectral_average(X, pd, om, E, HeckeElement::identity(3));
  CHECK(id.raw_period_sum == doctest::Approx(plain.raw_period_sum).epsilon(1e-12));
  // alpha f_1 + beta f_0
  HeckeElement f1 = HeckeElement::basis(1, 3);
  HeckeElement mix{3, {{0, 0.25}, {1, 2.0}}};
  auto r1 = spectral_average(X, pd, om, E, f1);
  auto rm = spectral_average(X, pd, om, E, mix);
  CHECK(rm.raw_period_sum ==
        doctest::Approx(2.0 * r1.raw_period_sum + 0.25 * plain.raw_period_sum).epsilon(1e-10));
  CHECK(rm.eisenstein_correction ==
        doctest::Approx(2.0 * r1.eisenstein_correction + 0.25 * plain.eisenstein_correction)
            .epsilon(1e-10));
}

TEST_CASE("Waldspurger constant assembly") {
  auto E = make_field(-4);
  ClassGroup pic(E);
  auto om = characters(pic)[0];
  // k=1, m=0, D=-4, N=11: pi/6 * 1/(2*2) * (10/11) * Gamma(2)/pi = 5/132
  double v = waldspurger_constant(11, E, om, 1, 0);
  CHECK(v == doctest::Approx((1.0 / 6) * (1.0 / 4) * (10.0 / 11)).epsilon(1e-13));
  CHECK(v > 0);
  // changing the level only changes the local product
  auto E3 = make_field(-3);
  ClassGroup pic3(E3);
  auto om3 = characters(pic3)[0];
  double a = waldspurger_constant(11, E3, om3, 1, 0);
  double b = waldspurger_constant(13, E3, om3, 1, 0);
  CHECK(a / b == doctest::Approx((1 - 1.0 / 11) / (1 - 1.0 / 13)).epsilon(1e-13));
  // Petersson conversion factor 2^{2k}/N
  CHECK(waldspurger_constant(11, E, om, 1, 0, true) ==
        doctest::Approx(v * 4.0 / 11).epsilon(1e-13));
}

TEST_CASE("spectral total matches the geometric side") {
  // the full distribution identity I(f): the spectral sum, scaled by the
  // period dictionary constant 4 L(1,eta)^2 / h^2, equals the geometric total
  auto run = [](i64 N, i64 D) {
    auto E = make_field(D);
    auto [R, emb] = find_embedded_order(maximal_order(build_algebra(N), N), E);
    auto X = right_ideal_classes(R);
    ClassGroup pic(E);
    auto pd = iota_map(emb, pic, X);
    auto om = characters(pic)[0];
    auto rep = spectral_average(X, pd, om, E);
    double h = static_cast<double>(pic.h());
    double l1 = h / (E.u * std::sqrt(static_cast<double>(E.d_abs)));
    double spec = (4.0 * l1 * l1 / (h * h)) * (rep.raw_period_sum + rep.eisenstein_correction);
    GeomConfig cfg;
    cfg.N = N;
    cfg.E = E;
    cfg.pic = &pic;
    cfg.omega = om;
    auto geo = geometric_total(cfg);
    CHECK(spec == doctest::Approx(geo.total).epsilon(1e-10));
    return spec;
  };
  CHECK(run(11, -4) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(run(5, -3) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("residual term") {
  auto E = make_field(-4);
  ClassGroup pic(E);
  auto chars = characters(pic);
  CHECK(residual_term(2, chars[0], HeckeElement::identity(3), E) == 0.0);
  CHECK(residual_term(1, chars[0], HeckeElement::identity(3), E) == doctest::Approx(1.0));
  // T_p: fhat_1(x) = sqrt(p) x, at x = sqrt(p)+1/sqrt(p) gives p+1
  CHECK(residual_term(1, chars[0], HeckeElement::basis(1, 7), E) == doctest::Approx(8.0));
  // nontrivial character kills it
  ClassGroup pic23(make_field(-23));
  auto c23 = characters(pic23);
  CHECK(residual_term(1, c23[1], HeckeElement::identity(3), make_field(-23)) == 0.0);
}
