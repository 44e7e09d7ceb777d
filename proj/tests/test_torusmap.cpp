#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "rtf/torusmap.hpp"

using namespace rtf;

namespace {

// right ideal aR for the primitive ideal [a0, (-b0 + sqrt D)/2]
QLattice ideal_lattice(const ClassSet& X, const Embedding& emb, i64 a0, i64 b0) {
  const QuatAlgebra& A = X.order.alg;
  Quat w = emb.y;
  for (int j = 0; j < 4; ++j) w[j] *= 2;
  w[0] -= emb.t;
  Quat u{mpq_class(-b0) / 2, 0, 0, 0};
  for (int j = 0; j < 4; ++j) u[j] += w[j] / 2;
  std::vector<Quat> rows;
  for (auto& g : X.order.lat.basis) {
    Quat ag;
    for (int j = 0; j < 4; ++j) ag[j] = mpq_class(a0) * g[j];
    rows.push_back(ag);
    rows.push_back(A.mul(u, g));
  }
  return qlat_from_rows(rows);
}

}  // namespace

TEST_CASE("optimal embeddings exist with the right minimal polynomial") {
  // D=-3, N=2: sixth root of unity in the Hurwitz order
  auto R2 = maximal_order(build_algebra(2), 2);
  auto E3 = make_field(-3);
  auto emb3 = optimal_embedding(R2, E3);
  CHECK(emb3.t == 1);
  CHECK(emb3.n == 1);
  CHECK(R2.alg.trd(emb3.y) == 1);
  CHECK(R2.alg.nrd(emb3.y) == 1);
  CHECK(qlat_contains(R2.lat, emb3.y));

  // D=-4, N=11: y with t=0, n=1
  auto R11 = maximal_order(build_algebra(11), 11);
  auto E4 = make_field(-4);
  auto emb4 = optimal_embedding(R11, E4);
  CHECK(emb4.t == 0);
  CHECK(emb4.n == 1);
  CHECK(qlat_contains(R11.lat, emb4.y));
  // 2y - t squares to D
  Quat w = emb4.y;
  for (int j = 0; j < 4; ++j) w[j] *= 2;
  Quat w2 = R11.alg.mul(w, w);
  CHECK(w2[0] == -4);
  CHECK(w2[1] == 0);
  CHECK(w2[2] == 0);
  CHECK(w2[3] == 0);

  // split prime in the level -> precondition error (-7 splits at 2)
  CHECK_THROWS_AS(optimal_embedding(R2, make_field(-7)), std::invalid_argument);
}

TEST_CASE("iota map basics") {
  // D=-4, N=11: h=1, principal class maps to the class of R
  auto [R, emb] = find_embedded_order(maximal_order(build_algebra(11), 11), make_field(-4));
  auto X = right_ideal_classes(R);
  ClassGroup pic(make_field(-4));
  auto pd = iota_map(emb, pic, X);
  REQUIRE(pd.iota.size() == 1);
  CHECK(pd.iota[0] == 0);  // principal ideal class -> class of R itself
  CHECK(pd.x_count == X.reps.size());
}

TEST_CASE("iota injective in the stable range and periods") {
  // D=-23 (h=3), N=37 (inert, 37 > 23): iota should be injective
  auto E = make_field(-23);
  CHECK(eta(E, 37) == -1);
  auto [R, emb] = find_embedded_order(maximal_order(build_algebra(37), 37), E);
  auto X = right_ideal_classes(R);
  ClassGroup pic(E);
  auto pd = iota_map(emb, pic, X);
  REQUIRE(pd.iota.size() == 3);
  std::set<std::size_t> img(pd.iota.begin(), pd.iota.end());
  CHECK(img.size() == 3);  // injective
  CHECK(pd.iota[pic.index_of(pic.identity())] == 0);

  auto chars = characters(pic);
  REQUIRE(chars.size() == 3);
  for (auto& om : chars) {
    auto P = period_vector(pd, om);
    cplx total = 0;
    for (auto& p : P) total += p;
    if (om.trivial()) {
      CHECK(std::abs(total - cplx(3.0)) < 1e-12);
      // injective + trivial character: 0/1 vector with h ones
      i64 ones = 0;
      for (auto& p : P) {
        CHECK((std::abs(p) < 1e-12 || std::abs(p - cplx(1.0)) < 1e-12));
        if (std::abs(p - cplx(1.0)) < 1e-12) ++ones;
      }
      CHECK(ones == 3);
    } else {
      CHECK(std::abs(total) < 1e-12);
    }
  }
}

TEST_CASE("iota is representative-independent") {
  auto E = make_field(-23);
  auto [R, emb] = find_embedded_order(maximal_order(build_algebra(37), 37), E);
  auto X = right_ideal_classes(R);
  ClassGroup pic(E);
  const QuatAlgebra& A = X.order.alg;
  i64 ND = 37 * 23;
  // for each class, collect two distinct primitive coprime representatives
  for (std::size_t c = 0; c < pic.elements().size(); ++c) {
    std::vector<std::pair<i64, i64>> reps;
    for (i64 n = 1; n < 200 && reps.size() < 2; ++n) {
      if (std::gcd(n, ND) != 1) continue;
      for (auto& id : ideals_of_norm(pic, n)) {
        if (id.m != 1 || id.class_index != c) continue;
        if (!reps.empty() && reps.back().first == id.a0 && reps.back().second == id.b0) continue;
        reps.emplace_back(id.a0, id.b0);
        if (reps.size() == 2) break;
      }
    }
    REQUIRE(reps.size() == 2);
    QLattice J1 = ideal_lattice(X, emb, reps[0].first, reps[0].second);
    QLattice J2 = ideal_lattice(X, emb, reps[1].first, reps[1].second);
    CHECK(ideals_equivalent(A, J1, J2, X.order.lat));
  }
}

TEST_CASE("double-coset identity for the period norm") {
  // sum_x |P_x|^2 / w_x = sum over pairs with iota(y1)=iota(y2) of
  // Omega(y1 y2^{-1}) / w_{iota(y1)}
  auto E = make_field(-23);
  auto [R, emb] = find_embedded_order(maximal_order(build_algebra(37), 37), E);
  auto X = right_ideal_classes(R);
  ClassGroup pic(E);
  auto pd = iota_map(emb, pic, X);
  for (auto& om : characters(pic)) {
    auto P = period_vector(pd, om);
    cplx lhs = 0;
    for (std::size_t x = 0; x < P.size(); ++x)
      lhs += P[x] * std::conj(P[x]) / static_cast<double>(X.weights[x]);
    cplx rhs = 0;
    auto& els = pic.elements();
    for (std::size_t y1 = 0; y1 < els.size(); ++y1)
      for (std::size_t y2 = 0; y2 < els.size(); ++y2) {
        if (pd.iota[y1] != pd.iota[y2]) continue;
        auto cls = pic.compose(els[y1], pic.inverse(els[y2]));
        rhs += om.value(pic.index_of(cls)) / static_cast<double>(X.weights[pd.iota[y1]]);
      }
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}
