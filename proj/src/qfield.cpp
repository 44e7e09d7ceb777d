#include "rtf/qfield.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rtf {

bool is_fundamental_discriminant(i64 D) {
  if (D >= 0) return false;
  i64 r = ((D % 4) + 4) % 4;
  if (r == 1) return is_squarefree(-D);
  if (r == 0) {
    i64 m = D / 4;
    i64 mr = ((m % 4) + 4) % 4;
    return (mr == 2 || mr == 3) && is_squarefree(-m);
  }
  return false;
}

QuadField make_field(i64 D) {
  if (!is_fundamental_discriminant(D))
    throw std::invalid_argument("make_field: D must be a negative fundamental discriminant, got " +
                                std::to_string(D));
  QuadField f;
  f.disc = D;
  f.d_abs = -D;
  f.u = (D == -3) ? 3 : (D == -4 ? 2 : 1);
  f.omega_trace = D;
  f.omega_norm = (D * D - D) / 4;
  return f;
}

IdealClass reduce_form(i64 a, i64 b, i64 c) {
  if (a <= 0 || b * b - 4 * a * c >= 0) throw std::invalid_argument("reduce_form: not positive definite");
  while (true) {
    // normalize b into (-a, a]
    if (b > a || b <= -a) {
      i64 r = ((b + a) % (2 * a) + 2 * a) % (2 * a) - a;  // r in (-a, a]
      c += (r * r - b * b) / (4 * a);
      b = r;
    }
    if (a > c) {
      std::swap(a, c);
      b = -b;
      continue;
    }
    break;
  }
  if ((a == c || a == -b) && b < 0) b = -b;
  return IdealClass{a, b, c};
}

ClassGroup::ClassGroup(const QuadField& field) : field_(field) {
  const i64 D = field_.disc;
  for (i64 a = 1; 3 * a * a <= -D; ++a) {
    for (i64 b = -a + 1; b <= a; ++b) {
      if (((b - D) % 2 + 2) % 2 != 0) continue;
      i64 num = b * b - D;
      if (num % (4 * a) != 0) continue;
      i64 c = num / (4 * a);
      if (c < a) continue;
      if (b < 0 && a == c) continue;
      if (std::gcd(std::gcd(a, b), c) != 1) continue;
      elements_.push_back(IdealClass{a, b, c});
    }
  }
  std::sort(elements_.begin(), elements_.end());
}

std::size_t ClassGroup::index_of(const IdealClass& f) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), f);
  if (it == elements_.end() || *it != f) throw std::logic_error("index_of: not a reduced form of this group");
  return static_cast<std::size_t>(it - elements_.begin());
}

IdealClass ClassGroup::identity() const {
  const i64 D = field_.disc;
  if (((D % 2) + 2) % 2 == 0) return IdealClass{1, 0, -D / 4};
  return IdealClass{1, 1, (1 - D) / 4};
}

IdealClass ClassGroup::inverse(const IdealClass& f) const {
  return reduce_form(f.a, -f.b, f.c);
}

IdealClass ClassGroup::compose(const IdealClass& f, const IdealClass& g) const {
  // Multiply the ideals [a, B + w] with B = (-b - D)/2, w = (D + sqrt D)/2,
  // w^2 = D*w - (D^2 - D)/4, and read the class off the primitive part of the
  // product's Hermite basis.
  const i64 D = field_.disc;
  mpz_class B1 = (-f.b - D) / 2, B2 = (-g.b - D) / 2;
  mpz_class a1 = f.a, a2 = g.a;
  mpz_class wnorm = mpz_class(D) * D;
  wnorm = (wnorm - D) / 4;
  // rows are (omega-coefficient, rational coefficient)
  std::vector<std::vector<mpz_class>> rows = {
      {0, a1 * a2},
      {a1, a1 * B2},
      {a2, a2 * B1},
      {B1 + B2 + D, B1 * B2 - wnorm},
  };
  rows = hnf_rows(std::move(rows));
  if (rows.size() != 2 || rows[1][0] != 0)
    throw std::logic_error("compose: bad product lattice");
  mpz_class s = rows[0][0], t = rows[0][1], a = rows[1][1];
  if (a % s != 0 || t % s != 0) throw std::logic_error("compose: non-invertible product");
  mpz_class A = a / s, T = t / s;
  // [A, T + w] is the primitive part; its form has b = -2T - D
  mpz_class bb = -2 * T - D;
  mpz_class cc = (bb * bb - D);
  if (cc % (4 * A) != 0) throw std::logic_error("compose: product is not an ideal basis");
  cc /= 4 * A;
  IdealClass r = reduce_form(A.get_si(), bb.get_si(), cc.get_si());
  return r;
}

void ClassGroup::decompose() const {
  if (decomposed_) return;
  const std::size_t h = elements_.size();
  // Greedy generating set; expv holds one exponent vector per spanned element.
  std::vector<std::size_t> gens;
  std::vector<char> in_span(h, 0);
  std::vector<std::vector<i64>> expv(h);
  std::vector<std::size_t> span{index_of(identity())};
  in_span[span[0]] = 1;
  while (span.size() < h) {
    std::size_t g = 0;
    while (in_span[g]) ++g;
    gens.push_back(g);
    // order of g in the full group
    i64 order = 1;
    IdealClass gp = elements_[g];
    while (gp != identity()) gp = compose(gp, elements_[g]), ++order;
    // new span = { s * g^t : s in old span, 0 <= t < order }
    std::vector<std::size_t> old_span = span;
    gp = identity();
    for (i64 t = 1; t < order; ++t) {
      gp = compose(gp, elements_[g]);
      for (std::size_t s : old_span) {
        IdealClass prod = compose(elements_[s], gp);
        std::size_t pi = index_of(prod);
        if (!in_span[pi]) {
          in_span[pi] = 1;
          span.push_back(pi);
          expv[pi] = expv[s];
          expv[pi].resize(gens.size() - 1, 0);
          expv[pi].push_back(t);
        }
      }
    }
    for (std::size_t s : span) expv[s].resize(gens.size(), 0);
  }
  const std::size_t r = gens.size();
  // relation lattice of the surjection Z^r -> G
  std::vector<std::vector<mpz_class>> rel;
  for (std::size_t x = 0; x < h; ++x) {
    for (std::size_t y = 0; y < h; ++y) {
      IdealClass prod = compose(elements_[x], elements_[y]);
      std::size_t pi = index_of(prod);
      std::vector<mpz_class> row(r);
      for (std::size_t j = 0; j < r; ++j)
        row[j] = expv[x][j] + expv[y][j] - expv[pi][j];
      rel.push_back(std::move(row));
    }
  }
  if (r == 0) {
    cyclic_.clear();
    dlog_.assign(h, {});
    decomposed_ = true;
    return;
  }
  SmithResult snf = smith_normal_form(std::move(rel), r);
  // keep nontrivial factors; their generators as group elements
  std::vector<i64> orders;
  std::vector<std::size_t> factor_gens;
  for (std::size_t j = 0; j < r; ++j) {
    i64 d = snf.diag[j].get_si();
    if (d == 1) continue;
    if (d == 0) throw std::logic_error("class group decomposition: infinite factor");
    orders.push_back(d);
    IdealClass gj = identity();
    for (std::size_t i = 0; i < r; ++i) {
      i64 e = snf.gens[j][i].get_si();
      i64 em = ((e % d) + d) % d;  // exponent mod group exponent is enough
      IdealClass base = elements_[gens[i]];
      for (i64 t = 0; t < em; ++t) gj = compose(gj, base);
    }
    factor_gens.push_back(index_of(gj));
  }
  // dlog table by enumerating the direct product
  dlog_.assign(h, {});
  std::vector<i64> tup(orders.size(), 0);
  i64 total = 1;
  for (i64 d : orders) total *= d;
  if (total != static_cast<i64>(h)) throw std::logic_error("class group decomposition: order mismatch");
  IdealClass cursor = identity();
  std::vector<char> seen(h, 0);
  for (i64 count = 0; count < total; ++count) {
    std::size_t ci = index_of(cursor);
    if (seen[ci]) throw std::logic_error("class group decomposition: not a direct sum");
    seen[ci] = 1;
    dlog_[ci] = tup;
    // increment tuple and cursor
    for (std::size_t j = 0; j < orders.size(); ++j) {
      cursor = compose(cursor, elements_[factor_gens[j]]);
      if (++tup[j] < orders[j]) break;
      // wrapped: cursor multiplied by g_j^{orders[j]} == identity net effect
      tup[j] = 0;
    }
  }
  cyclic_ = std::move(orders);
  decomposed_ = true;
}

const std::vector<i64>& ClassGroup::cyclic_orders() const {
  decompose();
  return cyclic_;
}

const std::vector<std::vector<i64>>& ClassGroup::dlog_table() const {
  decompose();
  return dlog_;
}

ClassCharacter::ClassCharacter(std::vector<std::pair<i64, i64>> angles, int m, i64 c)
    : weight_m(m), conductor_c(c), angles_(std::move(angles)) {
  for (auto& [num, den] : angles_) {
    i64 g = std::gcd(((num % den) + den) % den, den);
    num = (((num % den) + den) % den);
    if (g > 1) num /= g, den /= g;
    if (num == 0) den = 1;
  }
}

std::complex<double> ClassCharacter::value(std::size_t i) const {
  auto [num, den] = angles_[i];
  double t = 2.0 * M_PI * static_cast<double>(num) / static_cast<double>(den);
  return {std::cos(t), std::sin(t)};
}

bool ClassCharacter::trivial() const {
  for (auto& [num, den] : angles_)
    if (num != 0) return false;
  return true;
}

i64 ClassCharacter::order() const {
  i64 l = 1;
  for (auto& [num, den] : angles_) l = std::lcm(l, den);
  return l;
}

std::vector<ClassCharacter> characters(const ClassGroup& group) {
  const auto& orders = group.cyclic_orders();
  const auto& dlog = group.dlog_table();
  const std::size_t h = group.elements().size();
  std::vector<ClassCharacter> out;
  std::vector<i64> k(orders.size(), 0);
  i64 total = group.h();
  for (i64 count = 0; count < total; ++count) {
    std::vector<std::pair<i64, i64>> angles(h);
    for (std::size_t x = 0; x < h; ++x) {
      // angle = sum_j k_j * t_j / d_j mod 1
      i64 den = 1;
      for (i64 d : orders) den = std::lcm(den, d);
      i64 num = 0;
      for (std::size_t j = 0; j < orders.size(); ++j)
        num += (den / orders[j]) * ((k[j] * dlog[x][j]) % orders[j]);
      angles[x] = {((num % den) + den) % den, den};
    }
    out.emplace_back(std::move(angles), 0, 1);
    for (std::size_t j = 0; j < k.size(); ++j) {
      if (++k[j] < orders[j]) break;
      k[j] = 0;
    }
  }
  // trivial character first
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].trivial() && i != 0) std::swap(out[0], out[i]);
  return out;
}

std::vector<IdealOfNorm> ideals_of_norm(const ClassGroup& group, i64 n) {
  if (n < 1) throw std::invalid_argument("ideals_of_norm: n must be positive");
  const i64 D = group.field().disc;
  std::vector<IdealOfNorm> out;
  for (i64 m = 1; m * m <= n; ++m) {
    if (n % (m * m) != 0) continue;
    i64 a0 = n / (m * m);
    // primitive ideals of norm a0: b mod 2*a0 with b^2 = D mod 4*a0
    for (i64 b = (D % 2 == 0 ? 0 : 1); b < 2 * a0; b += 2) {
      mpz_class num = mpz_class(b) * b - D;
      if (num % (4 * a0) != 0) continue;
      mpz_class c = num / (4 * a0);
      IdealClass cls = reduce_form(a0, b, c.get_si());
      out.push_back(IdealOfNorm{a0, b, m, group.index_of(cls)});
    }
  }
  return out;
}

int eta(const QuadField& field, i64 n) {
  if (n == 0) throw std::invalid_argument("eta(0)");
  return kronecker(field.disc, n);
}

i64 sigma_common_divisors(i64 a, i64 b) {
  if (a < 1 || b < 1) throw std::invalid_argument("sigma_common_divisors: positive arguments required");
  return static_cast<i64>(divisors(std::gcd(a, b)).size());
}

std::vector<std::complex<double>> theta_coefficients(const ClassGroup& group,
                                                     const ClassCharacter& omega, i64 n_max) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (i64 n = 1; n <= n_max; ++n)
    for (const auto& ideal : ideals_of_norm(group, n)) out[n] += omega.value(ideal.class_index);
  return out;
}

double analytic_class_number_estimate(const QuadField& field, i64 terms) {
  const i64 d = field.d_abs;
  std::vector<int> chi(d);
  for (i64 r = 0; r < d; ++r) chi[r] = 0;
  for (i64 r = 0; r < d; ++r)
    if (std::gcd(r, d) == 1) chi[r] = kronecker(field.disc, r);
  double s = 0.0;
  for (i64 n = terms; n >= 1; --n) {  // summed smallest-magnitude-first
    int c = chi[n % d];
    if (c) s += static_cast<double>(c) / static_cast<double>(n);
  }
  return field.u * std::sqrt(static_cast<double>(d)) * s / M_PI;
}

}  // namespace rtf
