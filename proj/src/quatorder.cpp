#include "rtf/quatorder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace rtf {

Quat QuatAlgebra::mul(const Quat& u, const Quat& v) const {
  mpq_class A = a, B = b;
  return Quat{
      u[0] * v[0] + A * u[1] * v[1] + B * u[2] * v[2] - A * B * u[3] * v[3],
      u[0] * v[1] + u[1] * v[0] - B * u[2] * v[3] + B * u[3] * v[2],
      u[0] * v[2] + u[2] * v[0] + A * u[1] * v[3] - A * u[3] * v[1],
      u[0] * v[3] + u[3] * v[0] + u[1] * v[2] - u[2] * v[1],
  };
}

mpq_class QuatAlgebra::nrd(const Quat& u) const {
  mpq_class A = a, B = b;
  return u[0] * u[0] - A * u[1] * u[1] - B * u[2] * u[2] + A * B * u[3] * u[3];
}

mpq_class QuatAlgebra::trd(const Quat& u) const { return 2 * u[0]; }

mpq_class QuatAlgebra::bil(const Quat& u, const Quat& v) const {
  mpq_class A = a, B = b;
  return u[0] * v[0] - A * u[1] * v[1] - B * u[2] * v[2] + A * B * u[3] * v[3];
}

mpq_class sqrt_mpq(const mpq_class& x) {
  if (x < 0) throw std::domain_error("sqrt_mpq: negative");
  mpz_class num = x.get_num(), den = x.get_den(), rn, rd;
  if (mpz_perfect_square_p(num.get_mpz_t()) == 0 || mpz_perfect_square_p(den.get_mpz_t()) == 0)
    throw std::domain_error("sqrt_mpq: not a rational square");
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  return mpq_class(rn) / mpq_class(rd);
}

namespace {

mpz_class lcm_denoms(const std::vector<Quat>& rows) {
  mpz_class l = 1;
  for (auto& r : rows)
    for (auto& c : r) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
  return l;
}

mpq_class det4(const std::array<Quat, 4>& m) {
  std::array<Quat, 4> a = m;
  mpq_class det = 1;
  for (int c = 0; c < 4; ++c) {
    int p = -1;
    for (int r = c; r < 4; ++r)
      if (a[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (int r = c + 1; r < 4; ++r) {
      if (a[r][c] == 0) continue;
      mpq_class f = a[r][c] / a[c][c];
      for (int j = c; j < 4; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

std::array<Quat, 4> inv4(const std::array<Quat, 4>& m) {
  std::array<Quat, 4> a = m, inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = 1;
  for (int c = 0; c < 4; ++c) {
    int p = -1;
    for (int r = c; r < 4; ++r)
      if (a[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) throw std::runtime_error("inv4: singular matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    mpq_class d = a[c][c];
    for (int j = 0; j < 4; ++j) a[c][j] /= d, inv[c][j] /= d;
    for (int r = 0; r < 4; ++r) {
      if (r == c || a[r][c] == 0) continue;
      mpq_class f = a[r][c];
      for (int j = 0; j < 4; ++j) a[r][j] -= f * a[c][j], inv[r][j] -= f * inv[c][j];
    }
  }
  return inv;
}

// coordinates of x in the row basis m: c with c * m = x
Quat coords_in(const std::array<Quat, 4>& minv, const Quat& x) {
  Quat c{};
  for (int j = 0; j < 4; ++j)
    for (int t = 0; t < 4; ++t) c[j] += x[t] * minv[t][j];
  return c;
}

mpq_class round_q(const mpq_class& x) {
  mpq_class half(1, 2);
  mpz_class f;
  mpq_class y = x + half;
  mpz_fdiv_q(f.get_mpz_t(), y.get_num().get_mpz_t(), y.get_den().get_mpz_t());
  return mpq_class(f);
}

// Gram of the reduced norm form on a basis.
std::array<Quat, 4> gram_of(const QuatAlgebra& A, const std::array<Quat, 4>& b) {
  std::array<Quat, 4> g{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i][j] = A.bil(b[i], b[j]);
  return g;
}

}  // namespace

QLattice qlat_from_rows(const std::vector<Quat>& rows) {
  mpz_class l = lcm_denoms(rows);
  std::vector<std::vector<mpz_class>> zr;
  zr.reserve(rows.size());
  for (auto& r : rows) {
    std::vector<mpz_class> z(4);
    for (int j = 0; j < 4; ++j) {
      mpq_class s = r[j] * mpq_class(l);
      z[j] = s.get_num();  // denominator is 1 by construction
    }
    zr.push_back(std::move(z));
  }
  auto h = hnf_rows(std::move(zr));
  if (h.size() != 4) throw std::runtime_error("qlat_from_rows: rank < 4");
  QLattice out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.basis[i][j] = mpq_class(h[i][j]) / mpq_class(l);
  return out;
}

QLattice qlat_mul(const QuatAlgebra& A, const QLattice& L, const QLattice& M) {
  std::vector<Quat> rows;
  rows.reserve(16);
  for (auto& u : L.basis)
    for (auto& v : M.basis) rows.push_back(A.mul(u, v));
  return qlat_from_rows(rows);
}

QLattice qlat_conj(const QLattice& L) {
  std::vector<Quat> rows;
  for (auto& u : L.basis) rows.push_back(QuatAlgebra::conj(u));
  return qlat_from_rows(rows);
}

QLattice qlat_scale(const QLattice& L, const mpq_class& c) {
  std::vector<Quat> rows;
  for (auto& u : L.basis) {
    Quat r;
    for (int j = 0; j < 4; ++j) r[j] = u[j] * c;
    rows.push_back(r);
  }
  return qlat_from_rows(rows);
}

mpq_class qlat_nrd(const QLattice& L, const QLattice& O) {
  mpq_class r = det4(L.basis) / det4(O.basis);
  if (r < 0) r = -r;
  return sqrt_mpq(r);
}

QLattice qlat_inverse(const QuatAlgebra& A, const QLattice& L, const QLattice& O) {
  (void)A;
  return qlat_scale(qlat_conj(L), 1 / qlat_nrd(L, O));
}

bool qlat_equal(const QLattice& L, const QLattice& M) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (L.basis[i][j] != M.basis[i][j]) return false;
  return true;
}

bool qlat_contains(const QLattice& L, const Quat& x) {
  Quat c = coords_in(inv4(L.basis), x);
  for (int j = 0; j < 4; ++j)
    if (c[j].get_den() != 1) return false;
  return true;
}

QLattice qlat_reduce(const QuatAlgebra& A, const QLattice& L) {
  std::array<Quat, 4> b = L.basis;
  // exact LLL with delta = 99/100 under the norm form
  auto gso = [&](std::array<std::array<mpq_class, 4>, 4>& mu, std::array<mpq_class, 4>& Bn) {
    std::array<Quat, 4> s = b;  // b*_i in quaternion coordinates
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < i; ++j) {
        mu[i][j] = A.bil(b[i], s[j]) / Bn[j];
        for (int t = 0; t < 4; ++t) s[i][t] -= mu[i][j] * s[j][t];
      }
      Bn[i] = A.bil(s[i], s[i]);
      if (Bn[i] <= 0) throw std::runtime_error("qlat_reduce: degenerate form");
    }
  };
  mpq_class delta(99, 100);
  int k = 1;
  std::array<std::array<mpq_class, 4>, 4> mu{};
  std::array<mpq_class, 4> Bn{};
  gso(mu, Bn);
  int guard = 0;
  while (k < 4) {
    if (++guard > 10000) throw std::runtime_error("qlat_reduce: no convergence");
    for (int j = k - 1; j >= 0; --j) {
      mpq_class r = round_q(mu[k][j]);
      if (r != 0)
        for (int t = 0; t < 4; ++t) b[k][t] -= r * b[j][t];
    }
    gso(mu, Bn);
    if (Bn[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * Bn[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gso(mu, Bn);
      k = std::max(k - 1, 1);
    }
  }
  QLattice out;
  out.basis = b;
  return out;
}

namespace {

// Exact Fincke-Pohst walk: calls fn for each nonzero c with Q(c) <= bound.
void enumerate_upto(const QuatAlgebra& A, const std::array<Quat, 4>& basis, const mpq_class& bound,
                    const std::function<void(const std::array<i64, 4>&, const mpq_class&)>& fn) {
  auto G = gram_of(A, basis);
  // LDL^T: Q(c) = sum_k D_k (c_k + sum_{i>k} Lm[i][k] c_i)^2
  std::array<mpq_class, 4> D{};
  std::array<Quat, 4> Lm{};
  for (int k = 0; k < 4; ++k) {
    mpq_class d = G[k][k];
    for (int s = 0; s < k; ++s) d -= Lm[k][s] * Lm[k][s] * D[s];
    if (d <= 0) throw std::runtime_error("enumerate_upto: form not positive definite");
    D[k] = d;
    for (int i = k + 1; i < 4; ++i) {
      mpq_class v = G[i][k];
      for (int s = 0; s < k; ++s) v -= Lm[i][s] * Lm[k][s] * D[s];
      Lm[i][k] = v / d;
    }
  }
  std::array<i64, 4> c{};
  std::function<void(int, const mpq_class&)> rec = [&](int k, const mpq_class& R) {
    if (k < 0) {
      if (c != std::array<i64, 4>{0, 0, 0, 0}) fn(c, bound - R);
      return;
    }
    mpq_class s = 0;
    for (int i = k + 1; i < 4; ++i) s += Lm[i][k] * c[i];
    double r = std::sqrt(std::max(0.0, mpq_class(R / D[k]).get_d()));
    double ctr = -s.get_d();
    i64 lo = static_cast<i64>(std::floor(ctr - r)) - 1;
    i64 hi = static_cast<i64>(std::ceil(ctr + r)) + 1;
    for (i64 v = lo; v <= hi; ++v) {
      mpq_class u = s + v;
      mpq_class term = D[k] * u * u;
      if (term > R) continue;
      c[k] = v;
      rec(k - 1, R - term);
    }
    c[k] = 0;
  };
  rec(3, bound);
}

Quat from_coords(const std::array<Quat, 4>& basis, const std::array<i64, 4>& c) {
  Quat x{};
  for (int t = 0; t < 4; ++t)
    for (int j = 0; j < 4; ++j) x[j] += mpq_class(c[t]) * basis[t][j];
  return x;
}

}  // namespace

i64 qlat_count_norm(const QuatAlgebra& A, const QLattice& L, const mpq_class& t) {
  if (t <= 0) return 0;
  QLattice R = qlat_reduce(A, L);
  i64 n = 0;
  enumerate_upto(A, R.basis, t, [&](const std::array<i64, 4>&, const mpq_class& q) {
    if (q == t) ++n;
  });
  return n;
}

std::vector<Quat> qlat_vectors_norm(const QuatAlgebra& A, const QLattice& L, const mpq_class& t) {
  std::vector<Quat> out;
  if (t <= 0) return out;
  QLattice R = qlat_reduce(A, L);
  enumerate_upto(A, R.basis, t, [&](const std::array<i64, 4>& c, const mpq_class& q) {
    if (q == t) out.push_back(from_coords(R.basis, c));
  });
  return out;
}

mpq_class qlat_min_norm(const QuatAlgebra& A, const QLattice& L) {
  QLattice R = qlat_reduce(A, L);
  mpq_class bound = A.nrd(R.basis[0]);
  for (int i = 1; i < 4; ++i) bound = std::min(bound, A.nrd(R.basis[i]));
  mpq_class best = bound;
  enumerate_upto(A, R.basis, bound, [&](const std::array<i64, 4>&, const mpq_class& q) {
    if (q > 0 && q < best) best = q;
  });
  return best;
}

QuatAlgebra build_algebra(i64 N) {
  if (N <= 0) throw std::invalid_argument("build_algebra: N must be positive");
  if (!is_squarefree(N)) throw std::invalid_argument("build_algebra: N must be squarefree");
  auto ram = prime_divisors(N);
  if (ram.size() % 2 == 0)
    throw std::invalid_argument("build_algebra: number of prime factors of N must be odd");
  // deterministic search: (-1,-1), (-1,-2), (-2,-2), (-1,-3), ... first match
  for (i64 b = 1; b <= 400; ++b)
    for (i64 a = 1; a <= b; ++a) {
      bool ok = hilbert_infinity(-a, -b) == -1;
      for (i64 p : prime_divisors(2 * a * b)) {
        bool want = (N % p == 0);
        if ((hilbert(-a, -b, p) == -1) != want) {
          ok = false;
          break;
        }
      }
      // primes of N must all appear among the candidates checked above
      for (i64 p : ram)
        if (ok && hilbert(-a, -b, p) != -1) ok = false;
      if (ok) return QuatAlgebra{-a, -b, ram};
    }
  throw std::runtime_error("build_algebra: presentation search exhausted");
}

namespace {

// reduced discriminant of an order lattice: sqrt |det(trd(e_i conj(e_j)))|
mpq_class reduced_disc(const QuatAlgebra& A, const QLattice& L) {
  std::array<Quat, 4> tp;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) tp[i][j] = 2 * A.bil(L.basis[i], L.basis[j]);
  mpq_class d = det4(tp);
  if (d < 0) d = -d;
  return sqrt_mpq(d);
}

// multiplicative closure of a lattice; empty optional-like failure -> throws
bool close_under_mul(const QuatAlgebra& A, QLattice& L, i64 N) {
  for (int iter = 0; iter < 16; ++iter) {
    std::vector<Quat> rows(L.basis.begin(), L.basis.end());
    for (auto& u : L.basis)
      for (auto& v : L.basis) rows.push_back(A.mul(u, v));
    QLattice L2 = qlat_from_rows(rows);
    if (qlat_equal(L, L2)) {
      // integrality of the basis
      for (auto& u : L.basis)
        if (A.trd(u).get_den() != 1 || A.nrd(u).get_den() != 1) return false;
      return true;
    }
    L = L2;
    // an order's reduced discriminant is at least N; reject runaway growth
    mpq_class rd;
    try {
      rd = reduced_disc(A, L);
    } catch (const std::domain_error&) {
      continue;  // mid-closure lattice need not be an order yet
    }
    if (rd < N) return false;
  }
  return false;
}

}  // namespace

Order maximal_order(const QuatAlgebra& alg, i64 N) {
  QLattice O;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) O.basis[i][j] = (i == j) ? 1 : 0;
  mpq_class target(N);
  int guard = 0;
  while (true) {
    if (++guard > 64) throw std::runtime_error("maximal_order: saturation did not terminate");
    mpq_class d = reduced_disc(alg, O);
    if (d == target) break;
    mpq_class ratio = d / target;
    if (ratio.get_den() != 1)
      throw std::runtime_error("maximal_order: discriminant not a multiple of the level");
    bool advanced = false;
    for (i64 p : prime_divisors(ratio.get_num().get_si())) {
      // search for x = v/p enlarging O to an order of smaller discriminant
      std::array<i64, 4> c{};
      for (c[0] = 0; c[0] < p && !advanced; ++c[0])
        for (c[1] = 0; c[1] < p && !advanced; ++c[1])
          for (c[2] = 0; c[2] < p && !advanced; ++c[2])
            for (c[3] = 0; c[3] < p && !advanced; ++c[3]) {
              if (c == std::array<i64, 4>{0, 0, 0, 0}) continue;
              Quat x{};
              for (int t = 0; t < 4; ++t)
                for (int j = 0; j < 4; ++j) x[j] += mpq_class(c[t]) * O.basis[t][j] / p;
              if (alg.trd(x).get_den() != 1 || alg.nrd(x).get_den() != 1) continue;
              std::vector<Quat> rows(O.basis.begin(), O.basis.end());
              rows.push_back(x);
              QLattice L;
              try {
                L = qlat_from_rows(rows);
              } catch (const std::runtime_error&) {
                continue;
              }
              if (!close_under_mul(alg, L, N)) continue;
              mpq_class d2;
              try {
                d2 = reduced_disc(alg, L);
              } catch (const std::domain_error&) {
                continue;
              }
              if (d2 < d && d2 >= target) {
                O = L;
                advanced = true;
              }
            }
      if (advanced) break;
    }
    if (!advanced)
      throw std::runtime_error("maximal_order: unsupported case, no enlargement found");
  }
  Order out;
  out.alg = alg;
  out.lat = O;
  out.level = N;
  auto g = gram_of(alg, O.basis);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.gram[i][j] = g[i][j];
  // postcondition: trace-pairing determinant equals N^2
  if (reduced_disc(alg, O) != target)
    throw std::runtime_error("maximal_order: postcondition failed");
  return out;
}

bool ideals_equivalent(const QuatAlgebra& A, const QLattice& I, const QLattice& J,
                       const QLattice& O) {
  QLattice L = qlat_mul(A, I, qlat_inverse(A, J, O));
  mpq_class t = qlat_nrd(L, O);
  return qlat_count_norm(A, L, t) > 0;
}

namespace {

// The l+1 neighbor ideals of I at l: sublattices lI + W with W a rank-2
// right-module of I/lI.
std::vector<QLattice> neighbors(const QuatAlgebra& A, const QLattice& I, const QLattice& O,
                                i64 l) {
  auto minv = inv4(I.basis);
  std::set<std::string> seen;
  std::vector<QLattice> out;
  // projective representatives over F_l^4
  std::vector<std::array<i64, 4>> prj;
  for (int lead = 0; lead < 4; ++lead) {
    std::array<i64, 4> c{};
    c[lead] = 1;
    std::function<void(int)> fill = [&](int pos) {
      if (pos == 4) {
        prj.push_back(c);
        return;
      }
      if (pos <= lead) {
        c[pos] = (pos == lead) ? 1 : 0;
        fill(pos + 1);
        return;
      }
      for (i64 v = 0; v < l; ++v) {
        c[pos] = v;
        fill(pos + 1);
      }
    };
    fill(0);
  }
  for (auto& c : prj) {
    Quat v{};
    for (int t = 0; t < 4; ++t)
      for (int j = 0; j < 4; ++j) v[j] += mpq_class(c[t]) * I.basis[t][j];
    // rows: coordinates of v * g_s in the I-basis, mod l
    std::array<std::array<i64, 4>, 4> rows{};
    for (int s = 0; s < 4; ++s) {
      Quat co = coords_in(minv, A.mul(v, O.basis[s]));
      for (int j = 0; j < 4; ++j) {
        if (co[j].get_den() != 1)
          throw std::runtime_error("neighbors: ideal is not a right module");
        mpz_class r;
        mpz_fdiv_r_ui(r.get_mpz_t(), co[j].get_num().get_mpz_t(), static_cast<unsigned long>(l));
        rows[s][j] = r.get_si();
      }
    }
    // echelon form over F_l
    int rank = 0;
    for (int col = 0; col < 4 && rank < 4; ++col) {
      int piv = -1;
      for (int r = rank; r < 4; ++r)
        if (rows[r][col] % l != 0) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      std::swap(rows[rank], rows[piv]);
      i64 inv = powmod(rows[rank][col], l - 2, l);  // l prime
      for (int j = 0; j < 4; ++j) rows[rank][j] = rows[rank][j] * inv % l;
      for (int r = 0; r < 4; ++r) {
        if (r == rank || rows[r][col] % l == 0) continue;
        i64 f = rows[r][col] % l;
        for (int j = 0; j < 4; ++j) rows[r][j] = ((rows[r][j] - f * rows[rank][j]) % l + l) % l;
      }
      ++rank;
    }
    if (rank != 2) continue;
    std::string key;
    for (int r = 0; r < 2; ++r)
      for (int j = 0; j < 4; ++j) key += std::to_string(rows[r][j]) + ",";
    if (!seen.insert(key).second) continue;
    std::vector<Quat> gen;
    for (auto& bi : I.basis) {
      Quat s;
      for (int j = 0; j < 4; ++j) s[j] = mpq_class(l) * bi[j];
      gen.push_back(s);
    }
    for (int r = 0; r < 2; ++r) {
      Quat s{};
      for (int t = 0; t < 4; ++t)
        for (int j = 0; j < 4; ++j) s[j] += mpq_class(rows[r][t]) * I.basis[t][j];
      gen.push_back(s);
    }
    out.push_back(qlat_from_rows(gen));
  }
  if (static_cast<i64>(out.size()) != l + 1)
    throw std::runtime_error("neighbors: expected l+1 neighbors");
  return out;
}

}  // namespace

ClassSet right_ideal_classes(const Order& R) {
  const QuatAlgebra& A = R.alg;
  const QLattice& O = R.lat;
  i64 l = 2;
  while (R.level % l == 0) {
    do {
      ++l;
    } while (!is_prime(l));
  }
  ClassSet X;
  X.order = R;
  X.n_level = R.level;
  X.reps.push_back(O);
  std::size_t head = 0;
  while (head < X.reps.size()) {
    QLattice I = X.reps[head++];
    for (auto& J : neighbors(A, I, O, l)) {
      bool known = false;
      for (auto& K : X.reps)
        if (ideals_equivalent(A, J, K, O)) {
          known = true;
          break;
        }
      if (!known) X.reps.push_back(J);
      if (X.reps.size() > 4096) throw std::runtime_error("right_ideal_classes: runaway search");
    }
  }
  mpq_class mass = 0;
  for (auto& I : X.reps) {
    X.rep_nrd.push_back(qlat_nrd(I, O));
    QLattice OL = qlat_mul(A, I, qlat_inverse(A, I, O));
    i64 units = qlat_count_norm(A, OL, 1);
    if (units % 2 != 0) throw std::runtime_error("right_ideal_classes: odd unit count");
    X.weights.push_back(units / 2);
    mass += mpq_class(1, units / 2);
  }
  mpq_class expect(1, 12);
  for (i64 p : prime_divisors(R.level)) expect *= (p - 1);
  if (mass != expect)
    throw std::runtime_error("right_ideal_classes: mass formula failed, enumeration incomplete");
  return X;
}

BrandtMatrix brandt_matrix(const ClassSet& X, i64 m) {
  if (m < 1) throw std::invalid_argument("brandt_matrix: m >= 1 required");
  const QuatAlgebra& A = X.order.alg;
  const QLattice& O = X.order.lat;
  std::size_t h = X.reps.size();
  std::vector<QLattice> inv;
  inv.reserve(h);
  for (auto& J : X.reps) inv.push_back(qlat_inverse(A, J, O));
  BrandtMatrix B;
  B.m = m;
  B.entries.assign(h, std::vector<i64>(h, 0));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < h; ++j) {
      // Hom(I_j, I_i) = I_i I_j^{-1}; count reduced norm m * N(I_i)/N(I_j)
      QLattice L = qlat_mul(A, X.reps[i], inv[j]);
      mpq_class t = mpq_class(m) * X.rep_nrd[i] / X.rep_nrd[j];
      i64 cnt = qlat_count_norm(A, L, t);
      if (cnt % (2 * X.weights[j]) != 0)
        throw std::runtime_error("brandt_matrix: non-integral entry");
      B.entries[i][j] = cnt / (2 * X.weights[j]);
    }
  return B;
}

}  // namespace rtf
