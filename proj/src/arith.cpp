#include "rtf/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace rtf {

int jacobi(i64 a, i64 n) {
  if (n <= 0 || n % 2 == 0) throw std::invalid_argument("jacobi: n must be odd positive");
  a %= n;
  if (a < 0) a += n;
  int result = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      i64 r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

int kronecker(i64 a, i64 n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  int v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  if (v > 0) {
    if (a % 2 == 0) return 0;
    if (v % 2 == 1) {
      i64 r = ((a % 8) + 8) % 8;
      if (r == 3 || r == 5) result = -result;
    }
  }
  return result * jacobi(a, n);
}

i64 powmod(i64 base, i64 exp, i64 mod) {
  unsigned __int128 r = 1, b = ((base % mod) + mod) % mod;
  while (exp > 0) {
    if (exp & 1) r = r * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return static_cast<i64>(r);
}

bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 p : {2LL, 3LL, 5LL, 7LL, 11LL, 13LL, 17LL, 19LL, 23LL, 29LL, 31LL, 37LL}) {
    if (n % p == 0) return n == p;
  }
  // deterministic Miller-Rabin for 64-bit range
  i64 d = n - 1;
  int s = 0;
  while (d % 2 == 0) d /= 2, ++s;
  for (i64 a : {2LL, 3LL, 5LL, 7LL, 11LL, 13LL, 17LL, 19LL, 23LL, 29LL, 31LL, 37LL}) {
    i64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 0; i + 1 < s; ++i) {
      x = static_cast<i64>((unsigned __int128)x * x % n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

std::vector<std::pair<i64, int>> factor(i64 n) {
  if (n < 0) n = -n;
  if (n == 0) throw std::invalid_argument("factor(0)");
  std::vector<std::pair<i64, int>> out;
  for (i64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) n /= p, ++e;
      out.emplace_back(p, e);
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

bool is_squarefree(i64 n) {
  for (auto& [p, e] : factor(n))
    if (e > 1) return false;
  return true;
}

std::vector<i64> prime_divisors(i64 n) {
  std::vector<i64> out;
  for (auto& [p, e] : factor(n)) out.push_back(p);
  return out;
}

std::vector<i64> divisors(i64 n) {
  std::vector<i64> out{1};
  for (auto& [p, e] : factor(n)) {
    std::size_t sz = out.size();
    i64 pe = 1;
    for (int i = 1; i <= e; ++i) {
      pe *= p;
      for (std::size_t j = 0; j < sz; ++j) out.push_back(out[j] * pe);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<i64> primes_up_to(i64 bound) {
  std::vector<i64> out;
  if (bound < 2) return out;
  std::vector<bool> sieve(bound + 1, true);
  for (i64 p = 2; p <= bound; ++p) {
    if (!sieve[p]) continue;
    out.push_back(p);
    for (i64 q = p * p; q <= bound; q += p) sieve[q] = false;
  }
  return out;
}

i64 valuation(i64 n, i64 p) {
  if (n == 0) throw std::invalid_argument("valuation of 0");
  i64 v = 0;
  while (n % p == 0) n /= p, ++v;
  return v;
}

int hilbert(i64 a, i64 b, i64 p) {
  if (a == 0 || b == 0) throw std::invalid_argument("hilbert: zero argument");
  if (p < 2) throw std::invalid_argument("hilbert: bad prime");
  i64 alpha = 0, beta = 0;
  while (a % p == 0) a /= p, ++alpha;
  while (b % p == 0) b /= p, ++beta;
  if (p == 2) {
    auto eps = [](i64 x) { return (((x - 1) / 2) % 2 + 2) % 2; };
    auto omg = [](i64 x) { return (((x * x - 1) / 8) % 2 + 2) % 2; };
    i64 e = eps(a) * eps(b) + alpha * omg(b) + beta * omg(a);
    return e % 2 == 0 ? 1 : -1;
  }
  int sign = 1;
  if ((alpha % 2) && (beta % 2) && ((p - 1) / 2) % 2 == 1) sign = -sign;
  if (beta % 2) sign *= kronecker(a % p, p);
  if (alpha % 2) sign *= kronecker(b % p, p);
  return sign;
}

int hilbert_infinity(i64 a, i64 b) { return (a < 0 && b < 0) ? -1 : 1; }

std::vector<std::vector<mpz_class>> hnf_rows(std::vector<std::vector<mpz_class>> rows) {
  if (rows.empty()) return rows;
  std::size_t ncols = rows[0].size();
  std::size_t r = 0;  // next pivot row
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    // find a pivot in column c among rows r..end, reduce all to gcd
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t i = r; i < rows.size(); ++i) {
        if (rows[i][c] != 0 && (best == rows.size() || abs(rows[i][c]) < abs(rows[best][c])))
          best = i;
      }
      if (best == rows.size()) break;
      std::swap(rows[r], rows[best]);
      bool clean = true;
      for (std::size_t i = r + 1; i < rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        mpz_class q = rows[i][c] / rows[r][c];
        for (std::size_t j = 0; j < ncols; ++j) rows[i][j] -= q * rows[r][j];
        if (rows[i][c] != 0) clean = false;
      }
      if (clean) break;
    }
    if (rows[r][c] == 0) continue;
    if (rows[r][c] < 0)
      for (std::size_t j = 0; j < ncols; ++j) rows[r][j] = -rows[r][j];
    for (std::size_t i = 0; i < r; ++i) {
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
      if (q != 0)
        for (std::size_t j = 0; j < ncols; ++j) rows[i][j] -= q * rows[r][j];
    }
    ++r;
  }
  rows.resize(r);
  return rows;
}

SmithResult smith_normal_form(std::vector<std::vector<mpz_class>> M, std::size_t cols) {
  // Compress to a square matrix first via HNF of the row lattice.
  M = hnf_rows(std::move(M));
  while (M.size() < cols) M.push_back(std::vector<mpz_class>(cols, 0));
  std::size_t n = M.size();

  // W tracks the inverse of the accumulated column operations: if the loop
  // produces D = U * M_orig * V then W = V^{-1}, and the generator of the j-th
  // cyclic factor of Z^cols / rowspan(M_orig) is row j of W.
  std::vector<std::vector<mpz_class>> W(cols, std::vector<mpz_class>(cols, 0));
  for (std::size_t i = 0; i < cols; ++i) W[i][i] = 1;

  auto col_op = [&](std::size_t j, std::size_t k, const mpz_class& q) {
    // col_k -= q * col_j on M; inverse op on W is row_j += q * row_k
    for (std::size_t i = 0; i < n; ++i) M[i][k] -= q * M[i][j];
    for (std::size_t i = 0; i < cols; ++i) W[j][i] += q * W[k][i];
  };
  auto col_swap = [&](std::size_t j, std::size_t k) {
    for (std::size_t i = 0; i < n; ++i) std::swap(M[i][j], M[i][k]);
    std::swap(W[j], W[k]);
  };
  auto col_neg = [&](std::size_t j) {
    for (std::size_t i = 0; i < n; ++i) M[i][j] = -M[i][j];
    for (std::size_t i = 0; i < cols; ++i) W[j][i] = -W[j][i];
  };

  for (std::size_t t = 0; t < cols; ++t) {
    // Work on trailing submatrix starting at (t, t).
    while (true) {
      // locate smallest nonzero entry in the submatrix
      std::size_t pi = n, pj = cols;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (M[i][j] != 0 && (pi == n || abs(M[i][j]) < abs(M[pi][pj]))) pi = i, pj = j;
      if (pi == n) break;  // all zero
      std::swap(M[t], M[pi]);
      if (pj != t) col_swap(t, pj);
      if (M[t][t] < 0) col_neg(t);
      bool again = false;
      for (std::size_t i = t + 1; i < n; ++i) {
        if (M[i][t] == 0) continue;
        mpz_class q = M[i][t] / M[t][t];
        for (std::size_t j = t; j < cols; ++j) M[i][j] -= q * M[t][j];
        if (M[i][t] != 0) again = true;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (M[t][j] == 0) continue;
        mpz_class q = M[t][j] / M[t][t];
        col_op(t, j, q);
        if (M[t][j] != 0) again = true;
      }
      if (again) continue;
      // divisibility fix: M[t][t] must divide every later entry
      bool fixed = true;
      for (std::size_t i = t + 1; i < n && fixed; ++i)
        for (std::size_t j = t + 1; j < cols && fixed; ++j)
          if (M[i][j] % M[t][t] != 0) {
            for (std::size_t jj = t; jj < cols; ++jj) M[t][jj] += M[i][jj];
            fixed = false;
          }
      if (fixed) break;
    }
  }

  SmithResult out;
  out.diag.resize(cols);
  for (std::size_t j = 0; j < cols; ++j) out.diag[j] = j < n ? M[j][j] : 0;
  out.gens = std::move(W);
  return out;
}

}  // namespace rtf
