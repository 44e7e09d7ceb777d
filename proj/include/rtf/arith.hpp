#ifndef RTF_ARITH_HPP
#define RTF_ARITH_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace rtf {

using i64 = long;  // 64-bit here; `long` keeps gmpxx interop simple

// Kronecker symbol (a|n) extended to all n != 0 (and (a|0) = [a = +-1]).
int kronecker(i64 a, i64 n);

// Jacobi symbol, n odd positive.
int jacobi(i64 a, i64 n);

i64 powmod(i64 base, i64 exp, i64 mod);

bool is_prime(i64 n);
bool is_squarefree(i64 n);

// Prime factorization by trial division, pairs (p, e), p increasing.
std::vector<std::pair<i64, int>> factor(i64 n);
std::vector<i64> prime_divisors(i64 n);
std::vector<i64> divisors(i64 n);
std::vector<i64> primes_up_to(i64 bound);

i64 valuation(i64 n, i64 p);

// Hilbert symbol (a,b)_p over Q_p (p prime) and (a,b)_inf (p = 0 sentinel? no:
// use hilbert_infinity). Values in {+1,-1}; a, b nonzero.
int hilbert(i64 a, i64 b, i64 p);
int hilbert_infinity(i64 a, i64 b);

// Column-style Hermite normal form of an integer matrix (rows = generators of
// a sublattice of Z^n). Returns the reduced row list (rank rows, lower-left
// echelon with positive pivots, entries above pivots reduced).
std::vector<std::vector<mpz_class>> hnf_rows(std::vector<std::vector<mpz_class>> rows);

// Smith normal form of an integer matrix M (rows x cols): diag are the
// invariant factors d_1 | d_2 | ... of the quotient G = Z^cols / rowspan(M)
// (zeros kept for infinite factors). G is the direct sum of the cyclic groups
// generated by g_j = sum_i gens[j][i] e_i, with g_j of order diag[j].
struct SmithResult {
  std::vector<mpz_class> diag;
  std::vector<std::vector<mpz_class>> gens;  // cols x cols
};
SmithResult smith_normal_form(std::vector<std::vector<mpz_class>> M, std::size_t cols);

}  // namespace rtf

#endif
