#ifndef RTF_QUATORDER_HPP
#define RTF_QUATORDER_HPP

#include <array>
#include <vector>

#include "rtf/arith.hpp"

namespace rtf {

// Quaternion coordinates over the basis (1, i, j, k), k = ij.
using Quat = std::array<mpq_class, 4>;

// B = (a, b | Q): i^2 = a, j^2 = b, ij = -ji. Definite, so a < 0, b < 0.
struct QuatAlgebra {
  i64 a = -1, b = -1;
  std::vector<i64> ram_finite;  // primes where B ramifies; equals primes of N

  Quat mul(const Quat& u, const Quat& v) const;
  mpq_class nrd(const Quat& u) const;           // reduced norm
  mpq_class trd(const Quat& u) const;           // reduced trace
  static Quat conj(const Quat& u) { return {u[0], -u[1], -u[2], -u[3]}; }
  // polar form of nrd: bil(x,x) = nrd(x)
  mpq_class bil(const Quat& u, const Quat& v) const;
};

// A full-rank lattice in B: four basis rows, HNF-normalized coordinates.
struct QLattice {
  std::array<Quat, 4> basis;
};

struct Order {
  QuatAlgebra alg;
  QLattice lat;
  i64 level = 0;  // reduced discriminant N
  std::array<std::array<mpq_class, 4>, 4> gram;  // polar form of nrd on basis
};

struct ClassSet {
  Order order;
  std::vector<QLattice> reps;      // right ideals of the order
  std::vector<mpq_class> rep_nrd;  // reduced norms N(I_x)
  std::vector<i64> weights;        // w_x = |O_l(I_x)^x| / 2
  i64 n_level = 0;
};

struct BrandtMatrix {
  i64 m = 1;
  std::vector<std::vector<i64>> entries;
};

QuatAlgebra build_algebra(i64 N);
Order maximal_order(const QuatAlgebra& alg, i64 N);
ClassSet right_ideal_classes(const Order& R);
BrandtMatrix brandt_matrix(const ClassSet& X, i64 m);

// --- lattice utilities shared with the embedding code ---

// HNF-normalize a spanning set into a rank-4 basis; throws if rank < 4.
QLattice qlat_from_rows(const std::vector<Quat>& rows);
QLattice qlat_mul(const QuatAlgebra& A, const QLattice& L, const QLattice& M);
QLattice qlat_conj(const QLattice& L);
QLattice qlat_scale(const QLattice& L, const mpq_class& c);
// nrd(L) relative to a reference maximal order: sqrt(covol L / covol O).
mpq_class qlat_nrd(const QLattice& L, const QLattice& O);
// inverse of an invertible lattice (two-sided ideal of maximal orders): conj/nrd
QLattice qlat_inverse(const QuatAlgebra& A, const QLattice& L, const QLattice& O);
bool qlat_equal(const QLattice& L, const QLattice& M);
// membership of a point in the Z-span of the basis
bool qlat_contains(const QLattice& L, const Quat& x);
// LLL-reduce the basis with respect to the norm form (exact arithmetic).
QLattice qlat_reduce(const QuatAlgebra& A, const QLattice& L);
// # of lattice vectors of reduced norm exactly t (exact enumeration).
i64 qlat_count_norm(const QuatAlgebra& A, const QLattice& L, const mpq_class& t);
// all lattice vectors of reduced norm exactly t
std::vector<Quat> qlat_vectors_norm(const QuatAlgebra& A, const QLattice& L, const mpq_class& t);
// minimal nonzero reduced norm
mpq_class qlat_min_norm(const QuatAlgebra& A, const QLattice& L);

// right-ideal equivalence over a common maximal order O
bool ideals_equivalent(const QuatAlgebra& A, const QLattice& I, const QLattice& J,
                       const QLattice& O);

// exact square root of a rational square; throws if not a square
mpq_class sqrt_mpq(const mpq_class& x);

}  // namespace rtf

#endif
