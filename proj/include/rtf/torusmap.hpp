#ifndef RTF_TORUSMAP_HPP
#define RTF_TORUSMAP_HPP

#include <complex>
#include <utility>
#include <vector>

#include "rtf/qfield.hpp"
#include "rtf/quatorder.hpp"

namespace rtf {

using cplx = std::complex<double>;

// An embedding O_E -> R: y generates O_E, with trd(y) = t, nrd(y) = n and
// t^2 - 4n = D; then 2y - t squares to D.
struct Embedding {
  Quat y;
  i64 t = 0;
  i64 n = 0;
};

// iota : Pic(E) -> X and the data needed for period vectors. iota[c] is the
// class-set index of the right ideal aR attached to the c-th ideal class.
struct PeriodData {
  std::vector<std::size_t> iota;
  std::size_t x_count = 0;
};

// Embedding of O_E into the given maximal order; requires every p | N inert
// in E. Throws if this order does not admit one (see find_embedded_order).
Embedding optimal_embedding(const Order& R, const QuadField& E);

// Some maximal order in the algebra of R admits the embedding (the global
// count of optimal embeddings over the class set is positive); re-root to one
// that does, trying left orders of the ideal classes of R in BFS order.
std::pair<Order, Embedding> find_embedded_order(const Order& R, const QuadField& E);

PeriodData iota_map(const Embedding& emb, const ClassGroup& pic, const ClassSet& X);

// P_x = sum over classes y with iota(y) = x of Omega(y).
std::vector<cplx> period_vector(const PeriodData& pd, const ClassCharacter& omega);

}  // namespace rtf

#endif
