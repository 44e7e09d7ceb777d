#ifndef RTF_QFIELD_HPP
#define RTF_QFIELD_HPP

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "rtf/arith.hpp"

namespace rtf {

// Imaginary quadratic field E = Q(sqrt(D)), D a negative fundamental
// discriminant. omega = (D + sqrt(D))/2 generates O_E.
struct QuadField {
  i64 disc = 0;
  i64 d_abs = 0;
  int u = 1;  // # O_E^x / {+-1}
  i64 omega_trace = 0, omega_norm = 0;
};

bool is_fundamental_discriminant(i64 D);
QuadField make_field(i64 D);

// A reduced primitive positive definite form (a,b,c), b^2 - 4ac = D;
// equivalently the ideal class of [a, (-b + sqrt(D))/2].
struct IdealClass {
  i64 a = 1, b = 0, c = 0;
  friend auto operator<=>(const IdealClass&, const IdealClass&) = default;
};

IdealClass reduce_form(i64 a, i64 b, i64 c);

class ClassGroup {
 public:
  explicit ClassGroup(const QuadField& field);

  const QuadField& field() const { return field_; }
  const std::vector<IdealClass>& elements() const { return elements_; }
  i64 h() const { return static_cast<i64>(elements_.size()); }

  std::size_t index_of(const IdealClass& f) const;
  IdealClass identity() const;
  IdealClass compose(const IdealClass& f, const IdealClass& g) const;
  IdealClass inverse(const IdealClass& f) const;

  // Invariant factors d_1 | d_2 | ... (nontrivial ones) of the group.
  const std::vector<i64>& cyclic_orders() const;
  // Exponent vector of each element w.r.t. the cyclic decomposition.
  const std::vector<std::vector<i64>>& dlog_table() const;

 private:
  void decompose() const;

  QuadField field_;
  std::vector<IdealClass> elements_;  // sorted
  mutable std::vector<i64> cyclic_;
  mutable std::vector<std::vector<i64>> dlog_;
  mutable bool decomposed_ = false;
};

// Character of Pic(E); values are exact roots of unity stored as angle
// fractions num/den (value on class i = exp(2 pi i * num_i/den_i)).
class ClassCharacter {
 public:
  ClassCharacter() = default;
  ClassCharacter(std::vector<std::pair<i64, i64>> angles, int weight_m, i64 conductor_c);

  std::complex<double> value(std::size_t class_index) const;
  std::pair<i64, i64> angle(std::size_t class_index) const { return angles_[class_index]; }
  bool trivial() const;
  // Order of the character in the dual group.
  i64 order() const;
  std::size_t size() const { return angles_.size(); }

  int weight_m = 0;
  i64 conductor_c = 1;

 private:
  std::vector<std::pair<i64, i64>> angles_;  // reduced fractions in [0,1)
};

// All h characters of the class group, trivial character first; conjugate
// characters appear (the list is closed under conjugation).
std::vector<ClassCharacter> characters(const ClassGroup& group);

// One entry per integral ideal of norm n, as [a0*m, ...] = m * [a0, (-b0+sqrt D)/2]
// with a0*m^2 = n and the ideal class index of the primitive part.
struct IdealOfNorm {
  i64 a0 = 1, b0 = 0, m = 1;
  std::size_t class_index = 0;
};
std::vector<IdealOfNorm> ideals_of_norm(const ClassGroup& group, i64 n);

// Kronecker character eta = chi_D.
int eta(const QuadField& field, i64 n);

// Number of common divisors of a and b (sigma(a,b) in the geometric sums).
i64 sigma_common_divisors(i64 a, i64 b);

// Theta-series coefficients b_n = sum over ideals of norm n of Omega(class).
std::vector<std::complex<double>> theta_coefficients(const ClassGroup& group,
                                                     const ClassCharacter& omega, i64 n_max);

// Analytic class number estimate u*sqrt(|D|)*S/pi with S a direct partial sum
// of sum chi_D(n)/n over n <= terms; rounds to h within 0.49 for fundamental D.
double analytic_class_number_estimate(const QuadField& field, i64 terms = 1000000);

}  // namespace rtf

#endif
