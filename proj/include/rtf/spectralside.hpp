#ifndef RTF_SPECTRALSIDE_HPP
#define RTF_SPECTRALSIDE_HPP

#include <map>
#include <optional>
#include <vector>

#include "rtf/heckemeasure.hpp"
#include "rtf/qfield.hpp"
#include "rtf/quatorder.hpp"
#include "rtf/torusmap.hpp"

namespace rtf {

// One cuspidal Hecke eigenform on X; phi holds the function values, normalized
// to <phi, phi> = 1 in the mass inner product <u,v> = sum_x u_x v_x / w_x.
struct CuspForm {
  std::vector<double> phi;
  std::map<i64, double> ap;  // B(p)-eigenvalues at the decomposition primes
  double norm = 1.0;
};

struct EigenData {
  std::vector<double> eisenstein;  // normalized constant function
  std::vector<CuspForm> cusp_forms;
  std::vector<i64> primes;
};

struct SpectralReport {
  double raw_period_sum = 0;        // sum over cusp forms (optionally Hecke-weighted)
  double eisenstein_correction = 0; // delta_Omega h^2 / (1,1), (1,1) = sum 1/w_x
  double delta_route = 0;           // sum_x w_x |P_x|^2 (unweighted pivot)
  double eigen_route = 0;           // raw + eisenstein (same weights)
  double l_average = 0;             // Waldspurger-normalized cusp sum
  std::vector<double> summands;     // per-cusp-form contributions
};

EigenData eigen_decompose(const ClassSet& X, std::vector<i64> primes = {});

SpectralReport spectral_average(const ClassSet& X, const PeriodData& pd,
                                const ClassCharacter& omega, const QuadField& E,
                                const std::optional<HeckeElement>& weight = std::nullopt);

// The positive constant converting |period|^2/(f,f) into L(1/2)/L(1,Ad):
// L(2,1) L_S(1,eta)^2 / (2 sqrt(c d)) * prod_{p|N}(1-1/p)
//   * Gamma(2k) / (pi Gamma(k+m) Gamma(k-m)),
// with the completed L(2,1) = pi/6 and the partial product L_S(1,eta) over the
// ramified places of Omega, which is empty (= 1) for an unramified Omega. With
// petersson set, multiplies by 2^{2k}/N, converting (f,f) to L(1, Ad).
double waldspurger_constant(i64 N, const QuadField& E, const ClassCharacter& omega, int k, int m,
                            bool petersson = false);

// Residual (Eisenstein) spectral constant: 0 unless k = 1 and Omega trivial;
// otherwise fhat evaluated at the residual point sqrt(q) + 1/sqrt(q).
double residual_term(int k, const ClassCharacter& omega, const HeckeElement& fp,
                     const QuadField& E);

}  // namespace rtf

#endif
