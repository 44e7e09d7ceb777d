#include "rtf/spectralside.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rtf {

namespace {

// Hecke operator at p in the coordinates s_x = h(x)/sqrt(w_x), where it is a
// symmetric matrix: M_ij = B(p)_{ij} sqrt(w_j / w_i). Functions pair by the
// mass measure, <u, v> = sum_x u_x conj(v_x) / w_x, and the Brandt row action
// is self-adjoint for it (w_j B_ij = w_i B_ji).
Eigen::MatrixXd sym_brandt(const ClassSet& X, i64 p) {
  const int n = static_cast<int>(X.reps.size());
  BrandtMatrix B = brandt_matrix(X, p);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      M(i, j) = static_cast<double>(B.entries[i][j]) *
                std::sqrt(static_cast<double>(X.weights[j]) / static_cast<double>(X.weights[i]));
  return 0.5 * (M + M.transpose().eval());
}

double snap_eigenvalue(double lam) {
  double r = std::round(lam);
  return std::abs(lam - r) < 1e-6 ? r : lam;
}

std::vector<i64> prime_pool(i64 N, std::size_t count) {
  std::vector<i64> out;
  for (i64 p = 2; out.size() < count; ++p) {
    if (!is_prime(p) || N % p == 0) continue;
    out.push_back(p);
  }
  return out;
}

}  // namespace

EigenData eigen_decompose(const ClassSet& X, std::vector<i64> primes) {
  const int n = static_cast<int>(X.reps.size());
  for (i64 p : primes)
    if (!is_prime(p) || X.n_level % p == 0)
      throw std::invalid_argument("eigen_decompose: primes must be prime and coprime to the level");
  for (i64 p : prime_pool(X.n_level, 6))
    if (std::find(primes.begin(), primes.end(), p) == primes.end()) primes.push_back(p);

  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  std::vector<std::pair<int, int>> groups{{0, n}};
  std::vector<std::pair<i64, Eigen::MatrixXd>> ops;
  for (i64 p : primes) {
    bool split_needed = false;
    for (auto& g : groups)
      if (g.second - g.first > 1) split_needed = true;
    // keep at least two operators so eigenvalue labels get cross-checked
    if (!split_needed && ops.size() >= 2) break;
    ops.emplace_back(p, sym_brandt(X, p));
    const Eigen::MatrixXd& M = ops.back().second;
    std::vector<std::pair<int, int>> next;
    for (auto [b, e] : groups) {
      int k = e - b;
      if (k == 1) {
        next.emplace_back(b, e);
        continue;
      }
      Eigen::MatrixXd A = V.middleCols(b, k).transpose() * M * V.middleCols(b, k);
      A = 0.5 * (A + A.transpose().eval());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
      if (es.info() != Eigen::Success)
        throw std::runtime_error("eigen_decompose: eigensolver failed");
      V.middleCols(b, k) = (V.middleCols(b, k) * es.eigenvectors()).eval();
      auto ev = es.eigenvalues();
      int s = 0;
      for (int t = 1; t <= k; ++t)
        if (t == k || ev[t] - ev[t - 1] > 1e-7 * std::max(1.0, std::abs(ev[t]))) {
          next.emplace_back(b + s, b + t);
          s = t;
        }
    }
    groups = next;
  }
  for (auto& g : groups)
    if (g.second - g.first > 1)
      throw std::runtime_error(
          "eigen_decompose: simultaneous eigenspace of dimension > 1 (multiplicity-one failure)");

  // eigenvalues are reported at every requested prime, not only the ones the
  // refinement loop consumed
  for (i64 p : primes) {
    bool have = false;
    for (auto& [q, M] : ops) have = have || q == p;
    if (!have) ops.emplace_back(p, sym_brandt(X, p));
  }

  // the Eisenstein line: constant functions, i.e. s_x proportional to 1/sqrt(w_x)
  Eigen::VectorXd se(n);
  for (int x = 0; x < n; ++x) se[x] = 1.0 / std::sqrt(static_cast<double>(X.weights[x]));
  se.normalize();

  EigenData ed;
  ed.primes = primes;
  int eis_col = -1;
  for (int c = 0; c < n; ++c) {
    Eigen::VectorXd v = V.col(c);
    std::map<i64, double> ap;
    for (auto& [p, M] : ops) ap[p] = snap_eigenvalue(v.dot(M * v));
    if (std::abs(se.dot(v)) > 0.999) {
      eis_col = c;
      for (auto& [p, lam] : ap)
        if (std::abs(lam - static_cast<double>(p + 1)) > 1e-8)
          throw std::runtime_error("eigen_decompose: Eisenstein eigenvalue is not p+1");
      if (se.dot(v) < 0) v = -v;
      ed.eisenstein.resize(n);
      for (int x = 0; x < n; ++x)
        ed.eisenstein[x] = v[x] * std::sqrt(static_cast<double>(X.weights[x]));
      continue;
    }
    CuspForm f;
    f.ap = std::move(ap);
    f.phi.resize(n);
    for (int x = 0; x < n; ++x) f.phi[x] = v[x] * std::sqrt(static_cast<double>(X.weights[x]));
    f.norm = 1.0;
    ed.cusp_forms.push_back(std::move(f));
  }
  if (eis_col < 0) throw std::runtime_error("eigen_decompose: Eisenstein vector not found");
  return ed;
}

SpectralReport spectral_average(const ClassSet& X, const PeriodData& pd,
                                const ClassCharacter& omega, const QuadField& E,
                                const std::optional<HeckeElement>& weight) {
  const int n = static_cast<int>(X.reps.size());
  if (pd.x_count != static_cast<std::size_t>(n))
    throw std::invalid_argument("spectral_average: class-set size mismatch");
  std::vector<cplx> P = period_vector(pd, omega);

  SpectralReport rep;
  for (int x = 0; x < n; ++x) rep.delta_route += static_cast<double>(X.weights[x]) * std::norm(P[x]);

  std::vector<i64> primes;
  if (weight) {
    if (!is_prime(weight->q) || X.n_level % weight->q == 0)
      throw std::invalid_argument("spectral_average: weight prime must be coprime to the level");
    primes.push_back(weight->q);
  }
  EigenData ed = eigen_decompose(X, primes);

  // ell(h) = sum_y Omega(y) h(iota(y)) = sum_x P_x h(x)
  auto ell = [&](const std::vector<double>& phi) {
    cplx v = 0;
    for (int x = 0; x < n; ++x) v += phi[x] * P[x];
    return v;
  };

  double unweighted = std::norm(ell(ed.eisenstein));
  for (auto& f : ed.cusp_forms) {
    double t = std::norm(ell(f.phi)) / f.norm;
    unweighted += t;
    double w = 1.0;
    if (weight) {
      i64 q = weight->q;
      cplx fh = hecke_hat(*weight, f.ap.at(q) / std::sqrt(static_cast<double>(q)));
      if (std::abs(fh.imag()) > 1e-9 * std::max(1.0, std::abs(fh)))
        throw std::runtime_error("spectral_average: non-real Hecke weight");
      w = fh.real();
    }
    rep.summands.push_back(w * t);
    rep.raw_period_sum += w * t;
  }
  {
    double w = 1.0;
    if (weight) {
      i64 q = weight->q;
      double x = std::sqrt(static_cast<double>(q)) + 1.0 / std::sqrt(static_cast<double>(q));
      cplx fh = hecke_hat(*weight, x);
      if (std::abs(fh.imag()) > 1e-9 * std::max(1.0, std::abs(fh)))
        throw std::runtime_error("spectral_average: non-real Hecke weight");
      w = fh.real();
    }
    rep.eisenstein_correction = w * std::norm(ell(ed.eisenstein));
  }
  rep.eigen_route = rep.raw_period_sum + rep.eisenstein_correction;

  // the basis-independence pivot: the full (unweighted) eigenbasis sum must
  // reproduce the delta-basis value sum_x w_x |P_x|^2
  if (std::abs(unweighted - rep.delta_route) > 1e-10 * std::max(1.0, rep.delta_route))
    throw std::runtime_error("spectral_average: eigenbasis and delta-basis routes disagree");

  // |period|^2/(phi,phi) = K * L(1/2)/L(1,Ad) with K = waldspurger_constant;
  // the classical period ell differs from the adelic one by vol(A^x E^x \ A_E^x)/h
  // = 2 L(1,eta)/h per ideal class, and the adelic (phi,phi) carries the total
  // mass normalization vol(G(F)\G(A))/mass = 24/phi(N).
  {
    ClassGroup pic(E);
    double h = static_cast<double>(pic.h());
    double l1 = h / (E.u * std::sqrt(static_cast<double>(E.d_abs)));
    double phi_n = 1.0;
    for (i64 p : prime_divisors(X.n_level)) phi_n *= static_cast<double>(p - 1);
    double K = waldspurger_constant(X.n_level, E, omega, 1, 0);
    rep.l_average = (4.0 * l1 * l1 / (h * h)) * (phi_n / 24.0) / K * rep.raw_period_sum;
  }
  return rep;
}

double waldspurger_constant(i64 N, const QuadField& E, const ClassCharacter& omega, int k, int m,
                            bool petersson) {
  if (std::abs(m) >= k) throw std::invalid_argument("waldspurger_constant: need |m| < k");
  if (omega.conductor_c != 1)
    throw std::invalid_argument("waldspurger_constant: ramified Omega branch unsupported");
  double d = static_cast<double>(E.d_abs);
  // the partial product L_{S(Omega)}(1, eta) over the ramified places of Omega
  // is empty (= 1) for an unramified Omega
  double c = static_cast<double>(omega.conductor_c);
  double v = (std::numbers::pi / 6.0) / (2.0 * std::sqrt(c * d));
  for (i64 p : prime_divisors(N)) v *= 1.0 - 1.0 / static_cast<double>(p);
  v *= std::tgamma(2.0 * k) / (std::numbers::pi * std::tgamma(double(k + m)) * std::tgamma(double(k - m)));
  if (petersson) v *= std::pow(2.0, 2 * k) / static_cast<double>(N);
  return v;
}

double residual_term(int k, const ClassCharacter& omega, const HeckeElement& fp,
                     const QuadField& E) {
  (void)E;  // over Q no nontrivial unramified quadratic character exists
  if (k != 1 || !omega.trivial()) return 0.0;
  double q = static_cast<double>(fp.q);
  cplx v = hecke_hat(fp, std::sqrt(q) + 1.0 / std::sqrt(q));
  return v.real();
}

}  // namespace rtf
