#include "rtf/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rtf/geomside.hpp"
#include "rtf/heckemeasure.hpp"
#include "rtf/spectralside.hpp"
#include "rtf/torusmap.hpp"

namespace rtf {

namespace {

using json = nlohmann::ordered_json;

constexpr double PI = std::numbers::pi;
constexpr double AFE_TOL = 1e-3;  // AFE-route relative tolerance (AFE-limited)

// ---------------------------------------------------------------------------
// Worker pool: rows are independent; results land at their config index, so
// the aggregate is byte-deterministic regardless of the job count.
void parallel_rows(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::string admissibility_problem(i64 D, i64 N) {
  if (D >= 0 || !is_fundamental_discriminant(D)) return "D not a negative fundamental discriminant";
  if (N < 2 || !is_squarefree(N)) return "N not squarefree > 1";
  auto ps = prime_divisors(N);
  if (ps.size() % 2 == 0) return "N has an even number of prime factors";
  QuadField E = make_field(D);
  for (i64 p : ps)
    if (eta(E, p) != -1) return "prime " + std::to_string(p) + " of N not inert in E";
  return "";
}

// "identity" -> nullopt, "T_<p>" -> the basis element f_1 at p
std::optional<HeckeElement> parse_fp(const std::string& name, i64 N) {
  if (name == "identity" || name.empty()) return std::nullopt;
  if (name.rfind("T_", 0) != 0) throw std::invalid_argument("unknown Hecke element: " + name);
  i64 p = std::stol(name.substr(2));
  if (!is_prime(p)) throw std::invalid_argument("Hecke prime must be prime: " + name);
  if (N % p == 0) throw std::invalid_argument("Hecke prime divides the level");
  return HeckeElement::basis(1, p);
}

std::string omega_name(const ClassCharacter& om, std::size_t idx) {
  if (om.trivial()) return "trivial";
  return "chi" + std::to_string(idx) + "(ord " + std::to_string(om.order()) + ")";
}

double phi_of(i64 N) {
  double v = 1;
  for (auto& [p, e] : factor(N)) {
    v *= static_cast<double>(p - 1);
    for (int i = 1; i < e; ++i) v *= static_cast<double>(p);
  }
  return v;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
};

void finish_dev(ReportRow& r, double a, double b, double tol) {
  r.abs_dev = std::abs(a - b);
  double scale = std::max(std::abs(a), std::abs(b));
  r.rel_dev = scale < 1e-8 ? 0.0 : r.abs_dev / scale;
  r.has_dev = true;
  bool ok = (std::abs(b) < 1e-8) ? (r.abs_dev <= tol) : (r.rel_dev <= tol);
  if (!ok) {
    r.pass = false;
    r.status = "fail: deviation above tolerance";
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ingestion

IngestedForm ingest_eigenform(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  auto fail = [&](long line, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
  };
  IngestedForm f;
  bool have_header = false;
  std::string line;
  long ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    if (!have_header) {
      std::istringstream ss(line);
      std::string kw1, kw2, kw3;
      if (!(ss >> kw1 >> f.level >> kw2 >> f.weight2k >> kw3 >> f.label) || kw1 != "level" ||
          kw2 != "weight" || kw3 != "label")
        fail(ln, "expected header \"level N weight 2k label STR\"");
      if (f.level < 1) fail(ln, "level must be positive");
      if (f.weight2k < 2 || f.weight2k % 2 != 0) fail(ln, "weight must be a positive even integer");
      have_header = true;
      continue;
    }
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) fail(ln, "expected data line \"n,a_n\"");
    i64 n = 0, a = 0;
    try {
      std::size_t used = 0;
      n = std::stol(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("");
      std::string rest = line.substr(comma + 1);
      a = std::stol(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("");
    } catch (...) {
      fail(ln, "expected data line \"n,a_n\" with exact integers");
    }
    if (n < 1) fail(ln, "index n must be positive");
    if (f.an.count(n)) fail(ln, "duplicate coefficient at n=" + std::to_string(n));
    f.an[n] = static_cast<double>(a);
  }
  if (!have_header) fail(ln, "missing header line");
  if (!f.an.count(1) || f.an.at(1) != 1.0)
    throw std::runtime_error(path + ": coefficients must be normalized with a_1 = 1");
  return f;
}

EigenAp to_eigenap(const IngestedForm& f, i64 n_max) {
  EigenAp g;
  g.N = f.level;
  g.k = f.weight2k / 2;
  for (i64 p : primes_up_to(n_max)) {
    auto it = f.an.find(p);
    if (it == f.an.end())
      throw std::runtime_error("coefficient coverage gap: missing a_" + std::to_string(p) +
                               " (primes up to " + std::to_string(n_max) + " required)");
    g.ap[p] = it->second;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Config

ExperimentConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig cfg;
  auto int_list = [&](const json& v) {
    std::vector<i64> out;
    if (v.is_number_integer())
      out.push_back(v.get<i64>());
    else
      for (auto& x : v) out.push_back(x.get<i64>());
    return out;
  };
  for (auto& [key, v] : j.items()) {
    if (key == "experiment")
      cfg.experiment = v.get<std::string>();
    else if (key == "D")
      cfg.D = int_list(v);
    else if (key == "N")
      cfg.N = int_list(v);
    else if (key == "k")
      cfg.k = v.get<int>();
    else if (key == "omega")
      cfg.omega = v.get<std::string>();
    else if (key == "fp")
      for (auto& x : v) cfg.fp.push_back(x.get<std::string>());
    else if (key == "tol")
      cfg.tol = v.get<double>();
    else if (key == "afe")
      cfg.afe = v.get<bool>();
    else if (key == "nmax")
      cfg.nmax = v.get<i64>();
    else if (key == "p")
      cfg.p = v.get<i64>();
    else if (key == "J") {
      cfg.J_lo = v.at(0).get<double>();
      cfg.J_hi = v.at(1).get<double>();
    } else if (key == "eps")
      cfg.eps = v.get<double>();
    else if (key == "ingest")
      cfg.ingest = v.get<std::string>();
    else if (key == "jobs")
      cfg.jobs = v.get<int>();
    else if (key == "seed")
      cfg.seed = v.get<long>();
    else
      throw std::invalid_argument("config: unknown key \"" + key + "\"");
  }
  if (cfg.experiment.empty()) throw std::invalid_argument("config: missing \"experiment\"");
  if (cfg.fp.empty()) cfg.fp.push_back("identity");
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["D"] = cfg.D;
  j["N"] = cfg.N;
  j["k"] = cfg.k;
  j["omega"] = cfg.omega;
  j["fp"] = cfg.fp;
  j["tol"] = cfg.tol;
  j["afe"] = cfg.afe;
  j["nmax"] = cfg.nmax;
  j["p"] = cfg.p;
  j["J"] = {cfg.J_lo, cfg.J_hi};
  j["eps"] = cfg.eps;
  j["ingest"] = cfg.ingest;
  j["jobs"] = cfg.jobs;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Row primitives

double plancherel_interval(i64 p, double lo, double hi) {
  lo = std::max(lo, -2.0);
  hi = std::min(hi, 2.0);
  if (lo >= hi) return 0.0;
  MeasureSpec mu = plancherel_measure(p);
  // x = 2 cos(theta) kills the endpoint square roots; fixed-order composite
  // Simpson on theta keeps the pipeline deterministic
  const double a = std::acos(hi / 2.0), b = std::acos(lo / 2.0);
  const int n = 2000;  // even
  const double h = (b - a) / n;
  auto g = [&](double th) {
    double x = 2.0 * std::cos(th);
    return mu.density(x) * 2.0 * std::sin(th);
  };
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

double equidist_limit_constant(i64 p, const QuadField& E, int k, int m) {
  ClassGroup pic(E);
  double l1 = static_cast<double>(pic.h()) / (E.u * std::sqrt(static_cast<double>(E.d_abs)));
  double lp = l1 * (1.0 - static_cast<double>(eta(E, p)) / static_cast<double>(p));
  double binom = std::tgamma(2.0 * k - 1.0) /
                 (std::tgamma(static_cast<double>(k + m)) * std::tgamma(static_cast<double>(k - m)));
  double l2p = 1.0 / (1.0 - std::pow(static_cast<double>(p), -2.0));
  return 2.0 / binom * lp * l2p;
}

double euler_factor_removal(i64 p, double bp, const QuadField& E, const ClassGroup& pic,
                            const ClassCharacter& omega) {
  const double x = 1.0 / std::sqrt(static_cast<double>(p));
  cplx a = [&] {
    cplx half = 0.5 * bp;
    return half + std::sqrt(half * half - cplx(1.0));
  }();
  cplx a2 = a * a;
  // c4 = inverse local factor of L(s, pi_E x Omega) at s = 1/2
  cplx c4;
  int e = eta(E, p);
  if (e == -1) {
    c4 = (1.0 - a2 * x * x) * (1.0 - x * x / a2);
  } else {
    auto ids = ideals_of_norm(pic, p);
    if (ids.empty()) throw std::runtime_error("euler_factor_removal: no ideal above p");
    cplx om = omega.value(ids[0].class_index);
    if (e == 0)
      c4 = (1.0 - a * om * x) * (1.0 - om / a * x);
    else
      c4 = (1.0 - a * om * x) * (1.0 - a * std::conj(om) * x) * (1.0 - om / a * x) *
           (1.0 - std::conj(om) / a * x);
  }
  // c3 = inverse local factor of L(s, pi, Ad) at s = 1
  const double ip = 1.0 / static_cast<double>(p);
  cplx c3 = (1.0 - a2 * ip) * (1.0 - ip) * (1.0 - ip / a2);
  cplx r = c4 / c3;
  if (std::abs(r.imag()) > 1e-9 * std::max(1.0, std::abs(r)))
    throw std::runtime_error("euler_factor_removal: non-real correction");
  return r.real();
}

double classical_afe_value(const std::vector<EigenAp>& forms, i64 D, i64 nmax) {
  if (forms.empty()) return 0.0;
  QuadField E = make_field(D);
  const int k = forms.front().k;
  const i64 N = forms.front().N;
  double factor = std::tgamma(2.0 * k - 1.0) * E.u * std::sqrt(static_cast<double>(E.d_abs)) /
                  (2.0 * PI * std::pow(4.0 * PI, 2.0 * k - 1.0));
  double total = 0;
  for (const auto& f : forms) {
    if (f.k != k || f.N != N)
      throw std::invalid_argument("classical_afe_value: mixed levels or weights");
    i64 n2 = nmax ? nmax : default_nmax(static_cast<double>(N));
    i64 n2t = nmax ? nmax
                   : default_nmax(static_cast<double>(N) * static_cast<double>(D) * D);
    i64 n3 = nmax ? nmax : default_nmax(static_cast<double>(N) * N);
    auto Lf = build_lseries(LKind::newform, f, 0, nullptr, nullptr, n2);
    auto Lt = build_lseries(LKind::newform_twist, f, D, nullptr, nullptr, n2t);
    double ff = petersson_norm(f, n3);
    total += factor * afe_value(Lf, 0.5).finite.real() * afe_value(Lt, 0.5).finite.real() / ff;
  }
  return total;
}

ReportRow average_row(i64 D, i64 N, std::size_t omega_index, const std::string& fp_name,
                      double tol, bool with_afe, i64 nmax) {
  Timer timer;
  ReportRow r;
  r.experiment = "verify-average";
  r.D = D;
  r.N = N;
  r.k = 1;
  r.fp = fp_name.empty() ? "identity" : fp_name;
  try {
    if (auto why = admissibility_problem(D, N); !why.empty()) {
      r.status = "skip: " + why;
      r.omega = "-";
      r.time_ms = timer.ms();
      return r;
    }
    QuadField E = make_field(D);
    ClassGroup pic(E);
    auto oms = characters(pic);
    if (omega_index >= oms.size()) {
      r.status = "skip: character index out of range";
      r.omega = "-";
      r.time_ms = timer.ms();
      return r;
    }
    const ClassCharacter& omega = oms[omega_index];
    r.omega = omega_name(omega, omega_index);
    std::optional<HeckeElement> fp;
    try {
      fp = parse_fp(fp_name, N);
    } catch (const std::exception& ex) {
      r.status = std::string("skip: ") + ex.what();
      r.time_ms = timer.ms();
      return r;
    }

    if (fp) {
      // with a Hecke weight the effective stability bound is |D| c q^n; below
      // it regular orbits appear and the weighted regular sum is out of scope
      GeomConfig probe{N, E, &pic, omega, 1, 0, 1, fp};
      if (!regular_support(probe).empty()) {
        r.status = "skip: weighted configuration below the stability range";
        r.time_ms = timer.ms();
        return r;
      }
    }

    auto [R, emb] = find_embedded_order(maximal_order(build_algebra(N), N), E);
    ClassSet X = right_ideal_classes(R);
    PeriodData pd = iota_map(emb, pic, X);
    SpectralReport rep = spectral_average(X, pd, omega, E, fp);

    const double h = static_cast<double>(pic.h());
    const double l1 = h / (E.u * std::sqrt(static_cast<double>(E.d_abs)));
    r.spectral = (4.0 * l1 * l1 / (h * h)) * rep.eigen_route;
    r.has_spectral = true;

    GeomConfig g{N, E, &pic, omega, 1, 0, 1, fp};
    r.geometric = geometric_total(g).total;
    r.has_geometric = true;
    finish_dev(r, r.spectral, r.geometric, tol);

    if (!fp) {
      // classical normalization; the closed-form reference (h, or the
      // Eisenstein-corrected h for trivial Omega) holds in the stability
      // range N > |D| c(Omega) where the geometric side is irregular-only
      r.classical = E.u * std::sqrt(static_cast<double>(E.d_abs)) / (2.0 * N) * rep.l_average;
      r.has_classical = true;
      if (N <= E.d_abs) {
        r.time_ms = timer.ms();
        return r;
      }
      r.reference = omega.trivial() ? h * (1.0 - 12.0 * h / (E.u * phi_of(N))) : h;
      r.has_reference = true;
      double abs_c = std::abs(r.classical - r.reference);
      bool ok = (std::abs(r.reference) < 1e-8)
                    ? (abs_c <= tol)
                    : (abs_c / std::abs(r.reference) <= tol);
      if (!ok) {
        r.pass = false;
        r.status = "fail: classical value off its closed-form reference";
      }
      if (with_afe) {
        i64 needed = nmax ? nmax : default_nmax(static_cast<double>(N) * D * D);
        std::vector<i64> primes;
        for (i64 p : primes_up_to(needed))
          if (N % p != 0) primes.push_back(p);
        EigenData ed = eigen_decompose(X, primes);
        std::vector<EigenAp> forms;
        for (auto& f : ed.cusp_forms) {
          EigenAp g2;
          g2.N = N;
          g2.k = 1;
          g2.ap = f.ap;
          forms.push_back(std::move(g2));
        }
        r.afe = classical_afe_value(forms, D, nmax);
        r.has_afe = true;
        double abs_a = std::abs(r.afe - r.reference);
        bool ok_a = (std::abs(r.reference) < 1e-8)
                        ? (abs_a <= AFE_TOL)
                        : (abs_a / std::abs(r.reference) <= AFE_TOL);
        if (!ok_a) {
          r.pass = false;
          r.status = "fail: AFE route off the reference";
        }
      }
    }
  } catch (const std::exception& ex) {
    r.pass = false;
    r.status = std::string("fail: ") + ex.what();
  }
  r.time_ms = timer.ms();
  return r;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

std::vector<std::size_t> select_omegas(const std::string& sel, std::size_t h) {
  if (sel == "trivial" || sel.empty()) return {0};
  if (sel == "all") {
    std::vector<std::size_t> out(h);
    for (std::size_t i = 0; i < h; ++i) out[i] = i;
    return out;
  }
  if (sel.rfind("index:", 0) == 0) {
    std::size_t i = std::stoul(sel.substr(6));
    if (i >= h) throw std::invalid_argument("omega index out of range");
    return {i};
  }
  throw std::invalid_argument("unknown omega selector: " + sel);
}

}  // namespace

RunReport verify_average(const ExperimentConfig& cfg) {
  RunReport out;
  out.cfg = cfg;
  struct Task {
    i64 D, N;
    std::size_t om;
    std::string fp;
  };
  std::vector<Task> tasks;
  for (i64 D : cfg.D)
    for (i64 N : cfg.N) {
      std::size_t h = 1;
      if (admissibility_problem(D, N).empty()) h = static_cast<std::size_t>(ClassGroup(make_field(D)).h());
      for (std::size_t om : select_omegas(cfg.omega, h))
        for (const auto& fp : cfg.fp) tasks.push_back({D, N, om, fp});
    }
  out.rows.resize(tasks.size());
  parallel_rows(tasks.size(), cfg.jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    out.rows[i] = average_row(t.D, t.N, t.om, t.fp, cfg.tol, cfg.afe, cfg.nmax);
  });
  return out;
}

RunReport equidist_report(const ExperimentConfig& cfg) {
  RunReport out;
  out.cfg = cfg;
  if (cfg.D.size() != 1) throw std::invalid_argument("equidist: exactly one D required");
  const i64 D = cfg.D[0], p = cfg.p;
  QuadField E = make_field(D);
  std::vector<i64> levels = cfg.N;
  if (levels.empty())
    for (i64 q : primes_up_to(300))
      if (q != p && eta(E, q) == -1) levels.push_back(q);
  const double limit = equidist_limit_constant(p, E, 1, 0) *
                       plancherel_interval(p, cfg.J_lo, cfg.J_hi);
  out.rows.resize(levels.size());
  parallel_rows(levels.size(), cfg.jobs, [&](std::size_t i) {
    Timer timer;
    ReportRow r;
    r.experiment = "equidist";
    r.D = D;
    r.N = levels[i];
    r.k = 1;
    r.fp = "T_" + std::to_string(p);
    try {
      QuadField El = make_field(D);
      ClassGroup pic(El);
      auto oms = characters(pic);
      auto sel = select_omegas(cfg.omega, oms.size());
      if (sel.size() != 1) throw std::invalid_argument("equidist: one character at a time");
      const ClassCharacter& omega = oms[sel[0]];
      r.omega = omega_name(omega, sel[0]);
      if (auto why = admissibility_problem(D, r.N); !why.empty() || r.N % p == 0) {
        r.status = "skip: " + (why.empty() ? "level divisible by p" : why);
        r.time_ms = timer.ms();
        out.rows[i] = r;
        return;
      }
      auto [R, emb] = find_embedded_order(maximal_order(build_algebra(r.N), r.N), El);
      ClassSet X = right_ideal_classes(R);
      PeriodData pd = iota_map(emb, pic, X);
      auto P = period_vector(pd, omega);
      EigenData ed = eigen_decompose(X, {p});
      const double h = static_cast<double>(pic.h());
      const double l1 = h / (El.u * std::sqrt(static_cast<double>(El.d_abs)));
      const double K = waldspurger_constant(r.N, El, omega, 1, 0);
      const double cst = (4.0 * l1 * l1 / (h * h)) * (phi_of(r.N) / 24.0) / K;
      double sum = 0;
      for (auto& f : ed.cusp_forms) {
        cplx ell = 0;
        for (std::size_t x = 0; x < f.phi.size(); ++x) ell += f.phi[x] * P[x];
        double bp = f.ap.at(p) / std::sqrt(static_cast<double>(p));
        if (bp < cfg.J_lo || bp > cfg.J_hi) continue;
        sum += cst * std::norm(ell) * euler_factor_removal(p, bp, El, pic, omega);
      }
      r.spectral = sum / static_cast<double>(r.N);
      r.has_spectral = true;
      r.reference = limit;
      r.has_reference = true;
    } catch (const std::exception& ex) {
      r.pass = false;
      r.status = std::string("fail: ") + ex.what();
    }
    r.time_ms = timer.ms();
    out.rows[i] = r;
  });
  // trend estimator: the running mean of the per-level values over the
  // admissible list (classical column); its deviation from the limit is the
  // quantity the decreasing-majority trend is read from. No per-row gate: the
  // limit is asymptotic.
  double acc = 0;
  int cnt = 0;
  for (auto& r : out.rows) {
    if (!r.has_spectral) continue;
    acc += r.spectral;
    ++cnt;
    r.classical = acc / cnt;
    r.has_classical = true;
    r.abs_dev = std::abs(r.classical - r.reference);
    r.rel_dev = r.abs_dev / std::max(std::abs(r.reference), 1e-300);
    r.has_dev = true;
  }
  return out;
}

RunReport subconvexity_scan(const ExperimentConfig& cfg) {
  RunReport out;
  out.cfg = cfg;
  struct Task {
    i64 D, N;
    std::size_t om;
  };
  std::vector<Task> tasks;
  for (i64 D : cfg.D)
    for (i64 N : cfg.N) {
      std::size_t h = 1;
      if (admissibility_problem(D, N).empty()) h = static_cast<std::size_t>(ClassGroup(make_field(D)).h());
      for (std::size_t om : select_omegas(cfg.omega, h)) tasks.push_back({D, N, om});
    }
  out.rows.resize(tasks.size());
  const double eps = cfg.eps;
  parallel_rows(tasks.size(), cfg.jobs, [&](std::size_t i) {
    Timer timer;
    const Task& t = tasks[i];
    ReportRow r;
    r.experiment = "subconvexity";
    r.D = t.D;
    r.N = t.N;
    r.k = 1;
    r.fp = "identity";
    try {
      if (auto why = admissibility_problem(t.D, t.N); !why.empty()) {
        r.omega = "-";
        r.status = "skip: " + why;
        r.time_ms = timer.ms();
        out.rows[i] = r;
        return;
      }
      QuadField E = make_field(t.D);
      ClassGroup pic(E);
      auto oms = characters(pic);
      const ClassCharacter& omega = oms[t.om];
      r.omega = omega_name(omega, t.om);
      auto [R, emb] = find_embedded_order(maximal_order(build_algebra(t.N), t.N), E);
      ClassSet X = right_ideal_classes(R);
      PeriodData pd = iota_map(emb, pic, X);
      SpectralReport rep = spectral_average(X, pd, omega, E);
      double A = rep.l_average;  // sum of L(1/2)/L(1,Ad) over the family
      double maxform = 0;
      double cst = rep.raw_period_sum > 0 ? rep.l_average / rep.raw_period_sum : 0.0;
      for (double s : rep.summands) maxform = std::max(maxform, cst * s);
      if (maxform > A * (1.0 + 1e-12)) throw std::runtime_error("positivity violated");
      // L(1, Ad) proxy log-bound turns the ratio bound into a value bound
      r.geometric = A;
      r.has_geometric = true;
      r.spectral = maxform * (std::log(static_cast<double>(t.N)) + 2.0);
      r.has_spectral = true;
      // c(Omega) = 1 throughout (unramified class characters); the fitted-C
      // comparison is filled in by the aggregation pass below
      r.classical = std::pow(static_cast<double>(t.N), 1.0 + eps) +
                    std::pow(static_cast<double>(t.N), eps);
      r.has_classical = true;
    } catch (const std::exception& ex) {
      r.pass = false;
      r.status = std::string("fail: ") + ex.what();
    }
    r.time_ms = timer.ms();
    out.rows[i] = r;
  });
  double C = 0;
  for (auto& r : out.rows)
    if (r.has_spectral && r.has_classical) C = std::max(C, r.spectral / r.classical);
  for (auto& r : out.rows) {
    if (!r.has_spectral || !r.has_classical) continue;
    r.reference = C * r.classical;
    r.has_reference = true;
    r.abs_dev = std::abs(r.spectral - r.reference);
    r.rel_dev = r.abs_dev / std::max(std::abs(r.reference), 1e-300);
    r.has_dev = true;
    if (r.spectral > r.reference * (1.0 + 1e-9)) {
      r.pass = false;
      r.status = "fail: bound above the fitted envelope";
    }
  }
  return out;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "verify-average") return verify_average(cfg);
  if (cfg.experiment == "equidist") return equidist_report(cfg);
  if (cfg.experiment == "subconvexity") return subconvexity_scan(cfg);
  throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

bool RunReport::all_pass() const {
  for (auto& r : rows)
    if (!r.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Persistence

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
  // timing is deliberately excluded: the CSV must be byte-reproducible
  std::string out =
      "experiment,D,N,k,omega,fp,spectral,geometric,classical,afe,reference,abs_dev,rel_dev,"
      "status,pass\r\n";
  for (const auto& r : rows) {
    std::vector<std::string> f{
        csv_quote(r.experiment),
        std::to_string(r.D),
        std::to_string(r.N),
        std::to_string(r.k),
        csv_quote(r.omega),
        csv_quote(r.fp),
        r.has_spectral ? fmt(r.spectral) : "",
        r.has_geometric ? fmt(r.geometric) : "",
        r.has_classical ? fmt(r.classical) : "",
        r.has_afe ? fmt(r.afe) : "",
        r.has_reference ? fmt(r.reference) : "",
        r.has_dev ? fmt(r.abs_dev) : "",
        r.has_dev ? fmt(r.rel_dev) : "",
        csv_quote(r.status),
        r.pass ? "true" : "false",
    };
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i) out += ',';
      out += f[i];
    }
    out += "\r\n";
  }
  return out;
}

std::string report_to_json(const RunReport& rep) {
  json j;
  j["config"] = json::parse(config_to_json(rep.cfg));
  j["conventions"] = {
      {"inner_product", "mass pairing <u,v> = sum_x u_x conj(v_x) / w_x on the class set"},
      {"period", "ell(h) = sum_{y in Pic(E)} Omega(y) h(iota(y))"},
      {"spectral_total", "4 L(1,eta)^2 / h^2 times the eigenbasis period sum"},
      {"classical", "u sqrt(d) / (2N) times the Waldspurger-normalized cusp sum"},
      {"gamma_data", "analytic normalization, center 1/2; Gamma_C((2k-1)/2) per degree-2 factor"},
      {"petersson", "plain integral over Gamma_0(N)\\H (no index normalization)"},
  };
  j["rows"] = json::array();
  for (const auto& r : rep.rows) {
    json row;
    row["experiment"] = r.experiment;
    row["D"] = r.D;
    row["N"] = r.N;
    row["k"] = r.k;
    row["omega"] = r.omega;
    row["fp"] = r.fp;
    if (r.has_spectral) row["spectral"] = r.spectral;
    if (r.has_geometric) row["geometric"] = r.geometric;
    if (r.has_classical) row["classical"] = r.classical;
    if (r.has_afe) row["afe"] = r.afe;
    if (r.has_reference) row["reference"] = r.reference;
    if (r.has_dev) {
      row["abs_dev"] = r.abs_dev;
      row["rel_dev"] = r.rel_dev;
    }
    row["time_ms"] = r.time_ms;
    row["status"] = r.status;
    row["pass"] = r.pass;
    j["rows"].push_back(std::move(row));
  }
  j["all_pass"] = rep.all_pass();
  return j.dump(2);
}

void write_report(const RunReport& rep, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream f(fs::path(out_dir) / (rep.cfg.experiment + ".csv"), std::ios::binary);
    f << rows_to_csv(rep.rows);
  }
  {
    std::ofstream f(fs::path(out_dir) / (rep.cfg.experiment + ".json"), std::ios::binary);
    f << report_to_json(rep) << "\n";
  }
}

}  // namespace rtf
