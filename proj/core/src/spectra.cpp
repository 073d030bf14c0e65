#include "hypoindex/spectra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hypoindex/banded.hpp"
#include "hypoindex/errors.hpp"

namespace hypoindex {

std::string family_name(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::AEven: return "A-even";
    case Family::B: return "B";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "A") return Family::A;
  if (name == "A-even" || name == "Aeven" || name == "A_even") return Family::AEven;
  if (name == "B") return Family::B;
  throw std::invalid_argument("unknown family '" + name + "'");
}

int ModelOperatorSpec::power() const {
  switch (family) {
    case Family::A: return (k + 1) / 2;
    case Family::AEven: return k + 1;
    case Family::B: return (k + 2) / 4;
  }
  return 0;
}

int ModelOperatorSpec::base_order() const { return family == Family::B ? 4 : 2; }

void ModelOperatorSpec::validate() const {
  if (k < 1) throw std::invalid_argument("model operator: k must be >= 1");
  if (c == 0.0) throw std::invalid_argument("model operator: leading coefficient c must be nonzero");
  if (family == Family::A && k % 2 == 0)
    throw std::invalid_argument("family A requires odd vanishing order k, got k=" +
                                std::to_string(k));
  if (family == Family::B && (k + 2) % 4 != 0)
    throw std::invalid_argument("family B requires 4 | (k+2), got k=" + std::to_string(k));
}

namespace {

// ---------------------------------------------------------------------------
// oscillator-eigenbasis Galerkin side
// ---------------------------------------------------------------------------

// General banded real matrix, diagonals -bw..bw. Small sizes only.
struct GeneralBanded {
  int n = 0, bw = 0;
  std::vector<std::vector<double>> diag;  // diag[b + bw][i] = A(i, i + b)

  double get(int i, int j) const {
    int b = j - i;
    if (std::abs(b) > bw || i < 0 || i >= n || j < 0 || j >= n) return 0.0;
    return diag[b + bw][i];
  }
  void set(int i, int j, double v) { diag[j - i + bw][i] = v; }
  static GeneralBanded zeros(int n, int bw) {
    GeneralBanded g;
    g.n = n;
    g.bw = bw;
    g.diag.assign(2 * bw + 1, std::vector<double>(n, 0.0));
    return g;
  }
};

GeneralBanded banded_multiply(const GeneralBanded& A, const GeneralBanded& B) {
  GeneralBanded C = GeneralBanded::zeros(A.n, A.bw + B.bw);
  for (int i = 0; i < A.n; ++i) {
    for (int b = -C.bw; b <= C.bw; ++b) {
      int j = i + b;
      if (j < 0 || j >= A.n) continue;
      double s = 0;
      int lo = std::max({0, i - A.bw, j - B.bw});
      int hi = std::min({A.n - 1, i + A.bw, j + B.bw});
      for (int l = lo; l <= hi; ++l) s += A.get(i, l) * B.get(l, j);
      C.set(i, j, s);
    }
  }
  return C;
}

// Matrices of z and d/dz in the unit harmonic-oscillator eigenbasis.
GeneralBanded position_matrix(int n) {
  GeneralBanded Z = GeneralBanded::zeros(n, 1);
  for (int m = 0; m + 1 < n; ++m) {
    double v = std::sqrt((m + 1) / 2.0);
    Z.set(m, m + 1, v);
    Z.set(m + 1, m, v);
  }
  return Z;
}

GeneralBanded derivative_matrix(int n) {
  GeneralBanded D = GeneralBanded::zeros(n, 1);
  for (int m = 0; m + 1 < n; ++m) {
    double v = std::sqrt((m + 1) / 2.0);
    D.set(m, m + 1, v);
    D.set(m + 1, m, -v);
  }
  return D;
}

double hermite_scale(int k, double c, int order) {
  // dimensional balance of the derivative term against c^2 z^{2k}
  return order == 2 ? std::pow(std::abs(c), 1.0 / (k + 1))
                    : std::pow(std::abs(c), 1.0 / (k + 2));
}

}  // namespace

std::vector<double> hermite_lowest_eigenvalues(int k, double c, int order, int count, int basis) {
  const int margin = 2 * k + 8;
  const int nb = basis + margin;
  GeneralBanded Z = position_matrix(nb);
  GeneralBanded D1 = derivative_matrix(nb);
  GeneralBanded D2 = banded_multiply(D1, D1);
  GeneralBanded V = Z;
  for (int j = 1; j < 2 * k; ++j) V = banded_multiply(V, Z);

  const double s = hermite_scale(k, c, order);
  const double vs = c * c * std::pow(s, -2.0 * k);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(basis, basis);
  if (order == 2) {
    const int bw = std::max(V.bw, D2.bw);
    for (int i = 0; i < basis; ++i)
      for (int j = std::max(0, i - bw); j <= std::min(basis - 1, i + bw); ++j)
        H(i, j) = -(s * s) * D2.get(i, j) + vs * V.get(i, j);
  } else {
    GeneralBanded D4 = banded_multiply(D2, D2);
    double s4 = s * s * s * s;
    const int bw = std::max(V.bw, D4.bw);
    for (int i = 0; i < basis; ++i)
      for (int j = std::max(0, i - bw); j <= std::min(basis - 1, i + bw); ++j)
        H(i, j) = s4 * D4.get(i, j) + vs * V.get(i, j);
  }
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

namespace {

std::vector<double> fd_lowest_impl(int k, double c, int order, int count, double half_width,
                                   int grid, const std::vector<double>* hints,
                                   double tol = 1e-9) {
  const double R = half_width;
  const int n = grid;
  const double h = 2.0 * R / (n + 1);
  std::vector<double> potential(n);
  for (int i = 0; i < n; ++i) {
    double z = -R + h * (i + 1);
    potential[i] = c * c * std::pow(z, 2 * k);
  }
  double vmax = potential[0];  // boundary values dominate (even potential)
  const double rel_width = 1e-13;

  if (order == 2) {
    std::vector<double> a(n), b(n - 1, -1.0 / (h * h));
    for (int i = 0; i < n; ++i) a[i] = 2.0 / (h * h) + potential[i];
    TridiagLDLT f = factor_pd_tridiag(a, b);
    MultiCounter counter = [&](const std::vector<double>& sigmas, std::vector<int>& counts) {
      count_below_ldlt_multi(f, sigmas, counts);
    };
    return lowest_by_counting(counter, count, 0.0, vmax + 10.0, rel_width, hints);
  }

  // order 4: A = K^2 + V with K the 3-point -d2 matrix (5-point interior
  // stencil). The formed pentadiagonal serves only as a Cholesky
  // preconditioner for subspace iteration; Ritz values come from the
  // factored quadratic form ||K x||^2 + x^T V x, which sidesteps the
  // eps/h^4 cancellation of the formed matrix.
  (void)vmax;
  (void)rel_width;
  (void)hints;
  const double kd = 2.0 / (h * h), ko = -1.0 / (h * h);
  SymmetricBanded penta;
  penta.n = n;
  penta.bw = 2;
  penta.band.assign(3, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    double diag = kd * kd + ko * ko * ((i > 0 ? 1 : 0) + (i + 1 < n ? 1 : 0));
    penta.band[0][i] = diag + potential[i];
    if (i + 1 < n) penta.band[1][i] = 2.0 * kd * ko;
    if (i + 2 < n) penta.band[2][i] = ko * ko;
  }
  double norm_est = std::abs(kd * kd + 2 * ko * ko) + 2 * std::abs(2 * kd * ko) +
                    2 * ko * ko + potential[0];
  BandedCholesky chol = [&] {
    double shift = 0;
    for (int attempt = 0; attempt < 24; ++attempt) {
      try {
        return BandedCholesky::factor(penta, shift);
      } catch (const std::runtime_error&) {
        shift = shift == 0 ? 2 * 2.2e-16 * norm_est : 2 * shift;
      }
    }
    throw ConvergenceFailure(0, "order-4 preconditioner factorization failed");
  }();

  auto apply_k = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    for (int i = 0; i < n; ++i) {
      double v = kd * x(i);
      if (i > 0) v += ko * x(i - 1);
      if (i + 1 < n) v += ko * x(i + 1);
      y(i) = v;
    }
  };
  // factored application of K^2 + V
  Eigen::VectorXd tmp(n), tmp2(n);
  auto apply_a = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    apply_k(x, tmp);
    apply_k(tmp, tmp2);
    for (int i = 0; i < n; ++i) y(i) = tmp2(i) + potential[i] * x(i);
  };

  const int m = std::min(n, count + 6);
  std::mt19937_64 rng(0x5eedULL + n);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd X(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = dist(rng);

  std::vector<double> theta(count, 0.0), theta_prev(count, 1e300);
  int stable = 0;
  for (int iter = 0; iter < 300; ++iter) {
    for (int j = 0; j < m; ++j) chol.solve_inplace(X.col(j).data());
    // twice-through modified Gram-Schmidt
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < j; ++i) X.col(j) -= X.col(i).dot(X.col(j)) * X.col(i);
        double nrm = X.col(j).norm();
        if (nrm < 1e-280) {
          for (int i = 0; i < n; ++i) X(i, j) = dist(rng);
          nrm = X.col(j).norm();
        }
        X.col(j) /= nrm;
      }
    Eigen::MatrixXd AX(n, m);
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd col(n), out(n);
      col = X.col(j);
      apply_a(col, out);
      AX.col(j) = out;
    }
    Eigen::MatrixXd S = X.transpose() * AX;
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    X = (X * es.eigenvectors()).eval();
    for (int i = 0; i < count; ++i) theta[i] = es.eigenvalues()(i);

    double rel = 0;
    for (int i = 0; i < count; ++i)
      rel = std::max(rel, std::abs(theta[i] - theta_prev[i]) / std::max(1.0, std::abs(theta[i])));
    theta_prev = theta;
    if (rel < std::max(1e-13, tol / 64)) {
      if (++stable >= 2) return theta;
    } else {
      stable = 0;
    }
  }
  throw ConvergenceFailure(0, "order-4 subspace iteration did not settle");
}

}  // namespace

std::vector<double> fd_lowest_eigenvalues(int k, double c, int order, int count,
                                          double half_width, int grid) {
  return fd_lowest_impl(k, c, order, count, half_width, grid, nullptr);
}

namespace {

struct LadderResult {
  std::vector<double> values;
  std::vector<double> last_change;
  int resolution = 0;
  double half_width = 0;
};

bool changes_small(const std::vector<double>& prev, const std::vector<double>& cur, double tol,
                   std::vector<double>* change) {
  bool ok = true;
  change->resize(cur.size());
  for (size_t i = 0; i < cur.size(); ++i) {
    double d = std::abs(cur[i] - prev[i]);
    (*change)[i] = d;
    if (d > 0.25 * tol * std::max(1.0, std::abs(cur[i]))) ok = false;
  }
  return ok;
}

LadderResult hermite_ladder(int k, double c, int order, int count, double tol,
                            const SolverLimits& lim) {
  LadderResult r;
  std::vector<double> prev;
  for (int nb = std::max(lim.galerkin_initial, count + 8); nb <= lim.galerkin_max; nb *= 2) {
    std::vector<double> cur = hermite_lowest_eigenvalues(k, c, order, count, nb);
    if (!prev.empty() && changes_small(prev, cur, tol, &r.last_change)) {
      r.values = cur;
      r.resolution = nb;
      return r;
    }
    prev = std::move(cur);
    r.resolution = nb;
  }
  double worst = 0;
  for (double d : r.last_change) worst = std::max(worst, d);
  throw ConvergenceFailure(worst, "oscillator-basis refinement stalled at basis " +
                                      std::to_string(r.resolution) + " (change " +
                                      std::to_string(worst) + ")");
}

LadderResult fd_ladder(int k, double c, int order, int count, double tol, double mu_estimate,
                       const SolverLimits& lim) {
  // Domain from potential dominance: c^2 R^{2k} >= 4 * mu_estimate, with a
  // floor of a few natural oscillator lengths.
  const double mu = std::max(mu_estimate, 1.0);
  double s = hermite_scale(k, c, order);
  double R = std::pow(4.0 * mu / (c * c), 1.0 / (2.0 * k));
  R = std::max(R, 3.0 / s);

  // Dominance alone leaves the Dirichlet wall only two turning points out,
  // where the eigenfunction tail can still exceed a tight tolerance. Grow R
  // until the Agmon integral of the tail beats the requested accuracy.
  const double z_turn = std::pow(mu / (c * c), 1.0 / (2.0 * k));
  auto agmon = [&](double r) {
    const int steps = 400;
    double acc = 0, h = (r - z_turn) / steps;
    for (int i = 0; i < steps; ++i) {
      double z = z_turn + (i + 0.5) * h;
      double gap = std::max(c * c * std::pow(z, 2.0 * k) - mu, 0.0);
      acc += (order == 2 ? std::sqrt(gap) : std::pow(gap, 0.25) / std::sqrt(2.0)) * h;
    }
    return acc;
  };
  const double target = 0.5 * std::log(4.0 / tol) + 4.0;
  for (int it = 0; it < 200 && agmon(R) < target; ++it) R *= 1.15;

  LadderResult r;
  r.half_width = R;
  const bool debug = std::getenv("HYPOINDEX_DEBUG") != nullptr;
  const int max_grid = order == 4 ? std::min(lim.fd_max_grid, lim.fd_max_grid_order4)
                                  : lim.fd_max_grid;
  std::vector<double> prev;
  int n = lim.fd_initial_grid;
  bool jumped = false;
  while (n <= max_grid) {
    std::vector<double> cur =
        fd_lowest_impl(k, c, order, count, R, n, prev.empty() ? nullptr : &prev, tol);
    if (!prev.empty()) {
      bool ok = changes_small(prev, cur, tol, &r.last_change);
      if (debug) {
        double worst = 0;
        for (double d : r.last_change) worst = std::max(worst, d);
        std::fprintf(stderr, "[fd_ladder] n=%d worst_change=%.3e ok=%d v0=%.12f\n", n, worst,
                     ok ? 1 : 0, cur[0]);
      }
      if (ok) {
        r.values = cur;
        r.resolution = n;
        return r;
      }
      if (!jumped) {
        // one geometric jump toward the h^2-predicted target, then verify by
        // plain doubling so the final pair of refinements is adjacent
        jumped = true;
        double need = 1.0;
        for (size_t i = 0; i < cur.size(); ++i) {
          double goal = 0.25 * tol * std::max(1.0, std::abs(cur[i]));
          if (goal > 0) need = std::max(need, r.last_change[i] / goal);
        }
        int doublings = static_cast<int>(std::ceil(0.5 * std::log2(std::max(need, 1.0))));
        doublings = std::clamp(doublings - 1, 0, 8);
        for (int j = 0; j < doublings && n * 2 <= max_grid; ++j) n *= 2;
      }
    }
    prev = std::move(cur);
    r.resolution = n;
    n *= 2;
  }
  double worst = 0;
  for (double d : r.last_change) worst = std::max(worst, d);
  throw ConvergenceFailure(worst, "finite-difference refinement stalled at grid " +
                                      std::to_string(r.resolution) + " (change " +
                                      std::to_string(worst) + ")");
}

// ---------------------------------------------------------------------------
// cache
// ---------------------------------------------------------------------------

struct CacheEntry {
  int count = 0;
  Spectrum spectrum;
};

std::mutex cache_mutex;
std::map<std::string, CacheEntry> memory_cache;

std::string cache_key(int k, double c, int order, double tol) {
  char buf[128];
  // |c| suffices: the potential depends on c^2 only
  std::snprintf(buf, sizeof(buf), "k%d_o%d_c%.12e_t%.3e", k, order, std::abs(c), tol);
  return buf;
}

std::optional<std::string> cache_directory(const SolverLimits& lim) {
  if (lim.cache_dir.has_value()) return lim.cache_dir;
  if (const char* env = std::getenv("HYPOINDEX_CACHE_DIR"); env && *env)
    return std::string(env);
  return std::nullopt;
}

void spectrum_to_stream(std::ostream& os, const CacheEntry& e) {
  os.precision(17);
  os << e.count << "\n" << e.spectrum.truncation_bound << " " << e.spectrum.method_agreement
     << " " << e.spectrum.fd_grid << " " << e.spectrum.fd_half_width << " "
     << e.spectrum.galerkin_basis << "\n";
  for (size_t i = 0; i < e.spectrum.eigenvalues.size(); ++i)
    os << e.spectrum.eigenvalues[i] << " " << e.spectrum.error_bounds[i] << " "
       << e.spectrum.fd_values[i] << "\n";
}

std::optional<CacheEntry> spectrum_from_stream(std::istream& is) {
  CacheEntry e;
  if (!(is >> e.count)) return std::nullopt;
  if (!(is >> e.spectrum.truncation_bound >> e.spectrum.method_agreement >> e.spectrum.fd_grid >>
        e.spectrum.fd_half_width >> e.spectrum.galerkin_basis))
    return std::nullopt;
  double v, b, fv;
  while (is >> v >> b >> fv) {
    e.spectrum.eigenvalues.push_back(v);
    e.spectrum.error_bounds.push_back(b);
    e.spectrum.fd_values.push_back(fv);
  }
  if (static_cast<int>(e.spectrum.eigenvalues.size()) != e.count) return std::nullopt;
  return e;
}

}  // namespace

Spectrum base_spectrum(int k, double c, int order, int count, double tol,
                       const SolverLimits& limits) {
  if (k < 1) throw std::invalid_argument("base_spectrum: k >= 1 required");
  if (c == 0.0) throw std::invalid_argument("base_spectrum: c must be nonzero");
  if (count < 1) throw std::invalid_argument("base_spectrum: count >= 1 required");
  if (tol <= 0) throw std::invalid_argument("base_spectrum: tol > 0 required");
  if (order != 2 && order != 4) throw std::invalid_argument("base_spectrum: order must be 2 or 4");

  const std::string key = cache_key(k, c, order, tol);
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = memory_cache.find(key);
    if (it != memory_cache.end() && it->second.count >= count) {
      Spectrum s = it->second.spectrum;
      s.eigenvalues.resize(count);
      s.error_bounds.resize(count);
      s.fd_values.resize(count);
      s.truncation_bound = s.eigenvalues.back();
      return s;
    }
  }
  auto dir = cache_directory(limits);
  if (dir.has_value()) {
    std::ifstream in(*dir + "/" + key + ".spec");
    if (in) {
      auto e = spectrum_from_stream(in);
      if (e.has_value() && e->count >= count) {
        {
          std::lock_guard<std::mutex> lock(cache_mutex);
          auto it = memory_cache.find(key);
          if (it == memory_cache.end() || it->second.count < e->count) memory_cache[key] = *e;
        }
        Spectrum s = e->spectrum;
        s.eigenvalues.resize(count);
        s.error_bounds.resize(count);
        s.fd_values.resize(count);
        s.truncation_bound = s.eigenvalues.back();
        return s;
      }
    }
  }

  LadderResult gal = hermite_ladder(k, c, order, count, tol, limits);
  LadderResult fd = fd_ladder(k, c, order, count, tol, gal.values.back(), limits);

  Spectrum s;
  s.eigenvalues = gal.values;
  s.fd_values = fd.values;
  s.fd_grid = fd.resolution;
  s.fd_half_width = fd.half_width;
  s.galerkin_basis = gal.resolution;
  s.error_bounds.resize(count);
  double worst = 0;
  for (int i = 0; i < count; ++i) {
    double disc = std::abs(gal.values[i] - fd.values[i]);
    s.method_agreement = std::max(s.method_agreement, disc);
    double tol_i = tol * std::max(1.0, std::abs(gal.values[i]));
    if (disc >= tol_i) worst = std::max(worst, disc);
    s.error_bounds[i] = std::max({disc, gal.last_change.empty() ? 0.0 : gal.last_change[i],
                                  fd.last_change.empty() ? 0.0 : fd.last_change[i]});
  }
  if (worst > 0)
    throw ConvergenceFailure(worst, "cross-method discrepancy " + std::to_string(worst) +
                                        " above tolerance");
  s.truncation_bound = s.eigenvalues.back();

  CacheEntry entry{count, s};
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = memory_cache.find(key);
    if (it == memory_cache.end() || it->second.count < count) memory_cache[key] = entry;
  }
  if (dir.has_value()) {
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    std::string tmp = *dir + "/" + key + ".tmp", fin = *dir + "/" + key + ".spec";
    {
      std::ofstream out(tmp);
      spectrum_to_stream(out, entry);
    }
    std::filesystem::rename(tmp, fin, ec);  // idempotent write
  }
  return s;
}

Spectrum symbol_spectrum(const ModelOperatorSpec& spec, double lambda_cap, double tol,
                         const SolverLimits& limits) {
  spec.validate();
  if (lambda_cap <= 0) throw std::invalid_argument("symbol_spectrum: lambda_cap > 0 required");
  const int p = spec.power();
  const int order = spec.base_order();
  const double base_tol = tol / p;

  int count = 8;
  Spectrum base;
  for (;;) {
    base = base_spectrum(spec.k, spec.c, order, count, base_tol, limits);
    if (std::pow(base.eigenvalues.back(), p) > lambda_cap) break;
    if (count >= 4096)
      throw ConvergenceFailure(lambda_cap, "symbol spectrum: completeness cap not reached");
    count *= 2;
  }

  // mu -> lambda, keeping |lambda| <= cap; completeness from monotone mu.
  Spectrum out;
  out.truncation_bound = lambda_cap;
  out.fd_grid = base.fd_grid;
  out.fd_half_width = base.fd_half_width;
  out.galerkin_basis = base.galerkin_basis;
  struct Entry { double lambda, bound; };
  std::vector<Entry> entries;
  for (size_t i = 0; i < base.eigenvalues.size(); ++i) {
    double mu = base.eigenvalues[i];
    double mag = std::pow(mu, p);
    if (mag > lambda_cap) break;
    double lambda;
    if (spec.family == Family::B)
      lambda = mag;
    else
      lambda = (p % 2 == 0) ? mag : -mag;  // (-mu)^p
    double bound = p * std::pow(mu, p - 1) * base.error_bounds[i];
    out.method_agreement =
        std::max(out.method_agreement, p * std::pow(mu, p - 1) * std::abs(mu - base.fd_values[i]));
    entries.push_back({lambda, bound});
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.lambda < b.lambda; });
  for (const auto& e : entries) {
    out.eigenvalues.push_back(e.lambda);
    out.error_bounds.push_back(e.bound);
  }
  return out;
}

std::vector<double> fd_doubling_audit(int k, double c, int order, const Spectrum& s) {
  std::vector<double> doubled = fd_lowest_eigenvalues(
      k, c, order, static_cast<int>(s.fd_values.size()), s.fd_half_width, 2 * s.fd_grid);
  std::vector<double> deltas(doubled.size());
  for (size_t i = 0; i < doubled.size(); ++i) deltas[i] = std::abs(doubled[i] - s.fd_values[i]);
  return deltas;
}

}  // namespace hypoindex
