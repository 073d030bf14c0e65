#include "hypoindex/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hypoindex {

TridiagLDLT factor_pd_tridiag(const std::vector<double>& a, const std::vector<double>& b) {
  const int n = static_cast<int>(a.size());
  if (static_cast<int>(b.size()) != n - 1)
    throw std::invalid_argument("factor_pd_tridiag: size mismatch");
  TridiagLDLT f;
  f.d.resize(n);
  f.l.resize(n - 1);
  f.d[0] = a[0];
  for (int i = 0; i + 1 < n; ++i) {
    if (f.d[i] <= 0) throw std::invalid_argument("factor_pd_tridiag: matrix not positive definite");
    f.l[i] = b[i] / f.d[i];
    f.d[i + 1] = a[i + 1] - f.l[i] * b[i];
  }
  if (f.d[n - 1] <= 0)
    throw std::invalid_argument("factor_pd_tridiag: matrix not positive definite");
  return f;
}

namespace {

// Stationary differential qds step: given running term s and pivot d,
//   d+ = d + s,  s' = l^2 d (s / d+) - sigma.
inline double qds_pivot(double d, double& s, double l2d, double sigma) {
  double dplus = d + s;
  if (std::abs(dplus) < 1e-300) dplus = dplus < 0 ? -1e-300 : 1e-300;
  s = l2d * (s / dplus) - sigma;
  if (s > 1e200) s = 1e200;
  if (s < -1e200) s = -1e200;
  return dplus;
}

}  // namespace

int count_below_ldlt(const TridiagLDLT& f, double sigma) {
  const int n = static_cast<int>(f.d.size());
  int neg = 0;
  double s = -sigma;
  for (int i = 0; i < n; ++i) {
    double l2d = (i + 1 < n) ? f.l[i] * f.l[i] * f.d[i] : 0.0;
    if (qds_pivot(f.d[i], s, l2d, sigma) < 0) ++neg;
  }
  return neg;
}

void count_below_ldlt_multi(const TridiagLDLT& f, const std::vector<double>& sigmas,
                            std::vector<int>& counts) {
  const int n = static_cast<int>(f.d.size());
  const int m = static_cast<int>(sigmas.size());
  counts.assign(m, 0);
  constexpr int kBlock = 12;
  for (int base = 0; base < m; base += kBlock) {
    const int width = std::min(kBlock, m - base);
    double s[kBlock];
    int neg[kBlock] = {0};
    for (int j = 0; j < width; ++j) s[j] = -sigmas[base + j];
    for (int i = 0; i < n; ++i) {
      const double d = f.d[i];
      const double l2d = (i + 1 < n) ? f.l[i] * f.l[i] * d : 0.0;
      for (int j = 0; j < width; ++j) {
        if (qds_pivot(d, s[j], l2d, sigmas[base + j]) < 0) ++neg[j];
      }
    }
    for (int j = 0; j < width; ++j) counts[base + j] = neg[j];
  }
}

int inertia_below(const SymmetricBanded& A, double sigma) {
  const int n = A.n, bw = A.bw;
  std::vector<std::vector<double>> w(A.band);
  for (int i = 0; i < n; ++i) w[0][i] -= sigma;
  int neg = 0;
  double scale = 0;
  for (int b = 0; b <= bw; ++b)
    for (double v : A.band[b]) scale = std::max(scale, std::abs(v));
  const double nudge = std::max(scale, 1.0) * 1e-18;

  for (int j = 0; j < n; ++j) {
    double dj = w[0][j];
    if (std::abs(dj) < nudge * 1e-12) dj = dj < 0 ? -nudge : nudge;
    if (dj < 0) ++neg;
    int reach = std::min(bw, n - 1 - j);
    for (int r = 1; r <= reach; ++r) {
      double ljr = w[r][j] / dj;
      for (int s = r; s <= reach; ++s) {
        // A(j+s, j+r) -= l_{j+s,j} d_j l_{j+r,j}
        w[s - r][j + r] -= ljr * w[s][j];
      }
    }
  }
  return neg;
}

BandedCholesky BandedCholesky::factor(const SymmetricBanded& A, double shift) {
  BandedCholesky ch;
  ch.n = A.n;
  ch.bw = A.bw;
  ch.low.assign(A.bw + 1, std::vector<double>(A.n, 0.0));
  for (int j = 0; j < A.n; ++j) {
    double d = A.band[0][j] + shift;
    int back = std::min(A.bw, j);
    for (int b = 1; b <= back; ++b) d -= ch.low[b][j - b] * ch.low[b][j - b];
    if (d <= 0) throw std::runtime_error("banded Cholesky: nonpositive pivot");
    double lj = std::sqrt(d);
    ch.low[0][j] = lj;
    int reach = std::min(A.bw, A.n - 1 - j);
    for (int r = 1; r <= reach; ++r) {
      double v = A.band[r][j];
      for (int b = 1; b <= A.bw - r; ++b)
        if (j - b >= 0) v -= ch.low[b][j - b] * ch.low[b + r][j - b];
      ch.low[r][j] = v / lj;
    }
  }
  return ch;
}

void BandedCholesky::solve_inplace(double* x) const {
  for (int i = 0; i < n; ++i) {
    double v = x[i];
    int back = std::min(bw, i);
    for (int b = 1; b <= back; ++b) v -= low[b][i - b] * x[i - b];
    x[i] = v / low[0][i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double v = x[i];
    int reach = std::min(bw, n - 1 - i);
    for (int b = 1; b <= reach; ++b) v -= low[b][i] * x[i + b];
    x[i] = v / low[0][i];
  }
}

std::vector<double> lowest_by_counting(const MultiCounter& count_below, int count, double lo,
                                       double hi, double rel_width,
                                       const std::vector<double>* hints) {
  std::vector<double> sig(1);
  std::vector<int> cnt;

  // grow the upper bound until it provably holds all requested eigenvalues
  int guard = 0;
  for (;;) {
    sig[0] = hi;
    count_below(sig, cnt);
    if (cnt[0] >= count) break;
    hi = lo + 2.0 * (hi - lo) + 1.0;
    if (++guard > 80) throw std::runtime_error("lowest_by_counting: upper bound search failed");
  }

  std::vector<double> a(count, lo), b(count, hi);
  if (hints && !hints->empty()) {
    // verify hint brackets in one batched pass; keep only provable ones
    std::vector<double> probes;
    int usable = std::min<int>(count, static_cast<int>(hints->size()));
    std::vector<double> wlo(usable), whi(usable);
    for (int i = 0; i < usable; ++i) {
      double h = (*hints)[i];
      double w = 0.02 * std::max(1.0, std::abs(h));
      wlo[i] = std::max(lo, h - w);
      whi[i] = std::min(hi, h + w);
      probes.push_back(wlo[i]);
      probes.push_back(whi[i]);
    }
    count_below(probes, cnt);
    for (int i = 0; i < usable; ++i) {
      if (cnt[2 * i] <= i && cnt[2 * i + 1] >= i + 1) {
        a[i] = wlo[i];
        b[i] = whi[i];
      }
    }
  }

  std::vector<int> active;
  std::vector<double> mids;
  for (;;) {
    active.clear();
    mids.clear();
    for (int i = 0; i < count; ++i) {
      if (b[i] - a[i] > rel_width * std::max(1.0, 0.5 * (std::abs(a[i]) + std::abs(b[i])))) {
        active.push_back(i);
        mids.push_back(0.5 * (a[i] + b[i]));
      }
    }
    if (active.empty()) break;
    count_below(mids, cnt);
    for (size_t j = 0; j < active.size(); ++j) {
      int i = active[j];
      if (cnt[j] >= i + 1)
        b[i] = mids[j];
      else
        a[i] = mids[j];
    }
  }

  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = 0.5 * (a[i] + b[i]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hypoindex
