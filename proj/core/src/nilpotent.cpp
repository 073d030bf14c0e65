#include "hypoindex/nilpotent.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hypoindex/errors.hpp"
#include "hypoindex/parallel.hpp"

namespace hypoindex {

GradedNilpotentLieAlgebra::GradedNilpotentLieAlgebra(
    std::vector<Generator> basis,
    std::map<std::pair<int, int>, std::map<int, Rational>> brackets)
    : basis_(std::move(basis)) {
  const int dim = dimension();
  for (auto& [ij, terms] : brackets) {
    auto [i, j] = ij;
    if (i < 0 || j < 0 || i >= dim || j >= dim || i == j)
      throw std::invalid_argument("bracket indices out of range");
    for (auto& [l, c] : terms)
      if (l < 0 || l >= dim) throw std::invalid_argument("bracket target out of range");
    if (i < j)
      brackets_[{i, j}] = terms;
    else {
      auto& slot = brackets_[{j, i}];
      for (auto& [l, c] : terms) slot[l] = -c;
    }
  }
  verify_grading();
  verify_jacobi();
}

std::map<int, Rational> GradedNilpotentLieAlgebra::bracket(int i, int j) const {
  if (i == j) return {};
  bool flip = i > j;
  auto it = brackets_.find(flip ? std::make_pair(j, i) : std::make_pair(i, j));
  if (it == brackets_.end()) return {};
  std::map<int, Rational> out = it->second;
  if (flip)
    for (auto& [l, c] : out) c = -c;
  return out;
}

void GradedNilpotentLieAlgebra::verify_grading() const {
  for (const auto& [ij, terms] : brackets_) {
    auto [i, j] = ij;
    for (const auto& [l, c] : terms) {
      if (c.is_zero()) continue;
      if (basis_[l].weight != basis_[i].weight + basis_[j].weight)
        throw std::logic_error("grading violated: [" + basis_[i].name + "," + basis_[j].name +
                               "] hits " + basis_[l].name);
    }
  }
}

void GradedNilpotentLieAlgebra::verify_jacobi() const {
  const int dim = dimension();
  // [[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j] = 0, exactly
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      for (int l = j + 1; l < dim; ++l) {
        std::map<int, Rational> acc;
        auto add_nested = [&](int a, int b, int c) {
          for (const auto& [m, cab] : bracket(a, b))
            for (const auto& [t, cmc] : bracket(m, c)) acc[t] = acc[t] + cab * cmc;
        };
        add_nested(i, j, l);
        add_nested(j, l, i);
        add_nested(l, i, j);
        for (const auto& [t, c] : acc)
          if (!c.is_zero())
            throw std::logic_error("Jacobi identity fails on basis triple (" +
                                   basis_[i].name + ", " + basis_[j].name + ", " +
                                   basis_[l].name + ")");
      }
}

GradedNilpotentLieAlgebra build_model_gr(int k, int n) {
  if (k < 0 || n < 1) throw std::invalid_argument("build_model_gr: need k >= 0, n >= 1");
  std::vector<GradedNilpotentLieAlgebra::Generator> basis;
  basis.push_back({"d_x", 1});
  for (int i = 0; i <= k; ++i)
    for (int l = 1; l <= n; ++l)
      basis.push_back({"x^" + std::to_string(i) + " d_y" + std::to_string(l), k + 1 - i});
  std::map<std::pair<int, int>, std::map<int, Rational>> brackets;
  // [d_x, x^i d_{y_l}] = i x^{i-1} d_{y_l}
  for (int i = 1; i <= k; ++i)
    for (int l = 1; l <= n; ++l) {
      int src = 1 + i * n + (l - 1);
      int dst = 1 + (i - 1) * n + (l - 1);
      brackets[{0, src}][dst] = Rational(i);
    }
  return GradedNilpotentLieAlgebra(std::move(basis), std::move(brackets));
}

Covector Covector::zero(const GradedNilpotentLieAlgebra& alg) {
  Covector xi;
  xi.coords = Eigen::VectorXd::Zero(alg.dimension());
  return xi;
}

Eigen::MatrixXd coadjoint_form(const GradedNilpotentLieAlgebra& alg, const Covector& xi) {
  const int dim = alg.dimension();
  if (xi.coords.size() != dim) throw std::invalid_argument("coadjoint_form: size mismatch");
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      double v = 0;
      for (const auto& [l, c] : alg.bracket(i, j)) v += c.to_double() * xi.coords(l);
      B(i, j) = v;
      B(j, i) = -v;  // exact antisymmetry by construction
    }
  return B;
}

int orbit_dimension(const GradedNilpotentLieAlgebra& alg, const Covector& xi) {
  Eigen::MatrixXd B = coadjoint_form(alg, xi);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  if (smax < 1e-300) return 0;
  double thr = 1e-10 * smax;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > thr * 10) continue;           // clearly above
    if (sv(i) < thr / 10) break;              // clearly below: sv sorted descending
    throw RankAmbiguous(sv(i), thr, "singular value within a factor 10 of the rank threshold");
  }
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++rank;
  if (rank % 2 != 0)
    throw std::logic_error("orbit_dimension: antisymmetric rank came out odd");
  return rank;
}

MembershipResult characteristic_membership(int k, int n, const Covector& xi, double tol) {
  const int dim = 1 + n * (k + 1);
  if (xi.coords.size() != dim)
    throw std::invalid_argument("characteristic_membership: size mismatch");

  auto level = [&](int i) {
    Eigen::VectorXd v(n);
    for (int l = 1; l <= n; ++l) v(l - 1) = xi.coords(1 + i * n + (l - 1));
    return v;
  };
  double scale = 0;
  for (int i = 0; i <= k; ++i) scale = std::max(scale, level(i).cwiseAbs().maxCoeff());
  const double cut = tol * std::max(1.0, scale);

  int top = -1;  // highest level with a nonzero entry
  for (int i = k; i >= 0; --i)
    if (level(i).cwiseAbs().maxCoeff() > cut) {
      top = i;
      break;
    }

  MembershipResult res;
  if (top <= -1) {  // xi vanishes on every level: degenerate form with b = 0
    res.kind = MembershipKind::MemberDegenerate;
    res.b = Eigen::VectorXd::Zero(n);
    return res;
  }
  if (top == k) {
    bool lower_zero = true;
    for (int i = 0; i < k; ++i)
      if (level(i).cwiseAbs().maxCoeff() > cut) lower_zero = false;
    if (lower_zero && k > 0) {
      res.kind = MembershipKind::MemberDegenerate;
      res.b = level(k);
      return res;
    }
  }

  // general branch xi_{i,l} = a^i b_l: b is level 0; a seeded from the
  // highest nonzero level against its predecessor, then verified globally
  Eigen::VectorXd b = level(0);
  double a = 0.0;
  if (top > 0) {
    Eigen::VectorXd hi = level(top), lo = level(top - 1);
    int best = -1;
    double mag = cut;
    for (int l = 0; l < n; ++l)
      if (std::abs(lo(l)) > mag) {
        mag = std::abs(lo(l));
        best = l;
      }
    if (best < 0) return res;  // predecessor level vanishes but top does not
    a = hi(best) / lo(best);
  }
  double apow = 1.0;
  for (int i = 0; i <= k; ++i) {
    Eigen::VectorXd expect = apow * b;
    if ((level(i) - expect).cwiseAbs().maxCoeff() > cut * std::max(1.0, std::abs(apow)))
      return res;
    apow *= a;
  }
  res.kind = MembershipKind::Member;
  res.a = a;
  res.b = b;
  return res;
}

TheoremBReport verify_theorem_b(int k, int n, int samples, unsigned seed, int workers) {
  GradedNilpotentLieAlgebra alg = build_model_gr(k, n);
  TheoremBReport rep;
  rep.k = k;
  rep.n = n;
  rep.samples = samples;
  rep.bound = 2 * (n + 1);
  rep.all_within_bound = true;
  rep.all_even = true;

  const int chunks = std::max(1, std::min(workers * 4, samples));
  struct ChunkResult {
    std::map<int, int> hist;
    int max_dim = 0;
    bool within = true, even = true;
    int nonchar_seen = 0, nonchar_within = 0, nonchar_found = 0;
  };
  std::vector<ChunkResult> results(chunks);

  parallel_for(chunks, workers, [&](int chunk) {
    // deterministic per-chunk stream
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (chunk + 1));
    std::normal_distribution<double> dist;
    std::uniform_real_distribution<double> uni;
    ChunkResult& r = results[chunk];
    int lo = static_cast<int>(static_cast<long long>(samples) * chunk / chunks);
    int hi = static_cast<int>(static_cast<long long>(samples) * (chunk + 1) / chunks);
    for (int s = lo; s < hi; ++s) {
      Covector xi = Covector::zero(alg);
      double mode = uni(rng);
      if (mode < 0.4) {
        // general characteristic branch
        double a = 2.0 * dist(rng);
        xi.coords(0) = dist(rng);
        for (int l = 1; l <= n; ++l) {
          double bl = dist(rng);
          double apow = 1.0;
          for (int i = 0; i <= k; ++i) {
            xi.xi(i, l, n) = apow * bl;
            apow *= a;
          }
        }
      } else if (mode < 0.7) {
        // degenerate branch: only the top level occupied
        xi.coords(0) = dist(rng);
        for (int l = 1; l <= n; ++l) xi.xi(k, l, n) = dist(rng);
      } else {
        // unconstrained draw; usually not characteristic when k >= 2
        for (int i = 0; i < xi.coords.size(); ++i) xi.coords(i) = dist(rng);
        ++r.nonchar_seen;
        if (characteristic_membership(k, n, xi).kind == MembershipKind::NonMember)
          ++r.nonchar_found;
      }
      int d = orbit_dimension(alg, xi);
      ++r.hist[d];
      r.max_dim = std::max(r.max_dim, d);
      if (d > rep.bound) r.within = false;
      if (d % 2 != 0) r.even = false;
      if (mode >= 0.7 && d <= rep.bound) ++r.nonchar_within;
    }
  });

  for (const auto& r : results) {
    for (auto& [d, c] : r.hist) rep.orbit_dimension_histogram[d] += c;
    rep.max_orbit_dimension = std::max(rep.max_orbit_dimension, r.max_dim);
    rep.all_within_bound = rep.all_within_bound && r.within;
    rep.all_even = rep.all_even && r.even;
    rep.non_characteristic_examined += r.nonchar_seen;
    rep.non_characteristic_within_bound += r.nonchar_within;
    rep.non_characteristic_found += r.nonchar_found;
  }
  return rep;
}

}  // namespace hypoindex
