#include "hypoindex/index_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypoindex/errors.hpp"
#include "hypoindex/parallel.hpp"
#include "hypoindex/winding.hpp"

namespace hypoindex {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

OperatorProblem OperatorProblem::make(PeriodicFunction1D f, PeriodicFunction2D g, Family family) {
  OperatorProblem p;
  p.f = std::move(f);
  p.g = std::move(g);
  p.family = family;
  p.l = family == Family::AEven ? 2 : 1;
  return p;
}

Eigen::MatrixXcd classical_fiber_symbol(const OperatorProblem& problem, double x, double y,
                                        int xi) {
  Eigen::MatrixXcd gxy = problem.g.evaluate_matrix(x, y);
  if (problem.family == Family::AEven) return -gxy;  // sigma(g dy^2) = g (i xi)^2, |xi| = 1
  return -static_cast<double>(xi) * gxy;             // sigma(g i dy) = g i (i xi) = -xi g
}

ScalarSymbolCheck scalar_symbol_check(const OperatorProblem& problem) {
  ScalarSymbolCheck out;
  out.pass = true;
  switch (problem.family) {
    case Family::A:
    case Family::AEven:
      out.reason =
          "one-dimensional symbol is (-xi1^2 - xi2^2)^p, a power of a negative-definite "
          "quadratic; nonzero for every covector (xi1, xi2) != 0";
      break;
    case Family::B:
      out.reason =
          "one-dimensional symbol is built from xi1^4 + xi2^2 > 0 for (xi1, xi2) != 0";
      break;
  }
  return out;
}

namespace {

// sigma(D') at a fiber point: D' is minus the written perturbation, so this
// is the negative of classical_fiber_symbol. The certificate and the index
// formula both quantify over lambda I - sigma(D').
Eigen::MatrixXcd perturbation_symbol(const OperatorProblem& problem, double x, double y, int xi) {
  return -classical_fiber_symbol(problem, x, y, xi);
}

double smallest_singular_value(const Eigen::MatrixXcd& m) {
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(m.rows() - 1);
}

// min over y of smin(lambda I - sigma_{D'}(x, y, xi)): dense grid plus local
// golden-section refinement around the best cell.
struct YMinimum {
  double value;
  double y;
};

YMinimum min_over_fiber(const OperatorProblem& problem, double x, int xi, double lambda,
                        int y_grid) {
  const int r = problem.g.rank();
  auto eval = [&](double y) {
    Eigen::MatrixXcd m = -perturbation_symbol(problem, x, y, xi);
    for (int i = 0; i < r; ++i) m(i, i) += lambda;
    return smallest_singular_value(m);
  };
  int grid = y_grid;
  double best = std::numeric_limits<double>::infinity(), besty = 0;
  for (int j = 0; j < grid; ++j) {
    double y = kTwoPi * j / grid;
    double v = eval(y);
    if (v < best) {
      best = v;
      besty = y;
    }
  }
  // golden-section refine in the bracketing cell
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = besty - kTwoPi / grid, b = besty + kTwoPi / grid;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = eval(c), fd = eval(d);
  for (int it = 0; it < 90 && (b - a) > 1e-12; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = eval(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = eval(d);
    }
  }
  double ymin = 0.5 * (a + b);
  double vmin = eval(ymin);
  if (vmin < best) {
    best = vmin;
    besty = ymin;
  }
  return {best, besty};
}

}  // namespace

HypoCertificate certify(const OperatorProblem& problem, const CertifyOptions& opts) {
  HypoCertificate cert;
  cert.scalar_check = scalar_symbol_check(problem);

  ZeroSearchOptions zopts = opts.zero_search;
  if (opts.declared_zeros.has_value()) zopts.declared = opts.declared_zeros;
  cert.zeros = locate_zeros(problem.f, zopts);
  auto [k, maxz] = max_order_zeros(cert.zeros);
  cert.k = k;
  cert.max_order = maxz;

  SupNormBound sup = certified_sup_norm(problem.g);
  cert.sup_norm_bound = sup.upper;
  cert.scale = 1.0 + sup.upper;
  cert.threshold = opts.threshold >= 0 ? opts.threshold : 1e-8 * cert.scale;

  if (cert.zeros.empty()) {
    // no zeros: every representation is covered by the scalar check
    cert.status = HypoCertificate::Status::Certified;
    cert.margin = std::numeric_limits<double>::infinity();
    cert.notes.push_back("f has no zeros; only one-dimensional representations occur");
    return cert;
  }

  // parity constraints live on k, so they are checked after zero analysis
  ModelOperatorSpec model{problem.family, k, maxz.front().leading_coeff};
  model.validate();

  cert.lambda_cap = sup.upper + 1.0;
  const int y_grid =
      opts.y_grid > 0 ? opts.y_grid : std::max(512, 64 * (2 * problem.g.bandwidth_y() + 1));

  struct ZeroScan {
    std::vector<Witness> witnesses;
    double margin = std::numeric_limits<double>::infinity();
  };
  std::vector<ZeroScan> scans(maxz.size());

  parallel_for(static_cast<int>(maxz.size()), opts.workers, [&](int zi) {
    const ZeroDatum& z = maxz[zi];
    ModelOperatorSpec spec{problem.family, k, z.leading_coeff};
    Spectrum s = symbol_spectrum(spec, cert.lambda_cap, opts.spectral_tol, opts.limits);
    ZeroScan& scan = scans[zi];
    for (double lambda : s.eigenvalues) {
      for (int xi : problem.family == Family::AEven ? std::vector<int>{+1}
                                                    : std::vector<int>{+1, -1}) {
        YMinimum m = min_over_fiber(problem, z.location, xi, lambda, y_grid);
        scan.margin = std::min(scan.margin, m.value);
        scan.witnesses.push_back(Witness{z.location, m.y, lambda, xi, m.value});
      }
    }
  });

  double margin = cert.lambda_cap - cert.sup_norm_bound;  // tail bound, = 1 by construction
  std::vector<Witness> all;
  for (auto& scan : scans) {
    margin = std::min(margin, scan.margin);
    all.insert(all.end(), scan.witnesses.begin(), scan.witnesses.end());
  }
  std::sort(all.begin(), all.end(), [](const Witness& a, const Witness& b) {
    return a.smallest_singular_value < b.smallest_singular_value;
  });
  // keep the worst few plus anything below 10x threshold
  for (const auto& w : all)
    if (cert.witnesses.size() < 4 || w.smallest_singular_value < 10 * cert.threshold)
      cert.witnesses.push_back(w);

  cert.margin = margin;
  if (margin < 1e-10 * cert.scale)
    cert.status = HypoCertificate::Status::Violated;
  else if (margin > cert.threshold)
    cert.status = HypoCertificate::Status::Certified;
  else
    cert.status = HypoCertificate::Status::Undecided;

  for (const auto& z : cert.zeros)
    if (z.order < k)
      cert.notes.push_back("zero at x=" + std::to_string(z.location) + " has order " +
                           std::to_string(z.order) + " < k; injectivity holds with no condition on g");
  return cert;
}

IndexReport topological_index(const OperatorProblem& problem, const HypoCertificate& certificate,
                              const IndexOptions& opts) {
  if (!certificate.certified())
    throw CertificateRequired("topological_index requires a certified problem");

  IndexReport report;
  report.certificate = certificate;
  report.spectral_truncation = certificate.lambda_cap;
  report.per_zero.resize(certificate.max_order.size());

  if (certificate.max_order.empty()) {
    report.notes.push_back("no zeros: empty sum, index 0");
    return report;
  }

  const double cap =
      opts.truncation_audit ? 2.0 * certificate.lambda_cap : certificate.lambda_cap;

  parallel_for(static_cast<int>(certificate.max_order.size()), opts.workers, [&](int zi) {
    const ZeroDatum& z = certificate.max_order[zi];
    ModelOperatorSpec spec{problem.family, certificate.k, z.leading_coeff};
    Spectrum s = symbol_spectrum(spec, cap, opts.spectral_tol, opts.limits);

    PerZeroContribution& pz = report.per_zero[zi];
    pz.zero = z;

    PeriodicFunction1D slice = problem.g.slice_x(z.location);
    size_t i = 0;
    while (i < s.eigenvalues.size()) {
      // group numerically coincident eigenvalues; count with multiplicity
      double lambda = s.eigenvalues[i];
      int mult = 1;
      double res = std::max(1e-7, 10 * s.error_bounds[i]);
      while (i + mult < s.eigenvalues.size() &&
             std::abs(s.eigenvalues[i + mult] - lambda) < res * std::max(1.0, std::abs(lambda)))
        ++mult;

      LambdaContribution lc;
      lc.lambda = lambda;
      lc.multiplicity = mult;
      if (problem.family == Family::AEven) {
        // the fiber symbol is xi-independent: both windings cancel exactly
        lc.winding_plus = lc.winding_minus = k1_class_winding(lambda, slice);
      } else {
        // sigma_{D'}(xi=+1) = +g, sigma_{D'}(xi=-1) = -g
        lc.winding_plus = k1_class_winding(lambda, slice);
        lc.winding_minus = k1_class_winding(lambda, slice.scaled(-1.0));
      }
      lc.contribution = (lc.winding_minus - lc.winding_plus) * mult;
      pz.subtotal += lc.contribution;
      pz.lambdas.push_back(lc);
      i += mult;
    }
  });

  for (const auto& pz : report.per_zero) {
    report.total_index += pz.subtotal;
    for (const auto& lc : pz.lambdas)
      if (lc.multiplicity > 1)
        report.notes.push_back("eigenvalue " + std::to_string(lc.lambda) + " at x=" +
                               std::to_string(pz.zero.location) + " counted with multiplicity " +
                               std::to_string(lc.multiplicity));
  }
  report.notes.push_back(
      "eigenvalues above the truncation satisfy |lambda| > sup|g|, so both windings vanish "
      "(curve confined to a disk away from 0)");
  if (opts.truncation_audit) {
    report.notes.push_back("truncation audit: lambda cap doubled to " + std::to_string(cap));
    report.spectral_truncation = cap;
  }
  return report;
}

}  // namespace hypoindex
