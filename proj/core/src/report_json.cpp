#include "hypoindex/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hypoindex {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void dump(std::ostream& os, const OrderedJson& v, int indent, int depth) {
  const std::string pad(static_cast<size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<size_t>(indent) * (depth + 1), ' ');
  switch (v.type()) {
    case nlohmann::detail::value_t::object: {
      if (v.empty()) { os << "{}"; return; }
      os << "{\n";
      size_t i = 0;
      for (auto it = v.begin(); it != v.end(); ++it, ++i) {
        os << pad_in << OrderedJson(it.key()).dump() << ": ";
        dump(os, it.value(), indent, depth + 1);
        if (i + 1 < v.size()) os << ",";
        os << "\n";
      }
      os << pad << "}";
      return;
    }
    case nlohmann::detail::value_t::array: {
      if (v.empty()) { os << "[]"; return; }
      os << "[\n";
      for (size_t i = 0; i < v.size(); ++i) {
        os << pad_in;
        dump(os, v[i], indent, depth + 1);
        if (i + 1 < v.size()) os << ",";
        os << "\n";
      }
      os << pad << "]";
      return;
    }
    case nlohmann::detail::value_t::number_float:
      os << format_double(v.get<double>());
      return;
    default:
      os << v.dump();
      return;
  }
}

}  // namespace

void write_json(std::ostream& os, const OrderedJson& value, int indent) {
  dump(os, value, indent, 0);
  os << "\n";
}

std::string json_to_string(const OrderedJson& value, int indent) {
  std::ostringstream ss;
  write_json(ss, value, indent);
  return ss.str();
}

OrderedJson certificate_to_json(const HypoCertificate& cert) {
  OrderedJson j;
  switch (cert.status) {
    case HypoCertificate::Status::Certified: j["status"] = "certified"; break;
    case HypoCertificate::Status::Violated: j["status"] = "violated"; break;
    case HypoCertificate::Status::Undecided: j["status"] = "undecided"; break;
  }
  j["margin"] = cert.margin;
  j["threshold"] = cert.threshold;
  j["k"] = cert.k;
  j["sup_norm_bound"] = cert.sup_norm_bound;
  j["lambda_cap"] = cert.lambda_cap;
  j["zeros"] = OrderedJson::array();
  for (const auto& z : cert.zeros)
    j["zeros"].push_back(OrderedJson{
        {"location", z.location}, {"order", z.order}, {"leading_coeff", z.leading_coeff}});
  j["max_order_zeros"] = OrderedJson::array();
  for (const auto& z : cert.max_order) j["max_order_zeros"].push_back(z.location);
  j["scalar_symbol_check"] =
      OrderedJson{{"pass", cert.scalar_check.pass}, {"reason", cert.scalar_check.reason}};
  j["witnesses"] = OrderedJson::array();
  for (const auto& w : cert.witnesses)
    j["witnesses"].push_back(OrderedJson{{"x", w.x},
                                         {"y", w.y},
                                         {"lambda", w.lambda},
                                         {"xi", w.xi},
                                         {"smallest_singular_value", w.smallest_singular_value}});
  j["notes"] = cert.notes;
  return j;
}

OrderedJson index_report_to_json(const IndexReport& report) {
  OrderedJson j;
  j["certificate"] = certificate_to_json(report.certificate);
  j["per_zero"] = OrderedJson::array();
  for (const auto& pz : report.per_zero) {
    OrderedJson z;
    z["zero"] = OrderedJson{{"location", pz.zero.location},
                            {"order", pz.zero.order},
                            {"leading_coeff", pz.zero.leading_coeff}};
    z["lambdas"] = OrderedJson::array();
    for (const auto& lc : pz.lambdas)
      z["lambdas"].push_back(OrderedJson{{"lambda", lc.lambda},
                                         {"multiplicity", lc.multiplicity},
                                         {"winding_plus", lc.winding_plus},
                                         {"winding_minus", lc.winding_minus},
                                         {"contribution", lc.contribution}});
    z["subtotal"] = pz.subtotal;
    j["per_zero"].push_back(z);
  }
  j["total_index"] = report.total_index;
  j["spectral_truncation"] = report.spectral_truncation;
  j["notes"] = report.notes;
  return j;
}

OrderedJson oracle_verdict_to_json(const OracleVerdict& verdict) {
  OrderedJson j;
  j["accepted"] = verdict.accepted;
  j["dim_ker"] = verdict.dim_ker;
  j["dim_coker"] = verdict.dim_coker;
  j["index_estimate"] = verdict.index_estimate;
  j["levels"] = OrderedJson::array();
  for (const auto& lv : verdict.levels) {
    OrderedJson l;
    l["M"] = lv.M;
    l["N"] = lv.N;
    l["dim"] = lv.dim;
    l["matrix_norm"] = lv.matrix_norm;
    l["threshold_abs"] = lv.threshold_abs;
    l["bottom_singular_values"] = lv.bottom_singular_values;
    l["near_kernel"] = OrderedJson::array();
    for (const auto& nk : lv.near_kernel)
      l["near_kernel"].push_back(OrderedJson{{"sigma", nk.sigma},
                                             {"right_boundary_mass", nk.right_boundary_mass},
                                             {"left_boundary_mass", nk.left_boundary_mass},
                                             {"counted_ker", nk.counted_ker},
                                             {"counted_coker", nk.counted_coker}});
    l["next_sigma"] = lv.next_sigma;
    l["dim_ker"] = lv.dim_ker;
    l["dim_coker"] = lv.dim_coker;
    l["artifact_free"] = lv.artifact_free;
    l["gap_ok"] = lv.gap_ok;
    if (!lv.note.empty()) l["note"] = lv.note;
    j["levels"].push_back(l);
  }
  j["notes"] = verdict.notes;
  return j;
}

OrderedJson spectrum_to_json(const Spectrum& spectrum) {
  OrderedJson j;
  j["eigenvalues"] = spectrum.eigenvalues;
  j["error_bounds"] = spectrum.error_bounds;
  j["truncation_bound"] = spectrum.truncation_bound;
  j["method_agreement"] = spectrum.method_agreement;
  j["finite_difference"] = OrderedJson{{"values", spectrum.fd_values},
                                       {"grid", spectrum.fd_grid},
                                       {"half_width", spectrum.fd_half_width}};
  j["galerkin_basis"] = spectrum.galerkin_basis;
  return j;
}

OrderedJson theorem_b_report_to_json(const TheoremBReport& report) {
  OrderedJson j;
  j["k"] = report.k;
  j["n"] = report.n;
  j["samples"] = report.samples;
  j["orbit_dimension_bound"] = report.bound;
  j["max_orbit_dimension"] = report.max_orbit_dimension;
  j["all_within_bound"] = report.all_within_bound;
  j["all_even"] = report.all_even;
  OrderedJson hist = OrderedJson::object();
  for (const auto& [d, c] : report.orbit_dimension_histogram) hist[std::to_string(d)] = c;
  j["orbit_dimension_histogram"] = hist;
  j["non_characteristic"] = OrderedJson{
      {"examined", report.non_characteristic_examined},
      {"rejected_by_membership", report.non_characteristic_found},
      {"within_bound", report.non_characteristic_within_bound}};
  return j;
}

}  // namespace hypoindex
