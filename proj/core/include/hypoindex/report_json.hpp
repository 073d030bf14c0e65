#pragma once

#include <json.hpp>
#include <ostream>
#include <string>

#include "hypoindex/galerkin.hpp"
#include "hypoindex/index_engine.hpp"
#include "hypoindex/nilpotent.hpp"

namespace hypoindex {

using OrderedJson = nlohmann::ordered_json;

/// Serializes with every floating-point number printed to 17 significant
/// digits (bit-faithful round trips) and keys in insertion order, so
/// identical runs produce identical bytes.
void write_json(std::ostream& os, const OrderedJson& value, int indent = 2);
std::string json_to_string(const OrderedJson& value, int indent = 2);

OrderedJson certificate_to_json(const HypoCertificate& cert);
OrderedJson index_report_to_json(const IndexReport& report);
OrderedJson oracle_verdict_to_json(const OracleVerdict& verdict);
OrderedJson spectrum_to_json(const Spectrum& spectrum);
OrderedJson theorem_b_report_to_json(const TheoremBReport& report);

}  // namespace hypoindex
