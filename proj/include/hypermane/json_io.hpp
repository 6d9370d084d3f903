#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hypermane/hyperbolic.hpp"
#include "hypermane/mane_metric.hpp"

namespace hypermane {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point value printed at 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);

Json config_to_json(const Configuration& c);
/// Parses {"d", "masses", "bodies"}; `field` names the value in error messages.
Configuration config_from_json(const Json& j, const std::string& field);

Json kind_to_json(const PairKind& kind);
PairKind kind_from_json(const Json& j, const std::string& field);
Json envelope_to_json(const Envelope& f);
Envelope envelope_from_json(const Json& j, const std::string& field);
Json potential_to_json(const PotentialSpec& F);
PotentialSpec potential_from_json(const Json& j, const Layout& layout, const std::string& field);

Json geodesic_to_json(const GeodesicResult& g);
Json certificate_to_json(const ManeEstimate& e);
Json psi_to_json(const PsiTable& psi);
Json report_to_json(const HyperbolicReport& r);

/// Columns t, radius, angle_error, defect, bound for run n.
void write_defect_csv(std::ostream& os, const HyperbolicReport& r, int n);

}  // namespace hypermane
