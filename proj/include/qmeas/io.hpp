#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "qmeas/admissibility.hpp"
#include "qmeas/bayes.hpp"
#include "qmeas/core.hpp"
#include "qmeas/estimation.hpp"
#include "qmeas/optimality.hpp"
#include "qmeas/scenarios.hpp"

namespace qmeas {

using Json = nlohmann::json;
// Output uses insertion order so identical runs serialize byte-identically.
using OrderedJson = nlohmann::ordered_json;

// Matrix exchange format: {"dim": n, "re": [[...]], "im": [[...]]}.
OrderedJson matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

// {"param_dim": N, "grid": [[...]], "cell_volumes": [...], "states": [matrix...]}
OrderedJson state_family_to_json(const ParametrisedState& s);
ParametrisedState state_family_from_json(const Json& j, const Tolerances& tol = {});

// {"effects": [matrix...]} / {"kraus": [matrix...]}
OrderedJson povm_to_json(const Povm& m);
Povm povm_from_json(const Json& j, const Tolerances& tol = {});
OrderedJson kraus_to_json(const KrausMeasurement& f);
KrausMeasurement kraus_from_json(const Json& j, const Tolerances& tol = {});

// {"values": [[...]]}
OrderedJson estimator_to_json(const Estimator& e);
Estimator estimator_from_json(const Json& j);

// {"weights": [...]}
OrderedJson prior_to_json(const Prior& p);
Prior prior_from_json(const Json& j);

OrderedJson risk_profile_to_json(const RiskProfile& p);
// CSV columns theta_1..theta_N, risk; comment lines go above the header.
std::string risk_profile_to_csv(const RiskProfile& p,
                                const std::vector<std::string>& comments = {});

OrderedJson tolerances_to_json(const Tolerances& tol);
Tolerances tolerances_from_json(const Json& j);

// Scenario file: {"kind": "mach_zehnder" | "thermal" | "depolarizing" |
// "diagonal_classical" | "custom", "grid": {...}, kind-specific fields}.
// Custom scenarios carry the family inline ("family") or by path ("file").
ScenarioSpec scenario_spec_from_json(const Json& j, const Tolerances& tol = {});

OrderedJson bayes_solution_to_json(const BayesSolution& sol);
OrderedJson refinement_domination_to_json(const RefinementDomination& d);
OrderedJson uninformative_domination_to_json(const UninformativeDomination& d);

Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qmeas
