#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/field.hpp"
#include "curvlab/report.hpp"
#include "curvlab/sheaf.hpp"

namespace curvlab {

// Tolerances a scenario may override; defaults are the pinned values used
// throughout the checks.
struct ToleranceSet {
    double hermitianRel = 1e-12;     // metric validation symmetry
    double selfAdjointRel = 1e-8;    // curvature self-adjointness, relative
    double hypothesis = 1e-8;        // curvature-decrease slack, scaled
    double identityResidual = 1e-5;  // log-norm identity (finite differences)
    double pointwise = 1e-8;         // closed-form pointwise comparisons
};

// One self-contained verification configuration: metrics and a bundle map
// (coefficient tables), or a weighted fiber set, a grid, and an ordered list
// of checks. Every check's randomness derives from the single seed.
struct Scenario {
    Scenario(std::string name_, GridDomain domain_) : name(std::move(name_)), domain(domain_) {}

    std::string name;
    GridDomain domain;
    std::optional<MatrixPolyField> source;
    std::optional<MatrixPolyField> target;
    std::optional<MatrixPolyField> hom;
    std::optional<FiberedMetric> fibered;
    std::vector<std::string> checks;
    std::uint64_t seed = 1;
    std::optional<Complex> basePoint;  // proof-trace / stationarity base; default grid center
    int surrogateDegree = 10;          // connection-form certification degree
    ToleranceSet tol;
};

// The check vocabulary accepted in scenario files, in canonical order.
const std::vector<std::string>& knownCheckTokens();

// Scenario files are JSON. Metric slots accept either an inline coefficient
// table or a gallery reference string "gallery:<entry>", which resolves to
// the same slot of that entry's (first) scenario.
Scenario scenarioFromJson(const std::string& text);
std::string toJson(const Scenario& sc);

struct ScenarioOutcome {
    std::vector<VerificationReport> reports;
    // extra artifact files keyed by file name (CSV heatmaps etc.)
    std::map<std::string, std::string> artifacts;
};

// 0 all pass, 1 any definite failure, 3 inconclusive results only.
int exitCodeFor(const std::vector<VerificationReport>& reports);

// Executes the scenario's checks in declared order. Configuration problems
// (missing inputs for a requested check, invalid metrics where a check needs
// them implicitly) surface as ParseError/FieldError; check outcomes,
// including failures, land in the reports.
ScenarioOutcome runScenario(const Scenario& sc);

}  // namespace curvlab
