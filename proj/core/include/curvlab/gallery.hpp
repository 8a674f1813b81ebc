#pragma once

#include "curvlab/scenario.hpp"

namespace curvlab {

// A named, fully deterministic example configuration with the verdicts it is
// expected to reproduce on every run. Most entries carry one scenario; the
// truncation study carries one per rank.
struct GalleryEntry {
    std::string name;
    std::string summary;
    std::vector<Scenario> scenarios;
    // "<scenario-name>/<check>" -> "pass" | "fail" | "inconclusive"
    std::map<std::string, std::string> expected;
};

std::vector<std::string> galleryNames();

// Throws ParseError listing the valid names when the name is unknown.
GalleryEntry gallery(const std::string& name);

struct GalleryRunResult {
    std::vector<ScenarioOutcome> outcomes;       // parallel to entry.scenarios
    std::vector<VerificationReport> extraReports;  // cross-scenario checks (margin stability)
    bool expectationsMatched = true;
    std::vector<std::string> mismatches;         // human-readable diffs
};

GalleryRunResult runGalleryEntry(const GalleryEntry& entry);

// "pass", "fail" or "inconclusive" for comparing against expectations.
std::string verdictString(const VerificationReport& rep);

}  // namespace curvlab
