#pragma once

#include "curvlab/scenario.hpp"

namespace curvlab {

struct FalsifyOptions {
    int trials = 100;
    std::uint64_t seed = 1;
    int resolution = 65;
    int vectorSamples = 16;  // sampled-mode probes per node (ranks above 4)
};

struct TrialRecord {
    int index = 0;
    std::string family;
    std::string hypothesis;  // "pass" | "fail"
    std::string conclusion;  // "psh" | "not-psh" | "inconclusive" | "skipped"
    double hypothesisResidual = 0.0;
    double conclusionWorst = 0.0;       // worst mean-value estimate (passing trials)
    double leviMin = 0.0;               // min finite-difference quarter-Laplacian
    double maxPrincipleResidual = 0.0;  // worst over three nested subrectangles
    bool counterexample = false;
};

struct FalsifySummary {
    FalsifyOptions options;
    std::vector<TrialRecord> trials;
    long hypothesisPassed = 0;
    long hypothesisFailed = 0;
    long conclusionPsh = 0;
    long conclusionNotPsh = 0;
    long conclusionInconclusive = 0;
    long maxPrincipleViolations = 0;
    long counterexamples = 0;
    // full scenario JSON per counterexample, enough to replay the trial
    std::vector<std::string> reproduction;
};

// Random attack on the decreasing-curvature implication: generate scenarios
// from three families (conformal rescalings of a random metric by a
// superharmonic factor, ordered scalar-weight pairs with a random bundle map,
// and unconstrained random triples), keep those passing hypothesisCheck, and
// demand the log-norm verdict is never not-psh. Each trial derives its
// randomness from the summary seed, so reruns are byte-identical.
FalsifySummary falsify(const FalsifyOptions& opt);

std::string toJson(const FalsifySummary& s);

}  // namespace curvlab
