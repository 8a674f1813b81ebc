#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "curvlab/field.hpp"

namespace curvlab {

struct Witness {
    Complex s;
    Vector v;
    std::string note;
};

// Outcome of one numeric check. `pass` means the worst residual stayed within
// tolerance over all samples; a witness pins down where it did not (or, for a
// passing check, where the worst value occurred when that is useful).
// `inconclusive` marks margin-zero outcomes that must not be read as pass or
// fail; when set, pass is false.
struct VerificationReport {
    std::string check;
    bool pass = false;
    bool inconclusive = false;
    double residual = 0.0;
    std::optional<Witness> witness;
    long samples = 0;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    // Named numeric side results (fitted constants, margins, counts). Ordered
    // map so serialized reports are byte-stable.
    std::map<std::string, double> details;
};

}  // namespace curvlab
