#pragma once

#include "manyminds/quantum.hpp"

#include <string>
#include <vector>

// The fixed-seed invariant suite behind `mmsim verify`: every module's
// randomized and exhaustive properties, reported one line per invariant.

namespace mmsim {

struct InvariantResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    mm::quantum::Tolerances tol;
    std::string inject_failure; // name of an invariant to force-fail (test hook)
};

std::vector<InvariantResult> run_verify_suite(const VerifyOptions& opts);

} // namespace mmsim
