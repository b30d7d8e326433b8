#pragma once

#include <string>
#include <vector>

namespace magcav {

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// The full verification battery: Table-I cooperativities, Purcell factor and
// ringdown ratio, Kittel resonance fields, eigenvalue oracle equivalence,
// expansion error scaling, time/frequency consistency, round-trip extraction
// (noiseless and noisy), coupling estimate, regime transition, and the
// conservation identities. Each entry carries a one-line detail string.
std::vector<CriterionResult> run_acceptance();

}  // namespace magcav
