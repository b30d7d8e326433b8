// Runs the full verification battery and prints one pass/fail line per
// criterion. Nonzero exit when any criterion fails.

#include <cstdio>

#include "magcav/acceptance.hpp"

int main() {
    const auto results = magcav::run_acceptance();
    bool all_ok = true;
    for (const auto& r : results) {
        std::printf("%s  %s  [%s]\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all_ok = all_ok && r.passed;
    }
    std::printf("%s\n", all_ok ? "all criteria passed" : "some criteria FAILED");
    return all_ok ? 0 : 1;
}
