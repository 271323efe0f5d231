#pragma once

#include <string>
#include <vector>

namespace translab {

struct SelftestResult {
    int passed = 0;
    int failed = 0;
    std::vector<std::string> lines;  // one "ok/FAIL name" per check
};

// Quick closed-form checks across every module; runs in a few seconds.
SelftestResult run_selftest();

}  // namespace translab
