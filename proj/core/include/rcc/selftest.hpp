// selftest.hpp — the bundled verification items run by `rcc selftest` and by
// the acceptance suite.

#pragma once

#include <string>
#include <vector>

namespace rcc {

struct SelftestItem {
    std::string id;
    std::string title;
    bool pass = false;
    std::string detail;  // measured numbers, or the failure reason
};

std::vector<SelftestItem> run_selftest();

}  // namespace rcc
