// acceptance_main — runs every acceptance item and prints one line each.

#include <cstdio>

#include "rcc/selftest.hpp"

int main() {
    bool all_pass = true;
    for (const auto& item : rcc::run_selftest()) {
        std::printf("%-5s %s  %s%s%s%s\n", item.id.c_str(), item.pass ? "PASS" : "FAIL",
                    item.title.c_str(), item.detail.empty() ? "" : " [",
                    item.detail.c_str(), item.detail.empty() ? "" : "]");
        std::fflush(stdout);
        all_pass = all_pass && item.pass;
    }
    std::printf("%s\n", all_pass ? "acceptance: all criteria passed"
                                 : "acceptance: FAILURES present");
    return all_pass ? 0 : 1;
}
