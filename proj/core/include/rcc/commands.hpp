// commands.hpp — command implementations behind the CLI.
//
// Exit codes: 0 certified, 1 completed without certification, 2 error.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rcc {

struct CommandResult {
    int exit_code = 0;
    std::string out;  // report JSON / summary text
    std::string err;  // diagnostics for humans
};

CommandResult cmd_certify(const std::string& path, const std::optional<std::string>& out_path);

CommandResult cmd_analyze(const std::string& path, std::vector<std::size_t> truncate_list,
                          std::optional<double> gap_eps,
                          const std::optional<std::string>& out_path);

// trials of lemma2_bound_check on seeded random block Hermitian matrices;
// the summary text is deterministic for a fixed argument tuple
CommandResult cmd_fuzz_lemma2(std::size_t trials, std::uint64_t seed, std::size_t max_blocks,
                              std::size_t max_size);

CommandResult cmd_selftest();

}  // namespace rcc
