// rcc — spectral certificates for the closedness of sums of operator ranges.
//
//   rcc certify <file> [--out <file>]
//   rcc analyze <file> --truncate N1,N2,... [--gap-eps r] [--out <file>]
//   rcc fuzz-lemma2 --trials n --seed n [--max-blocks n] [--max-size n]
//   rcc selftest
//
// Exit codes: 0 certified (or all checks passed), 1 completed without
// certification (or a check failed), 2 input/processing error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcc/commands.hpp"

namespace {

int finish(const rcc::CommandResult& result) {
    if (!result.out.empty()) std::cout << result.out;
    if (!result.err.empty()) std::cerr << result.err << "\n";
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral certificates for closedness of sums of operator ranges"};
    app.require_subcommand(1);

    std::string path;
    std::string out_path;
    std::vector<std::size_t> truncate_list;
    double gap_eps = 0.0;

    CLI::App* certify = app.add_subcommand("certify", "evaluate the certificate for a system");
    certify->add_option("file", path, "system document (JSON)")->required();
    CLI::Option* certify_out = certify->add_option("--out", out_path, "write the report here");

    CLI::App* analyze =
        app.add_subcommand("analyze", "certificate plus truncated-spectrum diagnostics");
    analyze->add_option("file", path, "system document (JSON)")->required();
    analyze->add_option("--truncate", truncate_list, "truncation sizes, strictly increasing")
        ->delimiter(',');
    CLI::Option* gap_opt =
        analyze->add_option("--gap-eps", gap_eps, "spectral-gap width for the Lemma check");
    CLI::Option* analyze_out = analyze->add_option("--out", out_path, "write the report here");

    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::size_t max_blocks = 4;
    std::size_t max_size = 30;
    CLI::App* fuzz = app.add_subcommand("fuzz-lemma2", "fuzz the block eigenvalue bound");
    fuzz->add_option("--trials", trials, "number of matrices")->required();
    fuzz->add_option("--seed", seed, "base seed")->required();
    fuzz->add_option("--max-blocks", max_blocks, "blocks per matrix, 2..this");
    fuzz->add_option("--max-size", max_size, "maximum block size");

    CLI::App* selftest = app.add_subcommand("selftest", "run the bundled acceptance items");

    CLI11_PARSE(app, argc, argv);

    if (certify->parsed()) {
        std::optional<std::string> out =
            *certify_out ? std::optional<std::string>(out_path) : std::nullopt;
        return finish(rcc::cmd_certify(path, out));
    }
    if (analyze->parsed()) {
        std::optional<std::string> out =
            *analyze_out ? std::optional<std::string>(out_path) : std::nullopt;
        std::optional<double> eps = *gap_opt ? std::optional<double>(gap_eps) : std::nullopt;
        return finish(rcc::cmd_analyze(path, truncate_list, eps, out));
    }
    if (fuzz->parsed()) return finish(rcc::cmd_fuzz_lemma2(trials, seed, max_blocks, max_size));
    if (selftest->parsed()) return finish(rcc::cmd_selftest());
    return 2;
}
