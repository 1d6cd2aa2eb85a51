#include "rcc/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "rcc/document.hpp"
#include "rcc/errors.hpp"
#include "rcc/models.hpp"
#include "rcc/prng.hpp"
#include "rcc/report.hpp"
#include "rcc/selftest.hpp"
#include "rcc/spectral.hpp"
#include "rcc/tolerances.hpp"

namespace rcc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

bool write_file(const std::string& path, const std::string& text, std::string& err) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err = "cannot write " + path;
        return false;
    }
    out << text;
    return true;
}

Report base_report(const SystemDocument& doc) {
    Report report;
    report.labels = doc.system.labels;
    for (const auto& op : doc.system.operators) report.moduli.push_back(moduli_report(op));
    report.inputs = compute_inputs(doc.system, doc.overrides);
    report.certificate = build_certificate_matrix(report.inputs);
    report.verdict = certify(doc.system, report.inputs);
    return report;
}

int emit(const Report& report, const std::optional<std::string>& out_path, bool with_csv,
         CommandResult& result) {
    const std::string text = report_to_json_string(report);
    if (out_path) {
        if (!write_file(*out_path, text + "\n", result.err)) return 2;
        if (with_csv &&
            !write_file(*out_path + ".spectra.csv", report_spectra_csv(report), result.err))
            return 2;
    } else {
        result.out = text + "\n";
    }
    return report.verdict.certified ? 0 : 1;
}

}  // namespace

CommandResult cmd_certify(const std::string& path, const std::optional<std::string>& out_path) {
    CommandResult result;
    const auto t0 = Clock::now();
    try {
        SystemDocument doc = load_document(path);
        tol::ScaleGuard scale(doc.analysis.tolerance_scale.value_or(1.0));
        Report report = base_report(doc);
        report.total_ms = ms_since(t0);
        result.exit_code = emit(report, out_path, false, result);
    } catch (const Error& e) {
        result.err = e.what();
        result.exit_code = 2;
    }
    return result;
}

CommandResult cmd_analyze(const std::string& path, std::vector<std::size_t> truncate_list,
                          std::optional<double> gap_eps,
                          const std::optional<std::string>& out_path) {
    CommandResult result;
    const auto t0 = Clock::now();
    try {
        SystemDocument doc = load_document(path);
        tol::ScaleGuard scale(doc.analysis.tolerance_scale.value_or(1.0));
        if (truncate_list.empty()) truncate_list = doc.analysis.truncate;
        if (truncate_list.empty())
            throw DocumentError("analyze: no truncation sizes (use --truncate or analysis.truncate)");
        for (std::size_t i = 1; i < truncate_list.size(); ++i)
            if (truncate_list[i] <= truncate_list[i - 1])
                throw DocumentError("analyze: truncation sizes must be strictly increasing");
        if (!gap_eps) gap_eps = doc.analysis.gap_eps;

        Report report = base_report(doc);

        // gap eps defaults to half the certificate bound when one exists
        std::optional<double> eps = gap_eps;
        if (!eps && report.certificate.lambda_min > 0.0)
            eps = report.certificate.lambda_min / 2.0;

        for (std::size_t nv : truncate_list) {
            PerNDiagnostics d;
            d.n = nv;
            GramAssembly g = assemble_gram(doc.system, nv);
            d.gram_dim = g.gram.rows();
            d.gram_eigs = d.gram_dim ? eigh_values(g.gram) : std::vector<double>{};
            const double norm = d.gram_eigs.empty()
                                    ? 0.0
                                    : std::max(std::abs(d.gram_eigs.front()),
                                               std::abs(d.gram_eigs.back()));
            d.zero_tol = doc.analysis.zero_tol ? *doc.analysis.zero_tol
                                               : tol::gram_zero_tol(d.gram_dim, norm);
            d.smallest_nonzero = std::numeric_limits<double>::infinity();
            for (double v : d.gram_eigs) {
                if (v < d.zero_tol)
                    ++d.kernel_count;
                else
                    d.smallest_nonzero = std::min(d.smallest_nonzero, v);
            }
            if (eps) {
                try {
                    d.gap = lemma1_gap_check(doc.system, nv, *eps);
                } catch (const TruncationUnavailable& e) {
                    result.err += std::string("gap check at N=") + std::to_string(nv) +
                                  " unavailable: " + e.what() + "\n";
                }
            }
            report.diagnostics.push_back(std::move(d));
        }
        KernelTrace trace;
        trace.n_values = truncate_list;
        for (const auto& d : report.diagnostics) trace.counts.push_back(d.kernel_count);
        const std::size_t window = std::min<std::size_t>(3, trace.counts.size());
        trace.stabilized = window >= 2;
        for (std::size_t i = trace.counts.size() - window; i + 1 < trace.counts.size(); ++i)
            if (trace.counts[i] != trace.counts[i + 1]) trace.stabilized = false;
        if (trace.stabilized) trace.stable_value = trace.counts.back();
        report.kernel_trace = std::move(trace);
        report.total_ms = ms_since(t0);
        result.exit_code = emit(report, out_path, true, result);
    } catch (const Error& e) {
        result.err = e.what();
        result.exit_code = 2;
    }
    return result;
}

CommandResult cmd_fuzz_lemma2(std::size_t trials, std::uint64_t seed, std::size_t max_blocks,
                              std::size_t max_size) {
    CommandResult result;
    if (trials == 0 || max_blocks < 2 || max_size == 0) {
        result.err = "fuzz-lemma2: need trials >= 1, max_blocks >= 2, max_size >= 1";
        result.exit_code = 2;
        return result;
    }
    double min_slack = std::numeric_limits<double>::infinity();
    std::uint64_t min_slack_seed = seed;
    std::size_t violations = 0;
    std::uint64_t first_violation_seed = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = seed + t;
        SplitMix64 rng(trial_seed);
        const std::size_t n_blocks = 2 + static_cast<std::size_t>(rng.next_below(max_blocks - 1));
        BlockHermitian bh = random_block_hermitian(rng.next_u64(), n_blocks, max_size);
        Lemma2Result r = lemma2_bound_check(bh.h, bh.partition);
        const double slack = r.lambda_min_actual - r.lambda_min_bound;
        if (slack < min_slack) {
            min_slack = slack;
            min_slack_seed = trial_seed;
        }
        if (!r.pass) {
            if (violations == 0) first_violation_seed = trial_seed;
            ++violations;
        }
    }
    std::string s;
    s += "fuzz-lemma2 trials=" + std::to_string(trials) + " seed=" + std::to_string(seed) +
         " max_blocks=" + std::to_string(max_blocks) + " max_size=" + std::to_string(max_size) +
         "\n";
    s += "violations=" + std::to_string(violations) + "\n";
    s += "min_slack=" + format_double(min_slack) + " at seed=" +
         std::to_string(min_slack_seed) + "\n";
    if (violations > 0) {
        s += "FAIL: bound violated beyond tolerance; reproduce with seed=" +
             std::to_string(first_violation_seed) + " trials=1\n";
        result.exit_code = 1;
    }
    result.out = s;
    return result;
}

CommandResult cmd_selftest() {
    CommandResult result;
    std::vector<SelftestItem> items = run_selftest();
    bool all_pass = true;
    for (const auto& item : items) {
        result.out += item.id + (item.pass ? " PASS " : " FAIL ") + item.title;
        if (!item.detail.empty()) result.out += " [" + item.detail + "]";
        result.out += "\n";
        all_pass = all_pass && item.pass;
    }
    result.out += all_pass ? "selftest: all items passed\n" : "selftest: FAILURES present\n";
    result.exit_code = all_pass ? 0 : 1;
    return result;
}

}  // namespace rcc
