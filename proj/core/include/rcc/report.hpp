// report.hpp — the machine-readable result of a run.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcc/certify.hpp"
#include "rcc/moduli.hpp"

namespace rcc {

struct PerNDiagnostics {
    std::size_t n = 0;
    std::size_t gram_dim = 0;
    std::vector<double> gram_eigs;  // ascending; full data goes to the CSV
    std::size_t kernel_count = 0;
    double zero_tol = 0.0;
    double smallest_nonzero = 0.0;
    std::optional<Lemma1Result> gap;
};

struct Report {
    std::vector<std::string> labels;
    std::vector<ModuliReport> moduli;
    CertificateInputs inputs;
    CertificateMatrix certificate;
    Verdict verdict;
    std::vector<PerNDiagnostics> diagnostics;
    std::optional<KernelTrace> kernel_trace;
    double total_ms = 0.0;
};

// JSON text; +inf values serialize as the string "inf"
std::string report_to_json_string(const Report& report, int indent = 2);

// per-N spectra as "N,index,eigenvalue" lines (dot decimal, LF endings,
// shortest round-trip formatting)
std::string report_spectra_csv(const Report& report);

}  // namespace rcc
