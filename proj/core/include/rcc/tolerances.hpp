// tolerances.hpp — the library's numerical tolerances.
//
// Every tolerance is multiplied by the RCC_TOLERANCE_SCALE environment
// variable (a float, default 1.0), read once per process.

#pragma once

#include <cstdlib>
#include <limits>

namespace rcc::tol {

inline double env_scale() {
    static const double s = [] {
        if (const char* env = std::getenv("RCC_TOLERANCE_SCALE")) {
            char* end = nullptr;
            double v = std::strtod(env, &end);
            if (end != env && v > 0.0) return v;
        }
        return 1.0;
    }();
    return s;
}

// extra factor installed per run from a document's analysis stanza
inline double& runtime_scale() {
    static double s = 1.0;
    return s;
}

struct ScaleGuard {
    double saved;
    explicit ScaleGuard(double factor) : saved(runtime_scale()) { runtime_scale() = factor; }
    ~ScaleGuard() { runtime_scale() = saved; }
};

inline double scale() { return env_scale() * runtime_scale(); }

// base value scaled by the environment and per-run factors
inline double scaled(double base) { return base * scale(); }

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// Hermitian symmetry check, relative to the largest entry
inline double hermitian_rel() { return scaled(1e-12); }

// eigh residual contract: ||Hv - lambda v|| <= residual_rel() * ||H||
inline double residual_rel() { return scaled(1e-9); }

// default numerical-rank cutoff: max(m,n) * eps * sigma_max
inline double rank_tol(std::size_t m, std::size_t n, double sigma_max) {
    return scaled(static_cast<double>(m > n ? m : n) * kEps * sigma_max);
}

// rank cutoff for small structured blocks, whose entries carry construction
// roundoff of a few eps themselves; the extra margin keeps exactly-singular
// blocks from leaking junk directions
inline double block_rank_tol(std::size_t d, double sigma_max) {
    return scaled(32.0 * static_cast<double>(d) * kEps * sigma_max);
}

// dedup window for essential spectrum point sets
inline double spectrum_dedup() { return scaled(1e-12); }

// strictness window at the PD boundary: lambda_min within this of 0 is not certified
inline double pd_boundary() { return scaled(1e-12); }

// "zero" threshold in truncated Gram spectra: dim * eps * ||G||
inline double gram_zero_tol(std::size_t dim, double norm) {
    return scaled(static_cast<double>(dim) * kEps * (norm > 1.0 ? norm : 1.0));
}

// slack allowed by the witness-inequality check
inline double witness_slack() { return scaled(1e-9); }

}  // namespace rcc::tol
