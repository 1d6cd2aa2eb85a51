// certify.hpp — the certification pipeline.
//
// For operators A_1..A_n with closed ranges, gather lower bounds
// gamma_k <= gamma_e(A_k) and upper bounds eps_ij >= ||A_i* A_j||_e, form the
// real symmetric certificate matrix
//
//     M[i][i] = gamma_i^2,   M[i][j] = -eps_ij  (i != j),
//
// and certify: if M is positive definite then Ran(A_1),...,Ran(A_n) are
// essentially linearly independent and their sum is closed. Strict diagonal
// dominance (sum_j eps_ij < gamma_i^2) is reported as a fast path.
//
// The remaining operations are numerical diagnostics around the same
// machinery: the Gram operator G = Gamma* Gamma with blocks A_i* A_j
// restricted to cokernels, kernel-dimension stabilization as a witness of
// essential linear independence, the spectral-gap check on sum A_k A_k*, and
// the finite-dimensional block eigenvalue bound lambda_min(H) >= lambda_min(M).
// A failed certificate asserts nothing.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rcc/dense_matrix.hpp"
#include "rcc/extended_real.hpp"
#include "rcc/moduli.hpp"
#include "rcc/operator_rep.hpp"

namespace rcc {

struct SystemSpec {
    std::vector<OperatorRep> operators;             // common codomain
    std::vector<std::string> labels;                // default A1..An
    std::vector<std::size_t> truncation_allocation; // per-operator block budgets, default 1
};

// normalizes labels/allocation and validates shapes; throws on inconsistency
SystemSpec make_system(std::vector<OperatorRep> operators,
                       std::vector<std::string> labels = {},
                       std::vector<std::size_t> truncation_allocation = {});

enum class Provenance { exact, user_supplied, estimate };

std::string to_string(Provenance p);

struct CertificateInputs {
    std::vector<ExtendedReal> gamma_lb;  // all > 0
    std::vector<Provenance> gamma_provenance;
    std::vector<std::vector<double>> eps_ub;  // symmetric, zero diagonal
    std::vector<std::vector<Provenance>> eps_provenance;
    std::size_t size() const { return gamma_lb.size(); }
};

struct Overrides {
    std::vector<std::optional<ExtendedReal>> gamma;  // per operator, optional
    struct EpsEntry {
        std::size_t i, j;
        double value;
    };
    std::vector<EpsEntry> eps;
};

// Evaluates the certificate hypotheses: every range closed (else
// HypothesisViolated), gamma_k = gamma_e(A_k) > 0, eps_ij from the essential
// norm of A_i* A_j symmetrized by max. Pairs the calculus cannot compose
// require a user override (else MissingOverride).
CertificateInputs compute_inputs(const SystemSpec& system, const Overrides& overrides = {});

struct CertificateMatrix {
    DenseMatrix m;  // real symmetric n x n
    double lambda_min = 0.0;
    bool diag_dominant = false;
    std::optional<double> gamma_cap;    // stand-in for infinite gammas, when used
    std::vector<std::size_t> capped;    // operator indices that entered via the cap
};

// Assembles M. Infinite gammas enter as cap^2 with
// cap = 1000 * max(1, finite gammas, eps entries) unless overridden; the
// theorem only strengthens as gamma grows, so any large stand-in preserves
// the decision for the finite blocks, and the cap is recorded for audit.
CertificateMatrix build_certificate_matrix(const CertificateInputs& inputs,
                                           std::optional<double> cap_override = {});

enum class FastPath { none, diag_dominance };

struct Verdict {
    bool certified = false;
    double lambda_min_m = 0.0;
    FastPath fast_path = FastPath::none;
    bool sum_closed_guaranteed = false;
    bool essentially_linearly_independent_guaranteed = false;
    std::optional<double> gamma_cap;
    std::vector<std::size_t> capped;
};

// certified iff lambda_min(M) > 0 strictly (a lambda_min within 1e-12 of the
// boundary is not certified); when not certified the verdict asserts nothing.
Verdict certify(const SystemSpec& system, const CertificateInputs& inputs);

struct GramAssembly {
    DenseMatrix gram;                      // Hermitian, Gamma* Gamma
    DenseMatrix gamma_factor;              // codomain x sum(k_j) matrix Gamma
    std::vector<std::size_t> block_sizes;  // cokernel dimension per operator
};

// G restricted to cokernel coordinates K_j = H_j (-) Ker(A_j), per block
// budget n * truncation_allocation[k]; throws TruncationUnavailable when the
// codomain truncations cannot be aligned.
GramAssembly assemble_gram(const SystemSpec& system, std::size_t n);

struct KernelTrace {
    std::vector<std::size_t> n_values;
    std::vector<std::size_t> counts;  // eigenvalues of G_N below tol
    bool stabilized = false;          // equal across the three largest N
    std::size_t stable_value = 0;
};

// numerical witness of essential linear independence: the near-kernel count
// of G_N stabilizing in N. Default tol per N: dim(G_N) * eps * ||G_N||.
KernelTrace kernel_dimension_estimate(const SystemSpec& system,
                                      const std::vector<std::size_t>& n_list,
                                      std::optional<double> zero_tol = {});

struct Lemma1Result {
    bool gap_empty = false;           // no eigenvalue of the section in (tol, eps)
    double smallest_above_tol = 0.0;  // +inf when none
    double zero_tol = 0.0;
    std::size_t count_below_tol = 0;
};

// spectral-gap diagnostic on the truncation of sum A_k A_k*; evidence only,
// never a proof of non-closedness (finite sections can pollute the gap).
Lemma1Result lemma1_gap_check(const SystemSpec& system, std::size_t n, double eps);

struct Lemma2Result {
    double lambda_min_actual = 0.0;
    double lambda_min_bound = 0.0;
    bool pass = false;
};

// finite-dimensional block bound: with a_i = lambda_min(H_ii) and
// a_ij = ||H_ij||, lambda_min(H) >= lambda_min(M) - 1e-9.
Lemma2Result lemma2_bound_check(const DenseMatrix& h, const std::vector<std::size_t>& partition);

}  // namespace rcc
