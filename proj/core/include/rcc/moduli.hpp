// moduli.hpp — scalar functionals of an operator:
//
//   gamma(A)      reduced minimum modulus, inf ||Ax|| over unit x in
//                 H (-) Ker(A); Ran(A) is closed iff gamma(A) > 0, and
//                 gamma(0) = +inf
//   gamma_e(A)    essential reduced minimum modulus, sqrt(min sigma_e(B))
//                 for B = A*A restricted to the cokernel; +inf when the
//                 cokernel is finite dimensional
//   ||A||_e       essential norm, distance to the compacts
//   m_e(C)        largest essentially guaranteed lower bound of a
//                 self-adjoint C: min sigma_e(C), +inf in finite dimension
//
// Structured reps are evaluated exactly from their tail data; dense inputs
// use the finite-dimensional conventions; finite-rank-perturbed reps fall
// back to flagged truncation estimates where no exact route exists.

#pragma once

#include <cstddef>

#include "rcc/extended_real.hpp"
#include "rcc/operator_rep.hpp"

namespace rcc {

struct GammaResult {
    ExtendedReal value;
    bool range_closed = false;
    bool exact = true;  // false: truncation estimate only
};

struct GammaEResult {
    ExtendedReal value;
    bool cokernel_finite = false;
    bool exact = true;
};

struct EssNormResult {
    double value = 0.0;
    bool exact = true;
};

struct ModuliReport {
    ExtendedReal gamma;
    ExtendedReal gamma_e;
    double ess_norm = 0.0;
    bool range_closed = false;
    bool cokernel_finite = false;
    bool gamma_exact = true;
    bool gamma_e_exact = true;
    bool ess_norm_exact = true;
};

GammaResult gamma(const OperatorRep& a);

GammaEResult gamma_e(const OperatorRep& a);

EssNormResult essential_norm(const OperatorRep& a);

// throws NotSelfAdjoint
ExtendedReal m_e(const OperatorRep& c);

struct WitnessCheck {
    bool pass = false;
    double margin = 0.0;      // lambda_min - gamma^2
    double lambda_min = 0.0;  // of the truncated restriction of A*A + T*T
};

// Checks ||Ax||^2 + ||Tx||^2 >= gamma^2 ||x||^2 on the truncated cokernel;
// a pass is evidence for gamma_e(A) >= gamma. T must be compact.
WitnessCheck gamma_e_witness_check(const OperatorRep& a, const OperatorRep& t, double gamma,
                                   std::size_t n);

// Best lambda_min of the n-truncation of a self-adjoint diagonal rep over
// self-adjoint perturbations of rank <= rank_budget: the (rank_budget+1)-th
// smallest truncated diagonal entry. Nondecreasing in rank_budget and
// approaches m_e from below as rank_budget and n grow.
double m_e_bruteforce_oracle(const OperatorRep& c, std::size_t rank_budget, std::size_t n);

ModuliReport moduli_report(const OperatorRep& a);

}  // namespace rcc
