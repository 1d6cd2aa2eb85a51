// models.hpp — closed-form model families with analytic oracles.
//
// two_subspace_system      pairs of lines at per-block angles theta_k on
//                          l2(N; C^2); ||P1 P2||_e = limsup cos theta_k and
//                          the Gram spectrum is {1 +- cos theta_k}
// graph_example            X1 = Y (+) 0 and X2 = Graph(A) for a diagonal A,
//                          in the 2x2-block basis; cos theta_k =
//                          1/sqrt(1+|a_k|^2), so entries a_k -> 0 reproduce
//                          the nonclosed-sum counterexample
// coordinate_projections   projections onto eventually periodic 0/1
//                          coordinate patterns; eps_ij is 1 when two tails
//                          share a coordinate and 0 otherwise
// random_block_hermitian   seeded fuzz input for the block eigenvalue bound

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rcc/certify.hpp"
#include "rcc/operator_rep.hpp"

namespace rcc {

struct AngleModel {
    std::vector<double> head_cos;         // cosines in [0,1]
    std::vector<double> tail_cos_period;  // nonempty, cosines in [0,1]
    struct Decay {
        std::vector<double> coeffs;  // same length as tail_cos_period
        double ratio;                // |ratio| < 1
    };
    std::optional<Decay> decay;

    // cosine of block k (head, then periodic tail with optional decay)
    double cos_at(std::size_t k) const;
};

struct TwoSubspaceSystem {
    SystemSpec system;  // the two projections as EPBlock reps
    double ess_cos;     // ||P1 P2||_e = max tail cosine
    std::vector<double> resolved_cos;  // cosines materialized into the head
    std::vector<double> tail_cos_period;

    double cos_at(std::size_t k) const;
    // analytic Gram spectrum of the n-block truncation: {1 +- cos_k}, ascending
    std::vector<double> gram_eigs(std::size_t n) const;
};

TwoSubspaceSystem two_subspace_system(const AngleModel& model);

// a_diag must be an EPDiag; returns the projections onto Y (+) 0 and Graph(A)
SystemSpec graph_example(const OperatorRep& a_diag);

struct CoordinatePattern {
    std::vector<int> head;    // 0/1
    std::vector<int> period;  // 0/1, nonempty
};

struct CoordinateSystem {
    SystemSpec system;
    std::vector<std::vector<double>> eps_oracle;  // 1 when tails overlap, else 0
};

CoordinateSystem coordinate_projection_system(const std::vector<CoordinatePattern>& patterns);

struct BlockHermitian {
    DenseMatrix h;
    std::vector<std::size_t> partition;
};

// deterministic from the seed (splitmix64 stream): block sizes uniform in
// 1..max_block, entries uniform in [-1,1)
BlockHermitian random_block_hermitian(std::uint64_t seed, std::size_t n_blocks,
                                      std::size_t max_block);

}  // namespace rcc
