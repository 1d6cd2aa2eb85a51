// spectral.hpp — dense Hermitian eigendecomposition, singular values,
// numerical rank, spectral norm. This is the oracle layer the structured
// operator calculus is cross-validated against.

#pragma once

#include <optional>
#include <vector>

#include "rcc/dense_matrix.hpp"

namespace rcc {

struct Spectrum {
    std::vector<double> values;           // ascending
    std::optional<DenseMatrix> vectors;   // orthonormal columns, same order
};

// Eigendecomposition of a Hermitian matrix. Values ascending, vectors
// orthonormal; residual ||Hv - lambda v|| <= 1e-9 * ||H|| per pair.
// Throws DimensionMismatch (not square) or NonHermitian (symmetry violated
// beyond 1e-12 relative tolerance).
Spectrum eigh(const DenseMatrix& h);

// Eigenvalues only (ascending); same preconditions as eigh.
std::vector<double> eigh_values(const DenseMatrix& h);

// Singular values, descending.
std::vector<double> svd_values(const DenseMatrix& a);

// Right singular vectors (columns, descending sigma order) alongside values.
struct SingularTriplets {
    std::vector<double> values;  // descending
    DenseMatrix right_vectors;   // cols x min(rows,cols), orthonormal columns
};
SingularTriplets svd_right_vectors(const DenseMatrix& a);

// Count of singular values strictly greater than tol.
// Default tol: max(rows, cols) * eps * sigma_max.
std::size_t numerical_rank(const DenseMatrix& a, std::optional<double> tolerance = {});

// Largest singular value.
double spectral_norm(const DenseMatrix& a);

}  // namespace rcc
