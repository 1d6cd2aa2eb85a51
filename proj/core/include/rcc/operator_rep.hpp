// operator_rep.hpp — structured bounded operators on l2 with exact
// essential-spectral calculus.
//
// The representable classes are the smallest family closed (within stated
// limits) under adjoint and composition that realizes the model families
// exactly:
//
//   Dense              finite matrix, C^n -> C^m
//   EPDiag             diagonal on l2(N): finite head, then an exactly
//                      periodic tail, optionally plus a geometric decay term
//                      tail[j%p] + coeff[j%p] * ratio^j
//   EPBlock            block-diagonal on l2(N; C^d): finite head of d x d
//                      blocks, then an exactly periodic block tail
//   FiniteRankPerturb  base + sum_i left_i (right_i)^*  with finitely
//                      supported vectors (the implementable compact class)
//   DirectSum          orthogonal direct sum of parts
//
// Essential quantities (essential spectrum, essential norm, compactness) are
// decided structurally from the tail data, never from truncations.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "rcc/dense_matrix.hpp"

namespace rcc {

// finitely supported coordinate vector; support sorted by index, no zeros
struct SparseVector {
    std::vector<std::pair<std::size_t, Complex>> support;

    SparseVector() = default;
    explicit SparseVector(std::vector<std::pair<std::size_t, Complex>> s);

    bool empty() const { return support.empty(); }
    std::size_t max_index() const { return support.empty() ? 0 : support.back().first; }
    double norm() const;
};

// <x, y> = sum x_k conj(y_k)
Complex inner(const SparseVector& x, const SparseVector& y);

struct GeometricDecay {
    std::vector<Complex> coeffs;  // same length as the tail period
    double ratio;                 // |ratio| < 1
};

struct Dense {
    DenseMatrix m;
};

struct EPDiag {
    std::vector<Complex> head;
    std::vector<Complex> tail_period;  // nonempty
    std::optional<GeometricDecay> decay;
};

struct EPBlock {
    std::size_t d = 1;
    std::vector<DenseMatrix> head;
    std::vector<DenseMatrix> tail_period;  // nonempty, all d x d
};

class OperatorRep;

struct FiniteRankPerturb {
    std::shared_ptr<const OperatorRep> base;
    std::vector<SparseVector> left;   // codomain vectors
    std::vector<SparseVector> right;  // domain vectors, same count
};

struct DirectSum {
    std::vector<OperatorRep> parts;        // nonempty
    std::vector<std::size_t> allocation;   // per-part block budget, default all 1
};

class OperatorRep {
  public:
    using Variant = std::variant<Dense, EPDiag, EPBlock, FiniteRankPerturb, DirectSum>;

    // validating constructors (class invariants enforced here)
    OperatorRep(Dense v);              // NOLINT(google-explicit-constructor)
    OperatorRep(EPDiag v);             // NOLINT
    OperatorRep(EPBlock v);            // NOLINT
    OperatorRep(FiniteRankPerturb v);  // NOLINT
    OperatorRep(DirectSum v);          // NOLINT

    const Variant& node() const { return *v_; }

    template <class T>
    const T* get_if() const {
        return std::get_if<T>(v_.get());
    }

  private:
    std::shared_ptr<const Variant> v_;  // immutable, cheap to copy
};

// one orthogonal channel of a coordinate space
struct SpaceChannel {
    bool infinite = false;
    std::size_t dim = 0;  // block size when infinite, dimension when finite
    friend bool operator==(const SpaceChannel&, const SpaceChannel&) = default;
};
using SpaceDesc = std::vector<SpaceChannel>;

SpaceDesc domain_space(const OperatorRep& a);
SpaceDesc codomain_space(const OperatorRep& a);

struct EssentialSpectrumSet {
    std::vector<double> points;     // sorted, deduplicated within 1e-12
    bool finite_dimensional = false;  // distinguished finite-dimensional outcome
};

// A* within the same variant family.
OperatorRep adjoint(const OperatorRep& a);

// A o B, exactly, when the pair of classes composes; throws
// IncompatibleShapes or UnsupportedComposition otherwise.
OperatorRep compose(const OperatorRep& a, const OperatorRep& b);

// leading principal section after n blocks (n coordinates for scalar
// channels, d*n for block channels; DirectSum parts get n * allocation).
DenseMatrix truncate(const OperatorRep& a, std::size_t n);

// (rows, cols) of truncate(a, n)
std::pair<std::size_t, std::size_t> truncate_shape(const OperatorRep& a, std::size_t n);

// essential spectrum of a self-adjoint rep; throws NotSelfAdjoint.
EssentialSpectrumSet essential_spectrum(const OperatorRep& c);

bool is_compact(const OperatorRep& a);

// structural self-adjointness test (never symmetrizes)
bool is_self_adjoint(const OperatorRep& a);

// structurally the zero operator (conservative for perturbed reps)
bool is_zero(const OperatorRep& a);

// c * A
OperatorRep scale(const OperatorRep& a, Complex c);

// image of a finitely supported vector (exact for every class)
SparseVector apply(const OperatorRep& a, const SparseVector& x);

// orthonormal columns spanning the cokernel H (-) Ker(A) of the n-block
// truncation: structural zero coordinates for EPDiag, per-block singular
// data for EPBlock, numerical rank for Dense and perturbed reps.
DenseMatrix cokernel_injection(const OperatorRep& a, std::size_t n);

// diagonal entry / block at position k
Complex ep_diag_entry(const EPDiag& d, std::size_t k);
const DenseMatrix& ep_block_at(const EPBlock& b, std::size_t k);

}  // namespace rcc
