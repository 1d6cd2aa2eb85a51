// oracles.hpp — test-only reference computations, kept independent of the
// library's LAPACK-backed code paths.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rcc/dense_matrix.hpp"
#include "rcc/prng.hpp"

namespace rcc::testing {

// characteristic polynomial of a Hermitian matrix via Faddeev-LeVerrier:
// p(x) = x^n + c[n-1] x^(n-1) + ... + c[0]
inline std::vector<double> charpoly(const DenseMatrix& a) {
    const std::size_t n = a.rows();
    std::vector<double> c(n + 1, 0.0);
    c[n] = 1.0;
    DenseMatrix m = DenseMatrix::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        if (k > 1) {
            m = a * m;
            for (std::size_t i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
        }
        DenseMatrix am = a * m;
        Complex tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
        c[n - k] = -tr.real() / static_cast<double>(k);
    }
    return c;
}

inline double polyval(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
}

// all eigenvalues of a small Hermitian matrix (n <= 6, simple spectrum) by
// sign-change bisection of the characteristic polynomial over the
// Gershgorin interval
inline std::vector<double> charpoly_eigenvalues(const DenseMatrix& a) {
    const std::size_t n = a.rows();
    if (n > 6) throw std::runtime_error("charpoly oracle: n must be <= 6");
    std::vector<double> c = charpoly(a);
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) radius += std::abs(a(i, j));
        lo = std::min(lo, a(i, i).real() - radius);
        hi = std::max(hi, a(i, i).real() + radius);
    }
    lo -= 1.0;
    hi += 1.0;
    const std::size_t samples = 20000;
    std::vector<double> roots;
    double x_prev = lo, f_prev = polyval(c, lo);
    for (std::size_t s = 1; s <= samples && roots.size() < n; ++s) {
        const double x = lo + (hi - lo) * static_cast<double>(s) / samples;
        const double f = polyval(c, x);
        if (f == 0.0) {
            roots.push_back(x);
        } else if (f_prev != 0.0 && (f_prev < 0.0) != (f < 0.0)) {
            double a0 = x_prev, b0 = x, fa = f_prev;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a0 + b0);
                const double fm = polyval(c, mid);
                if (fm == 0.0) {
                    a0 = b0 = mid;
                    break;
                }
                if ((fa < 0.0) == (fm < 0.0)) {
                    a0 = mid;
                    fa = fm;
                } else {
                    b0 = mid;
                }
            }
            roots.push_back(0.5 * (a0 + b0));
        }
        x_prev = x;
        f_prev = f;
    }
    if (roots.size() != n)
        throw std::runtime_error("charpoly oracle: fewer sign changes than eigenvalues");
    return roots;
}

// largest eigenvalue of the PSD matrix A*A by power iteration; its square
// root is the spectral norm
inline double power_iteration_norm(const DenseMatrix& a, std::size_t iters = 2000) {
    DenseMatrix gram = a.adjoint() * a;
    const std::size_t n = gram.rows();
    SplitMix64 rng(12345);
    std::vector<Complex> v(n);
    for (auto& z : v) z = Complex{rng.next_signed(), rng.next_signed()};
    double lambda = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        std::vector<Complex> w = gram.apply(v);
        double norm = 0.0;
        for (const auto& z : w) norm += std::norm(z);
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        lambda = norm;  // Rayleigh quotient of the previous unit vector
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    }
    return std::sqrt(lambda);
}

// smallest eigenvalue of a Hermitian matrix by shifted power iteration
inline double shifted_power_min_eig(const DenseMatrix& h, std::size_t iters = 4000) {
    const std::size_t n = h.rows();
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(h(i, j));
        shift = std::max(shift, row);
    }
    DenseMatrix s = DenseMatrix::identity(n) * Complex{shift} - h;  // PSD, max eig = shift - min
    SplitMix64 rng(54321);
    std::vector<Complex> v(n);
    for (auto& z : v) z = Complex{rng.next_signed(), rng.next_signed()};
    double lambda = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        std::vector<Complex> w = s.apply(v);
        double norm = 0.0;
        for (const auto& z : w) norm += std::norm(z);
        norm = std::sqrt(norm);
        if (norm == 0.0) break;
        lambda = norm;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    }
    return shift - lambda;
}

inline DenseMatrix random_dense(std::size_t m, std::size_t n, SplitMix64& rng,
                                bool complex_entries = true) {
    DenseMatrix a(m, n);
    for (auto& e : a.entries())
        e = complex_entries ? Complex{rng.next_signed(), rng.next_signed()}
                            : Complex{rng.next_signed(), 0.0};
    return a;
}

inline DenseMatrix random_hermitian(std::size_t n, SplitMix64& rng) {
    DenseMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        h(i, i) = rng.next_signed();
        for (std::size_t j = i + 1; j < n; ++j) {
            Complex v{rng.next_signed(), rng.next_signed()};
            h(i, j) = v;
            h(j, i) = std::conj(v);
        }
    }
    return h;
}

// unitary by two rounds of modified Gram-Schmidt on a random matrix
inline DenseMatrix random_unitary(std::size_t n, SplitMix64& rng) {
    DenseMatrix q = random_dense(n, n, rng);
    for (int round = 0; round < 2; ++round) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < j; ++k) {
                Complex proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += q(i, j) * std::conj(q(i, k));
                for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
            }
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm += std::norm(q(i, j));
            norm = std::sqrt(norm);
            for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
        }
    }
    return q;
}

}  // namespace rcc::testing
