// dense_matrix.hpp — complex dense matrices, row-major.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace rcc {

using Complex = std::complex<double>;

class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols) {}

    // row-major entries; throws on size mismatch or non-finite values
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    // nested initializer, for literals in tests and model builders
    DenseMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(const std::vector<Complex>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const {
        return entries_[i * cols_ + j];
    }

    const std::vector<Complex>& entries() const { return entries_; }
    std::vector<Complex>& entries() { return entries_; }

    DenseMatrix adjoint() const;
    DenseMatrix transpose() const;
    DenseMatrix conj() const;

    DenseMatrix operator*(const DenseMatrix& rhs) const;  // BLAS-backed
    DenseMatrix operator+(const DenseMatrix& rhs) const;
    DenseMatrix operator-(const DenseMatrix& rhs) const;
    DenseMatrix operator*(Complex s) const;

    std::vector<Complex> apply(const std::vector<Complex>& x) const;

    // rows [r0,r1) x cols [c0,c1)
    DenseMatrix block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const;

    // columns listed in `idx`, in order
    DenseMatrix select_columns(const std::vector<std::size_t>& idx) const;

    double max_abs() const;
    double frobenius_norm() const;

    bool is_square() const { return rows_ == cols_; }
    bool is_hermitian(double tol) const;
    // true when every entry has zero imaginary part (enables real LAPACK paths)
    bool is_real() const;

    bool all_finite() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

// direct sum: diag(a, b)
DenseMatrix direct_sum(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace rcc
