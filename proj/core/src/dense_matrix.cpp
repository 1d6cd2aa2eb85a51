#include "rcc/dense_matrix.hpp"

#include <cmath>
#include <cstddef>

#include "rcc/errors.hpp"

extern "C" {
void zgemm_(const char* transa, const char* transb, const int* m, const int* n, const int* k,
            const rcc::Complex* alpha, const rcc::Complex* a, const int* lda,
            const rcc::Complex* b, const int* ldb, const rcc::Complex* beta, rcc::Complex* c,
            const int* ldc);
void dgemm_(const char* transa, const char* transb, const int* m, const int* n, const int* k,
            const double* alpha, const double* a, const int* lda, const double* b,
            const int* ldb, const double* beta, double* c, const int* ldc);
}

namespace rcc {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
        throw DimensionMismatch("DenseMatrix: entries.length != rows*cols");
    if (!all_finite()) throw Error("DenseMatrix: non-finite entry");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionMismatch("DenseMatrix: ragged initializer");
        for (Complex z : r) entries_.push_back(z);
    }
    if (!all_finite()) throw Error("DenseMatrix: non-finite entry");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(const std::vector<Complex>& d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

DenseMatrix DenseMatrix::adjoint() const {
    DenseMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

DenseMatrix DenseMatrix::conj() const {
    DenseMatrix m(rows_, cols_);
    for (std::size_t k = 0; k < entries_.size(); ++k) m.entries_[k] = std::conj(entries_[k]);
    return m;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw DimensionMismatch("DenseMatrix: product shape mismatch");
    DenseMatrix out(rows_, rhs.cols_);
    if (rows_ == 0 || rhs.cols_ == 0 || cols_ == 0) return out;
    // row-major C = A*B is column-major C^T = B^T * A^T
    const int m = static_cast<int>(rhs.cols_);
    const int n = static_cast<int>(rows_);
    const int k = static_cast<int>(cols_);
    if (is_real() && rhs.is_real()) {
        std::vector<double> a(entries_.size()), b(rhs.entries_.size()), c(out.entries_.size());
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = entries_[i].real();
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = rhs.entries_[i].real();
        const double one = 1.0, zero = 0.0;
        dgemm_("N", "N", &m, &n, &k, &one, b.data(), &m, a.data(), &k, &zero, c.data(), &m);
        for (std::size_t i = 0; i < c.size(); ++i) out.entries_[i] = c[i];
        return out;
    }
    const Complex one = 1.0, zero = 0.0;
    zgemm_("N", "N", &m, &n, &k, &one, rhs.entries_.data(), &m, entries_.data(), &k, &zero,
           out.entries_.data(), &m);
    return out;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw DimensionMismatch("DenseMatrix: sum shape mismatch");
    DenseMatrix out = *this;
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] += rhs.entries_[i];
    return out;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw DimensionMismatch("DenseMatrix: difference shape mismatch");
    DenseMatrix out = *this;
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] -= rhs.entries_[i];
    return out;
}

DenseMatrix DenseMatrix::operator*(Complex s) const {
    DenseMatrix out = *this;
    for (auto& e : out.entries_) e *= s;
    return out;
}

std::vector<Complex> DenseMatrix::apply(const std::vector<Complex>& x) const {
    if (x.size() != cols_) throw DimensionMismatch("DenseMatrix: apply shape mismatch");
    std::vector<Complex> y(rows_, Complex{0.0});
    for (std::size_t i = 0; i < rows_; ++i) {
        Complex acc = 0.0;
        const Complex* row = entries_.data() + i * cols_;
        for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

DenseMatrix DenseMatrix::block(std::size_t r0, std::size_t r1, std::size_t c0,
                               std::size_t c1) const {
    if (r1 < r0 || c1 < c0 || r1 > rows_ || c1 > cols_)
        throw DimensionMismatch("DenseMatrix: block out of range");
    DenseMatrix out(r1 - r0, c1 - c0);
    for (std::size_t i = r0; i < r1; ++i)
        for (std::size_t j = c0; j < c1; ++j) out(i - r0, j - c0) = (*this)(i, j);
    return out;
}

DenseMatrix DenseMatrix::select_columns(const std::vector<std::size_t>& idx) const {
    DenseMatrix out(rows_, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        if (idx[j] >= cols_) throw DimensionMismatch("DenseMatrix: column index out of range");
        for (std::size_t i = 0; i < rows_; ++i) out(i, j) = (*this)(i, idx[j]);
    }
    return out;
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e));
    return m;
}

double DenseMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& e : entries_) s += std::norm(e);
    return std::sqrt(s);
}

bool DenseMatrix::is_hermitian(double tol) const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
}

bool DenseMatrix::is_real() const {
    for (const auto& e : entries_)
        if (e.imag() != 0.0) return false;
    return true;
}

bool DenseMatrix::all_finite() const {
    for (const auto& e : entries_)
        if (!finite(e)) return false;
    return true;
}

DenseMatrix direct_sum(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
    return out;
}

}  // namespace rcc
