#include "rcc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcc/errors.hpp"
#include "rcc/tolerances.hpp"

extern "C" {
void zheevd_(const char* jobz, const char* uplo, const int* n, rcc::Complex* a, const int* lda,
             double* w, rcc::Complex* work, const int* lwork, double* rwork, const int* lrwork,
             int* iwork, const int* liwork, int* info);
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork,
             int* info);
void zgesvd_(const char* jobu, const char* jobvt, const int* m, const int* n, rcc::Complex* a,
             const int* lda, double* s, rcc::Complex* u, const int* ldu, rcc::Complex* vt,
             const int* ldvt, rcc::Complex* work, const int* lwork, double* rwork, int* info);
void dgesvd_(const char* jobu, const char* jobvt, const int* m, const int* n, double* a,
             const int* lda, double* s, double* u, const int* ldu, double* vt, const int* ldvt,
             double* work, const int* lwork, int* info);
}

namespace rcc {

namespace {

void check_square_hermitian(const DenseMatrix& h) {
    if (!h.is_square()) throw DimensionMismatch("eigh: matrix is not square");
    const double tol = tol::hermitian_rel() * std::max(1.0, h.max_abs());
    if (!h.is_hermitian(tol)) throw NonHermitian("eigh: symmetry tolerance violated");
}

std::vector<Complex> to_col_major(const DenseMatrix& m) {
    std::vector<Complex> a(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) a[j * m.rows() + i] = m(i, j);
    return a;
}

Spectrum eigh_real(const DenseMatrix& h, bool with_vectors) {
    const int n = static_cast<int>(h.rows());
    std::vector<double> a(h.rows() * h.rows());
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.rows(); ++j) a[j * h.rows() + i] = h(i, j).real();
    std::vector<double> w(std::max(1, n));
    const char* jobz = with_vectors ? "V" : "N";
    int info = 0, lwork = -1, liwork = -1, iwq = 0;
    double wq = 0.0;
    dsyevd_(jobz, "L", &n, a.data(), &n, w.data(), &wq, &lwork, &iwq, &liwork, &info);
    lwork = static_cast<int>(wq);
    liwork = iwq;
    std::vector<double> work(std::max(1, lwork));
    std::vector<int> iwork(std::max(1, liwork));
    dsyevd_(jobz, "L", &n, a.data(), &n, w.data(), work.data(), &lwork, iwork.data(), &liwork,
            &info);
    if (info != 0) throw Error("dsyevd failed, info=" + std::to_string(info));
    Spectrum s;
    s.values = std::move(w);
    if (with_vectors) {
        DenseMatrix v(h.rows(), h.rows());
        for (std::size_t i = 0; i < h.rows(); ++i)
            for (std::size_t j = 0; j < h.rows(); ++j) v(i, j) = a[j * h.rows() + i];
        s.vectors = std::move(v);
    }
    return s;
}

Spectrum eigh_impl(const DenseMatrix& h, bool with_vectors) {
    check_square_hermitian(h);
    if (h.rows() == 0) return {};
    if (h.is_real()) return eigh_real(h, with_vectors);

    const int n = static_cast<int>(h.rows());
    std::vector<Complex> a = to_col_major(h);
    std::vector<double> w(h.rows());
    const char* jobz = with_vectors ? "V" : "N";
    int info = 0, lwork = -1, lrwork = -1, liwork = -1, iwq = 0;
    Complex wq = 0.0;
    double rwq = 0.0;
    zheevd_(jobz, "L", &n, a.data(), &n, w.data(), &wq, &lwork, &rwq, &lrwork, &iwq, &liwork,
            &info);
    lwork = static_cast<int>(wq.real());
    lrwork = static_cast<int>(rwq);
    liwork = iwq;
    std::vector<Complex> work(std::max(1, lwork));
    std::vector<double> rwork(std::max(1, lrwork));
    std::vector<int> iwork(std::max(1, liwork));
    zheevd_(jobz, "L", &n, a.data(), &n, w.data(), work.data(), &lwork, rwork.data(), &lrwork,
            iwork.data(), &liwork, &info);
    if (info != 0) throw Error("zheevd failed, info=" + std::to_string(info));
    Spectrum s;
    s.values = std::move(w);
    if (with_vectors) {
        DenseMatrix v(h.rows(), h.rows());
        for (std::size_t i = 0; i < h.rows(); ++i)
            for (std::size_t j = 0; j < h.rows(); ++j) v(i, j) = a[j * h.rows() + i];
        s.vectors = std::move(v);
    }
    return s;
}

}  // namespace

Spectrum eigh(const DenseMatrix& h) { return eigh_impl(h, true); }

std::vector<double> eigh_values(const DenseMatrix& h) { return eigh_impl(h, false).values; }

std::vector<double> svd_values(const DenseMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return {};
    // the row-major buffer is A^T in column-major; singular values are the same
    const int m = static_cast<int>(a.cols());
    const int n = static_cast<int>(a.rows());
    const int k = std::min(m, n);
    std::vector<double> s(k);
    int info = 0, lwork = -1;
    if (a.is_real()) {
        std::vector<double> buf(a.entries().size());
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = a.entries()[i].real();
        double wq = 0.0;
        dgesvd_("N", "N", &m, &n, buf.data(), &m, s.data(), nullptr, &m, nullptr, &n, &wq,
                &lwork, &info);
        lwork = static_cast<int>(wq);
        std::vector<double> work(std::max(1, lwork));
        dgesvd_("N", "N", &m, &n, buf.data(), &m, s.data(), nullptr, &m, nullptr, &n,
                work.data(), &lwork, &info);
    } else {
        std::vector<Complex> buf = a.entries();
        std::vector<double> rwork(5 * static_cast<std::size_t>(k));
        Complex wq = 0.0;
        zgesvd_("N", "N", &m, &n, buf.data(), &m, s.data(), nullptr, &m, nullptr, &n, &wq,
                &lwork, rwork.data(), &info);
        lwork = static_cast<int>(wq.real());
        std::vector<Complex> work(std::max(1, lwork));
        zgesvd_("N", "N", &m, &n, buf.data(), &m, s.data(), nullptr, &m, nullptr, &n,
                work.data(), &lwork, rwork.data(), &info);
    }
    if (info != 0) throw Error("gesvd failed, info=" + std::to_string(info));
    return s;
}

SingularTriplets svd_right_vectors(const DenseMatrix& a) {
    // right singular vectors of A are eigenvectors of A*A; the Hermitian
    // route keeps one code path and the contract tolerance (1e-9 on squares)
    SingularTriplets t;
    if (a.rows() == 0 || a.cols() == 0) {
        t.right_vectors = DenseMatrix(a.cols(), 0);
        return t;
    }
    DenseMatrix gram = a.adjoint() * a;
    // symmetrize roundoff before the Hermitian solve
    for (std::size_t i = 0; i < gram.rows(); ++i)
        for (std::size_t j = i; j < gram.cols(); ++j) {
            Complex v = 0.5 * (gram(i, j) + std::conj(gram(j, i)));
            gram(i, j) = v;
            gram(j, i) = std::conj(v);
        }
    Spectrum s = eigh(gram);
    const std::size_t k = std::min(a.rows(), a.cols());
    const std::size_t n = a.cols();
    t.values.resize(k);
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double ev = s.values[n - 1 - i];
        t.values[i] = ev > 0.0 ? std::sqrt(ev) : 0.0;
        order[i] = n - 1 - i;
    }
    t.right_vectors = s.vectors->select_columns(order);
    return t;
}

std::size_t numerical_rank(const DenseMatrix& a, std::optional<double> tolerance) {
    if (tolerance && *tolerance < 0.0) throw Error("numerical_rank: tol must be >= 0");
    std::vector<double> s = svd_values(a);
    if (s.empty()) return 0;
    const double tol = tolerance ? *tolerance : tol::rank_tol(a.rows(), a.cols(), s.front());
    std::size_t r = 0;
    for (double v : s)
        if (v > tol) ++r;
    return r;
}

double spectral_norm(const DenseMatrix& a) {
    std::vector<double> s = svd_values(a);
    return s.empty() ? 0.0 : s.front();
}

}  // namespace rcc
