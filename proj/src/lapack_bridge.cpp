#include "hodgelab/lapack_bridge.hpp"

#include <algorithm>
#include <complex>

extern "C" {
void zheevd_(const char* jobz, const char* uplo, const int* n, std::complex<double>* a,
             const int* lda, double* w, std::complex<double>* work, const int* lwork,
             double* rwork, const int* lrwork, int* iwork, const int* liwork, int* info);
void zhegvd_(const int* itype, const char* jobz, const char* uplo, const int* n,
             std::complex<double>* a, const int* lda, std::complex<double>* b, const int* ldb,
             double* w, std::complex<double>* work, const int* lwork, double* rwork,
             const int* lrwork, int* iwork, const int* liwork, int* info);
void zpotrf_(const char* uplo, const int* n, std::complex<double>* a, const int* lda, int* info);
void zgesdd_(const char* jobz, const int* m, const int* n, std::complex<double>* a, const int* lda,
             double* s, std::complex<double>* u, const int* ldu, std::complex<double>* vt,
             const int* ldvt, std::complex<double>* work, const int* lwork, double* rwork,
             int* iwork, int* info);
void zgetrf_(const int* m, const int* n, std::complex<double>* a, const int* lda, int* ipiv,
             int* info);
void zgetrs_(const char* trans, const int* n, const int* nrhs, const std::complex<double>* a,
             const int* lda, const int* ipiv, std::complex<double>* b, const int* ldb, int* info);
}

namespace hodgelab::lapackb {

std::vector<double> heig(Eigen::MatrixXcd& A, bool vectors) {
    const int n = (int)A.rows();
    if (A.cols() != n) throw dim_error("heig needs a square matrix");
    std::vector<double> w((size_t)std::max(n, 1));
    if (n == 0) return {};
    const char jobz = vectors ? 'V' : 'N';
    const char uplo = 'L';
    int lwork = -1, lrwork = -1, liwork = -1, info = 0;
    std::complex<double> wkq;
    double rwkq;
    int iwkq;
    zheevd_(&jobz, &uplo, &n, A.data(), &n, w.data(), &wkq, &lwork, &rwkq, &lrwork, &iwkq,
            &liwork, &info);
    if (info != 0) throw numeric_error("zheevd workspace query failed");
    lwork = (int)wkq.real();
    lrwork = (int)rwkq;
    liwork = iwkq;
    std::vector<std::complex<double>> work((size_t)lwork);
    std::vector<double> rwork((size_t)lrwork);
    std::vector<int> iwork((size_t)liwork);
    zheevd_(&jobz, &uplo, &n, A.data(), &n, w.data(), work.data(), &lwork, rwork.data(), &lrwork,
            iwork.data(), &liwork, &info);
    if (info != 0) throw numeric_error("zheevd failed to converge");
    return w;
}

std::vector<double> gheig(Eigen::MatrixXcd& A, Eigen::MatrixXcd& B, bool vectors) {
    const int n = (int)A.rows();
    if (A.cols() != n || B.rows() != n || B.cols() != n)
        throw dim_error("gheig needs matching square matrices");
    std::vector<double> w((size_t)std::max(n, 1));
    if (n == 0) return {};
    const int itype = 1;
    const char jobz = vectors ? 'V' : 'N';
    const char uplo = 'L';
    int lwork = -1, lrwork = -1, liwork = -1, info = 0;
    std::complex<double> wkq;
    double rwkq;
    int iwkq;
    zhegvd_(&itype, &jobz, &uplo, &n, A.data(), &n, B.data(), &n, w.data(), &wkq, &lwork, &rwkq,
            &lrwork, &iwkq, &liwork, &info);
    if (info != 0) throw numeric_error("zhegvd workspace query failed");
    lwork = (int)wkq.real();
    lrwork = (int)rwkq;
    liwork = iwkq;
    std::vector<std::complex<double>> work((size_t)lwork);
    std::vector<double> rwork((size_t)lrwork);
    std::vector<int> iwork((size_t)liwork);
    zhegvd_(&itype, &jobz, &uplo, &n, A.data(), &n, B.data(), &n, w.data(), work.data(), &lwork,
            rwork.data(), &lrwork, iwork.data(), &liwork, &info);
    if (info > n) throw metric_error("gheig: B factorization failed, matrix not positive definite");
    if (info != 0) throw numeric_error("zhegvd failed to converge");
    return w;
}

bool cholesky_lower(Eigen::MatrixXcd& A) {
    const int n = (int)A.rows();
    if (A.cols() != n) throw dim_error("cholesky needs a square matrix");
    if (n == 0) return true;
    const char uplo = 'L';
    int info = 0;
    zpotrf_(&uplo, &n, A.data(), &n, &info);
    if (info < 0) throw numeric_error("zpotrf: bad argument");
    if (info > 0) return false;
    // zpotrf leaves the strict upper triangle untouched; clear it.
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i) A(i, j) = 0.0;
    return true;
}

SvdResult svd(const Eigen::MatrixXcd& A, bool full) {
    const int m = (int)A.rows(), n = (int)A.cols();
    const int mn = std::min(m, n);
    SvdResult r;
    if (m == 0 || n == 0) {
        r.U = full ? Eigen::MatrixXcd::Identity(m, m) : Eigen::MatrixXcd(m, 0);
        r.Vh = full ? Eigen::MatrixXcd::Identity(n, n) : Eigen::MatrixXcd(0, n);
        r.sigma = Eigen::VectorXd(0);
        return r;
    }
    Eigen::MatrixXcd work_a = A;
    const char jobz = full ? 'A' : 'S';
    const int ucols = full ? m : mn;
    const int vrows = full ? n : mn;
    r.U.resize(m, ucols);
    r.Vh.resize(vrows, n);
    r.sigma.resize(mn);
    const int ldu = m, ldvt = std::max(vrows, 1);
    int lwork = -1, info = 0;
    std::complex<double> wkq;
    const size_t lrwork =
        std::max<size_t>((size_t)mn * std::max(5 * (size_t)mn + 7, 2 * (size_t)std::max(m, n) +
                                                                       2 * (size_t)mn + 1),
                         1) +
        16;
    std::vector<double> rwork(lrwork);
    std::vector<int> iwork((size_t)8 * mn);
    zgesdd_(&jobz, &m, &n, work_a.data(), &m, r.sigma.data(), r.U.data(), &ldu, r.Vh.data(), &ldvt,
            &wkq, &lwork, rwork.data(), iwork.data(), &info);
    if (info != 0) throw numeric_error("zgesdd workspace query failed");
    lwork = (int)wkq.real();
    std::vector<std::complex<double>> work((size_t)lwork);
    zgesdd_(&jobz, &m, &n, work_a.data(), &m, r.sigma.data(), r.U.data(), &ldu, r.Vh.data(), &ldvt,
            work.data(), &lwork, rwork.data(), iwork.data(), &info);
    if (info != 0) throw numeric_error("zgesdd failed to converge");
    return r;
}

Eigen::MatrixXcd lu_solve(Eigen::MatrixXcd A, Eigen::MatrixXcd B) {
    const int n = (int)A.rows();
    if (A.cols() != n) throw dim_error("lu_solve needs a square matrix");
    if (B.rows() != n) throw dim_error("lu_solve right-hand side mismatch");
    if (n == 0) return B;
    std::vector<int> ipiv((size_t)n);
    int info = 0;
    zgetrf_(&n, &n, A.data(), &n, ipiv.data(), &info);
    if (info != 0) throw precondition_error("lu_solve: singular matrix");
    const char trans = 'N';
    const int nrhs = (int)B.cols();
    if (nrhs > 0) {
        zgetrs_(&trans, &n, &nrhs, A.data(), &n, ipiv.data(), B.data(), &n, &info);
        if (info != 0) throw numeric_error("zgetrs failed");
    }
    return B;
}

} // namespace hodgelab::lapackb
