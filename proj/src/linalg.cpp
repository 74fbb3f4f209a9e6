#include "hodgelab/linalg.hpp"

#include <algorithm>
#include <limits>

#include "hodgelab/lapack_bridge.hpp"

namespace hodgelab {

namespace {

// Pivot preference: fewer GMP limbs keeps elimination entries small.
size_t entry_weight(const ExactC& v) {
    size_t w = mpz_size(v.re.get_num_mpz_t()) + mpz_size(v.re.get_den_mpz_t());
    w += mpz_size(v.im.get_num_mpz_t()) + mpz_size(v.im.get_den_mpz_t());
    return w;
}

MatF sym_part(const MatF& A) {
    MatF H = A.hconj();
    H += A;
    H *= FloatC(0.5, 0.0);
    return H;
}

void require_g_selfadjoint(const MatF& GA, const char* who) {
    double scale = std::max(1.0, fro_norm(GA));
    if (fro_norm(GA - GA.hconj()) > 1e-10 * scale)
        throw symmetry_error(std::string(who) + ": operator is not self-adjoint for this Gram");
}

} // namespace

// --- exact elimination --------------------------------------------------------

int rref_inplace(MatQ& M, std::vector<int>* pivot_cols) {
    const int m = M.rows(), n = M.cols();
    if (pivot_cols) pivot_cols->clear();
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int best = -1;
        size_t best_w = std::numeric_limits<size_t>::max();
        for (int i = rank; i < m; ++i) {
            if (M(i, col).is_zero()) continue;
            size_t w = entry_weight(M(i, col));
            if (w < best_w) {
                best_w = w;
                best = i;
                if (w <= 3) break;
            }
        }
        if (best < 0) continue;
        if (best != rank)
            for (int j = col; j < n; ++j) std::swap(M(rank, j), M(best, j));
        ExactC inv = ExactC(1) / M(rank, col);
        M(rank, col) = ExactC(1);
        for (int j = col + 1; j < n; ++j)
            if (!M(rank, j).is_zero()) M(rank, j) *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == rank || M(i, col).is_zero()) continue;
            ExactC f = M(i, col);
            M(i, col) = ExactC();
            for (int j = col + 1; j < n; ++j)
                if (!M(rank, j).is_zero()) M(i, j) -= f * M(rank, j);
        }
        if (pivot_cols) pivot_cols->push_back(col);
        ++rank;
    }
    return rank;
}

int exact_rank(const MatQ& M) {
    MatQ work = M;
    return rref_inplace(work);
}

namespace {

MatQ kernel_from_rref(const MatQ& R, const std::vector<int>& pivots) {
    const int n = R.cols();
    const int rank = (int)pivots.size();
    std::vector<char> is_pivot(n, 0);
    for (int p : pivots) is_pivot[p] = 1;
    MatQ K(n, n - rank);
    int kcol = 0;
    for (int f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        K(f, kcol) = ExactC(1);
        for (int i = 0; i < rank; ++i) K(pivots[i], kcol) = -R(i, f);
        ++kcol;
    }
    return K;
}

} // namespace

MatQ exact_kernel_basis(const MatQ& M) {
    MatQ R = M;
    std::vector<int> pivots;
    rref_inplace(R, &pivots);
    return kernel_from_rref(R, pivots);
}

std::optional<MatQ> exact_try_solve(const MatQ& A, const MatQ& B) {
    if (A.rows() != B.rows()) throw dim_error("solve: row mismatch");
    MatQ aug = MatQ::hstack({A, B});
    std::vector<int> pivots;
    int rank = rref_inplace(aug, &pivots);
    const int na = A.cols();
    for (int p : pivots)
        if (p >= na) return std::nullopt;
    MatQ X(na, B.cols());
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < B.cols(); ++j) X(pivots[i], j) = aug(i, na + j);
    return X;
}

MatQ exact_inverse(const MatQ& A) {
    if (A.rows() != A.cols()) throw dim_error("inverse needs a square matrix");
    auto X = exact_try_solve(A, MatQ::identity(A.rows()));
    if (!X || exact_rank(A) != A.rows()) throw precondition_error("inverse of singular matrix");
    return *X;
}

namespace {

// Hermitian elimination; positive definite iff every pivot is a positive real.
bool exact_pd_check(const MatQ& G) {
    const int n = G.rows();
    MatQ A = G;
    for (int k = 0; k < n; ++k) {
        const ExactC& d = A(k, k);
        if (!d.is_real() || sgn(d.re) <= 0) return false;
        for (int i = k + 1; i < n; ++i) {
            if (A(i, k).is_zero()) continue;
            ExactC f = A(i, k) / d;
            for (int j = k + 1; j < n; ++j)
                if (!A(k, j).is_zero()) A(i, j) -= f * A(k, j);
        }
    }
    return true;
}

} // namespace

// --- float kernels ------------------------------------------------------------

MatF orthonormal_image(const MatF& M, TolPolicy tol) {
    check_finite(M);
    if (M.cols() == 0 || M.rows() == 0) return MatF(M.rows(), 0);
    auto s = lapackb::svd(to_eigen(M), false);
    double smax = s.sigma.size() ? s.sigma[0] : 0.0;
    double thr = tol.threshold(smax, M.rows(), M.cols());
    int rank = 0;
    for (int i = 0; i < s.sigma.size(); ++i)
        if (s.sigma[i] > thr) ++rank;
    return from_eigen(s.U.leftCols(rank));
}

MatF float_kernel_basis(const MatF& M, TolPolicy tol) {
    check_finite(M);
    const int n = M.cols();
    if (n == 0) return MatF(0, 0);
    if (M.rows() == 0) return MatF::identity(n);
    auto s = lapackb::svd(to_eigen(M), true);
    double smax = s.sigma.size() ? s.sigma[0] : 0.0;
    double thr = tol.threshold(smax, M.rows(), M.cols());
    int rank = 0;
    for (int i = 0; i < s.sigma.size(); ++i)
        if (s.sigma[i] > thr) ++rank;
    return from_eigen(s.Vh.bottomRows(n - rank).adjoint());
}

int float_rank(const MatF& M, TolPolicy tol) {
    check_finite(M);
    if (M.cols() == 0 || M.rows() == 0) return 0;
    auto s = lapackb::svd(to_eigen(M), false);
    double smax = s.sigma.size() ? s.sigma[0] : 0.0;
    double thr = tol.threshold(smax, M.rows(), M.cols());
    int rank = 0;
    for (int i = 0; i < s.sigma.size(); ++i)
        if (s.sigma[i] > thr) ++rank;
    return rank;
}

// --- Gram forms ---------------------------------------------------------------

template <class S>
GramForm<S>::GramForm(Mat<S> G) : G_(std::move(G)) {
    const int n = G_.rows();
    if (G_.cols() != n) throw dim_error("Gram matrix must be square");
    if constexpr (scalar_traits<S>::exact) {
        if (!(G_ == G_.hconj())) throw metric_error("Gram matrix is not Hermitian");
        identity_ = (G_ == Mat<S>::identity(n));
        if (!identity_) {
            if (!exact_pd_check(G_)) throw metric_error("Gram matrix is not positive definite");
            factor_ = exact_inverse(G_);
        }
    } else {
        check_finite(G_);
        double scale = std::max(1.0, max_abs(G_));
        if (max_abs(G_ - G_.hconj()) > 1e-12 * scale)
            throw metric_error("Gram matrix is not Hermitian");
        identity_ = (G_ == Mat<S>::identity(n));
        if (!identity_) {
            Eigen::MatrixXcd L = to_eigen(sym_part(G_));
            if (!lapackb::cholesky_lower(L))
                throw metric_error("Gram matrix is not positive definite");
            factor_ = from_eigen(L);
        }
    }
}

template <class S>
GramForm<S> GramForm<S>::identity_form(int n) {
    GramForm g;
    g.G_ = Mat<S>::identity(n);
    g.identity_ = true;
    return g;
}

template <class S>
Mat<S> GramForm<S>::apply(const Mat<S>& X) const {
    if (X.rows() != dim()) throw dim_error("Gram apply: shape mismatch");
    if (identity_) return X;
    return G_ * X;
}

template <class S>
Mat<S> GramForm<S>::inv_apply(const Mat<S>& X) const {
    if (X.rows() != dim()) throw dim_error("Gram inv_apply: shape mismatch");
    if (identity_) return X;
    if constexpr (scalar_traits<S>::exact) {
        return factor_ * X;
    } else {
        // Solve L L^H Y = X with the cached Cholesky factor.
        Eigen::MatrixXcd L = to_eigen(factor_);
        Eigen::MatrixXcd Y = to_eigen(X);
        L.triangularView<Eigen::Lower>().solveInPlace(Y);
        L.adjoint().triangularView<Eigen::Upper>().solveInPlace(Y);
        return from_eigen(Y);
    }
}

template <class S>
S GramForm<S>::inner(const Mat<S>& u, const Mat<S>& v) const {
    if (u.cols() != 1 || v.cols() != 1) throw dim_error("inner product expects column vectors");
    Mat<S> r = v.hconj() * apply(u);
    return r(0, 0);
}

template class GramForm<ExactC>;
template class GramForm<FloatC>;

// --- subspaces ----------------------------------------------------------------

template <class S>
Subspace<S> Subspace<S>::span(const Mat<S>& vectors, TolPolicy tol) {
    Subspace out;
    out.ambient = vectors.rows();
    out.tol = tol;
    if constexpr (scalar_traits<S>::exact) {
        MatQ R = vectors.transpose();
        std::vector<int> pivots;
        int rank = rref_inplace(R, &pivots);
        MatQ B(vectors.rows(), rank);
        for (int i = 0; i < rank; ++i)
            for (int j = 0; j < vectors.rows(); ++j) B(j, i) = R(i, j);
        out.basis = B;
    } else {
        out.basis = orthonormal_image(vectors, tol);
    }
    return out;
}

template <class S>
Subspace<S> Subspace<S>::zero(int ambient, TolPolicy tol) {
    Subspace out;
    out.ambient = ambient;
    out.tol = tol;
    out.basis = Mat<S>(ambient, 0);
    return out;
}

template <class S>
Subspace<S> Subspace<S>::full(int ambient, TolPolicy tol) {
    Subspace out;
    out.ambient = ambient;
    out.tol = tol;
    out.basis = Mat<S>::identity(ambient);
    return out;
}

template struct Subspace<ExactC>;
template struct Subspace<FloatC>;

template <class S>
Subspace<S> subspace_sum(const Subspace<S>& U, const Subspace<S>& V) {
    if (U.ambient != V.ambient) throw dim_error("subspace sum: ambient mismatch");
    return Subspace<S>::span(Mat<S>::hstack({U.basis, V.basis}), U.tol);
}

template <class S>
Subspace<S> subspace_intersect(const Subspace<S>& U, const Subspace<S>& V) {
    if (U.ambient != V.ambient) throw dim_error("subspace intersect: ambient mismatch");
    if (U.dim() == 0 || V.dim() == 0) return Subspace<S>::zero(U.ambient, U.tol);
    Mat<S> W = Mat<S>::hstack({U.basis, -V.basis});
    Mat<S> K;
    if constexpr (scalar_traits<S>::exact)
        K = exact_kernel_basis(W);
    else
        K = float_kernel_basis(W, U.tol);
    Mat<S> top(U.dim(), K.cols());
    for (int i = 0; i < U.dim(); ++i)
        for (int j = 0; j < K.cols(); ++j) top(i, j) = K(i, j);
    return Subspace<S>::span(U.basis * top, U.tol);
}

template <class S>
Subspace<S> orth_complement(const Subspace<S>& U, const GramForm<S>& G) {
    if (G.dim() != U.ambient) throw dim_error("orth_complement: Gram dimension mismatch");
    if (U.dim() == 0) return Subspace<S>::full(U.ambient, U.tol);
    Mat<S> M = U.basis.hconj() * G.matrix();
    if constexpr (scalar_traits<S>::exact) {
        return Subspace<S>::span(exact_kernel_basis(M), U.tol);
    } else {
        Subspace<S> out;
        out.ambient = U.ambient;
        out.tol = U.tol;
        out.basis = float_kernel_basis(M, U.tol);
        return out;
    }
}

template <class S>
bool subspace_contains(const Subspace<S>& U, const Mat<S>& v) {
    if (v.rows() != U.ambient || v.cols() != 1) throw dim_error("contains expects an ambient vector");
    if constexpr (scalar_traits<S>::exact) {
        return exact_try_solve(U.basis, v).has_value();
    } else {
        MatF r = v - U.basis * (U.basis.hconj() * v);
        double nv = fro_norm(v);
        return fro_norm(r) <= U.tol.factor * std::max(1.0, nv) * std::max(U.ambient, 1);
    }
}

template <class S>
bool subspace_contains_all(const Subspace<S>& U, const Subspace<S>& V) {
    if (U.ambient != V.ambient) throw dim_error("contains_all: ambient mismatch");
    if (V.dim() == 0) return true;
    if constexpr (scalar_traits<S>::exact) {
        return exact_try_solve(U.basis, V.basis).has_value();
    } else {
        MatF R = V.basis - U.basis * (U.basis.hconj() * V.basis);
        return max_abs(R) <= U.tol.factor * std::max(U.ambient, 1);
    }
}

template <class S>
bool subspace_equal(const Subspace<S>& U, const Subspace<S>& V) {
    if (U.ambient != V.ambient) return false;
    if (U.dim() != V.dim()) return false;
    if constexpr (scalar_traits<S>::exact) {
        return U.basis == V.basis; // both canonical column-echelon forms
    } else {
        return subspace_contains_all(U, V) && subspace_contains_all(V, U);
    }
}

template <class S>
RankKernelImage<S> rank_kernel_image(const Mat<S>& M, TolPolicy tol) {
    RankKernelImage<S> out;
    if constexpr (scalar_traits<S>::exact) {
        MatQ R = M;
        std::vector<int> pivots;
        out.rank = rref_inplace(R, &pivots);
        out.kernel.ambient = M.cols();
        out.kernel.tol = tol;
        out.kernel.basis = kernel_from_rref(R, pivots);
        out.image = Subspace<S>::span(M.cols_subset(pivots), tol);
    } else {
        check_finite(M);
        const int m = M.rows(), n = M.cols();
        out.kernel = Subspace<S>::zero(n, tol);
        out.image = Subspace<S>::zero(m, tol);
        if (m == 0) {
            out.kernel = Subspace<S>::full(n, tol);
            return out;
        }
        if (n == 0) return out;
        auto s = lapackb::svd(to_eigen(M), true);
        double smax = s.sigma.size() ? s.sigma[0] : 0.0;
        double thr = tol.threshold(smax, m, n);
        int rank = 0;
        for (int i = 0; i < s.sigma.size(); ++i)
            if (s.sigma[i] > thr) ++rank;
        out.rank = rank;
        out.kernel.basis = from_eigen(s.Vh.bottomRows(n - rank).adjoint());
        out.image.basis = from_eigen(s.U.leftCols(rank));
    }
    return out;
}

template Subspace<ExactC> subspace_sum(const Subspace<ExactC>&, const Subspace<ExactC>&);
template Subspace<FloatC> subspace_sum(const Subspace<FloatC>&, const Subspace<FloatC>&);
template Subspace<ExactC> subspace_intersect(const Subspace<ExactC>&, const Subspace<ExactC>&);
template Subspace<FloatC> subspace_intersect(const Subspace<FloatC>&, const Subspace<FloatC>&);
template Subspace<ExactC> orth_complement(const Subspace<ExactC>&, const GramForm<ExactC>&);
template Subspace<FloatC> orth_complement(const Subspace<FloatC>&, const GramForm<FloatC>&);
template bool subspace_contains(const Subspace<ExactC>&, const Mat<ExactC>&);
template bool subspace_contains(const Subspace<FloatC>&, const Mat<FloatC>&);
template bool subspace_contains_all(const Subspace<ExactC>&, const Subspace<ExactC>&);
template bool subspace_contains_all(const Subspace<FloatC>&, const Subspace<FloatC>&);
template bool subspace_equal(const Subspace<ExactC>&, const Subspace<ExactC>&);
template bool subspace_equal(const Subspace<FloatC>&, const Subspace<FloatC>&);
template RankKernelImage<ExactC> rank_kernel_image(const Mat<ExactC>&, TolPolicy);
template RankKernelImage<FloatC> rank_kernel_image(const Mat<FloatC>&, TolPolicy);

// --- adjoints and spectra -----------------------------------------------------

template <class S>
Mat<S> gram_adjoint(const Mat<S>& A, const GramForm<S>& G_dom, const GramForm<S>& G_cod) {
    if (A.cols() != G_dom.dim() || A.rows() != G_cod.dim())
        throw dim_error("gram_adjoint: operator/Gram shape mismatch");
    if constexpr (!scalar_traits<S>::exact) check_finite(A);
    return G_dom.inv_apply(A.hconj() * G_cod.matrix());
}

template MatQ gram_adjoint(const MatQ&, const GramQ&, const GramQ&);
template MatF gram_adjoint(const MatF&, const GramC&, const GramC&);

namespace {

EigResult hermitian_eigs_impl(const MatF& A, const GramC& G, bool vectors) {
    if (A.rows() != A.cols()) throw dim_error("hermitian_eigs needs a square matrix");
    if (G.dim() != A.rows()) throw dim_error("hermitian_eigs: Gram dimension mismatch");
    check_finite(A);
    EigResult out;
    if (A.rows() == 0) return out;
    MatF GA = G.apply(A);
    require_g_selfadjoint(GA, "hermitian_eigs");
    if (G.is_identity()) {
        Eigen::MatrixXcd E = to_eigen(sym_part(A));
        out.values = lapackb::heig(E, vectors);
        if (vectors) out.vectors = from_eigen(E);
    } else {
        Eigen::MatrixXcd E = to_eigen(sym_part(GA));
        Eigen::MatrixXcd B = to_eigen(G.matrix());
        out.values = lapackb::gheig(E, B, vectors);
        if (vectors) out.vectors = from_eigen(E);
    }
    return out;
}

} // namespace

EigResult hermitian_eigs(const MatF& A, const GramC& G) {
    return hermitian_eigs_impl(A, G, true);
}

std::vector<double> hermitian_eigvals(const MatF& A, const GramC& G) {
    return hermitian_eigs_impl(A, G, false).values;
}

bool psd_domination_check(const MatF& A, const MatF& B, const GramC& G, double tol_factor) {
    std::vector<double> ea, eb;
    try {
        ea = hermitian_eigvals(A, G);
        eb = hermitian_eigvals(B, G);
    } catch (const symmetry_error& e) {
        throw precondition_error(std::string("psd_domination_check: ") + e.what());
    }
    double sa = ea.empty() ? 0.0 : std::max(std::abs(ea.front()), std::abs(ea.back()));
    double sb = eb.empty() ? 0.0 : std::max(std::abs(eb.front()), std::abs(eb.back()));
    double psd_tol = tol_factor * (1.0 + std::max(sa, sb));
    if (!ea.empty() && ea.front() < -psd_tol)
        throw precondition_error("psd_domination_check: first operator is not PSD");
    if (!eb.empty() && eb.front() < -psd_tol)
        throw precondition_error("psd_domination_check: second operator is not PSD");
    std::vector<double> ed = hermitian_eigvals(A - B, G);
    return ed.empty() || ed.front() >= -psd_tol;
}

} // namespace hodgelab
