#pragma once

#include <optional>
#include <vector>

#include "hodgelab/matrix.hpp"

namespace hodgelab {

// Rank tolerance: singular values below factor * sigma_max * max(rows, cols)
// are treated as zero.
struct TolPolicy {
    double factor = 1e-10;
    double threshold(double sigma_max, int rows, int cols) const {
        return factor * sigma_max * std::max(std::max(rows, cols), 1);
    }
};

// --- exact elimination kernels ------------------------------------------------

// Full row reduction in place; returns rank, records pivot columns.
int rref_inplace(MatQ& M, std::vector<int>* pivot_cols = nullptr);
int exact_rank(const MatQ& M);
MatQ exact_kernel_basis(const MatQ& M);
// Solves A X = B exactly; empty result when the system is inconsistent.
std::optional<MatQ> exact_try_solve(const MatQ& A, const MatQ& B);
MatQ exact_inverse(const MatQ& A);

// --- float kernels ------------------------------------------------------------

// Orthonormal basis of the column space (SVD-based).
MatF orthonormal_image(const MatF& M, TolPolicy tol = {});
MatF float_kernel_basis(const MatF& M, TolPolicy tol = {});
int float_rank(const MatF& M, TolPolicy tol = {});

// --- Gram forms ---------------------------------------------------------------

template <class S>
class GramForm {
public:
    explicit GramForm(Mat<S> G);
    static GramForm identity_form(int n);

    int dim() const { return G_.rows(); }
    bool is_identity() const { return identity_; }
    const Mat<S>& matrix() const { return G_; }

    Mat<S> apply(const Mat<S>& X) const;     // G X
    Mat<S> inv_apply(const Mat<S>& X) const; // G^{-1} X
    S inner(const Mat<S>& u, const Mat<S>& v) const; // <u,v> = v^H G u

private:
    GramForm() = default;
    Mat<S> G_;
    bool identity_ = false;
    Mat<S> factor_; // exact: cached inverse; float: lower Cholesky factor
};

using GramQ = GramForm<ExactC>;
using GramC = GramForm<FloatC>;

// --- subspaces ----------------------------------------------------------------

template <class S>
struct Subspace {
    int ambient = 0;
    Mat<S> basis; // ambient x dim; column-reduced (exact) or orthonormal (float)
    TolPolicy tol;

    int dim() const { return basis.cols(); }

    static Subspace span(const Mat<S>& vectors, TolPolicy tol = {});
    static Subspace zero(int ambient, TolPolicy tol = {});
    static Subspace full(int ambient, TolPolicy tol = {});
};

using SubQ = Subspace<ExactC>;
using SubF = Subspace<FloatC>;

template <class S> Subspace<S> subspace_sum(const Subspace<S>& U, const Subspace<S>& V);
template <class S> Subspace<S> subspace_intersect(const Subspace<S>& U, const Subspace<S>& V);
template <class S> Subspace<S> orth_complement(const Subspace<S>& U, const GramForm<S>& G);
template <class S> bool subspace_contains(const Subspace<S>& U, const Mat<S>& v);
template <class S> bool subspace_contains_all(const Subspace<S>& U, const Subspace<S>& V);
template <class S> bool subspace_equal(const Subspace<S>& U, const Subspace<S>& V);

template <class S>
struct RankKernelImage {
    int rank = 0;
    Subspace<S> kernel, image;
};

template <class S>
RankKernelImage<S> rank_kernel_image(const Mat<S>& M, TolPolicy tol = {});

// --- adjoints and spectra -----------------------------------------------------

// A maps (dom, G_dom) to (cod, G_cod); returns the unique A* with
// <A u, v>_cod = <u, A* v>_dom.
template <class S>
Mat<S> gram_adjoint(const Mat<S>& A, const GramForm<S>& G_dom, const GramForm<S>& G_cod);

struct EigResult {
    std::vector<double> values; // ascending
    MatF vectors;               // G-orthonormal columns, empty if not requested
};

EigResult hermitian_eigs(const MatF& A, const GramC& G);
std::vector<double> hermitian_eigvals(const MatF& A, const GramC& G);

// True when B <= A in the G-quadratic-form order, to tolerance.
bool psd_domination_check(const MatF& A, const MatF& B, const GramC& G,
                          double tol_factor = 1e-10);

} // namespace hodgelab
