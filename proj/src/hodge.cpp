#include "hodgelab/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hodgelab/error.hpp"
#include "hodgelab/lapack_bridge.hpp"

namespace hodgelab {

namespace {

std::string at_bidegree(const char* what, int p, int q) {
    return std::string(what) + " at (" + std::to_string(p) + "," + std::to_string(q) + ")";
}

template <typename S>
std::vector<std::vector<Mat<S>>> block_grid(int n) {
    return std::vector<std::vector<Mat<S>>>(n + 1, std::vector<Mat<S>>(n + 1));
}

// Zero for the exact scalar, max entry magnitude for the float scalar.
template <typename S>
double size_of(const Mat<S>& M) {
    if constexpr (scalar_traits<S>::exact) {
        (void)M;
        return 0.0;
    } else {
        return max_abs(M);
    }
}

template <typename S>
bool negligible(const Mat<S>& M, double factor, double scale) {
    if constexpr (scalar_traits<S>::exact) {
        (void)factor;
        (void)scale;
        return M.is_zero();
    } else {
        return max_abs(M) <= factor * (1.0 + scale);
    }
}

// Largest G-normalized cross inner product between the columns of U and V;
// zero columns never occur here because the Grams are positive definite.
template <typename S>
double cross_gram_residual(const Mat<S>& U, const Mat<S>& V, const GramForm<S>& G) {
    if (U.cols() == 0 || V.cols() == 0) return 0.0;
    Mat<S> C = U.hconj() * G.apply(V);
    if constexpr (scalar_traits<S>::exact) {
        return C.is_zero() ? 0.0 : 1.0;
    } else {
        Mat<S> NU = U.hconj() * G.apply(U);
        Mat<S> NV = V.hconj() * G.apply(V);
        double worst = 0.0;
        for (int i = 0; i < C.rows(); ++i)
            for (int j = 0; j < C.cols(); ++j) {
                double den = std::sqrt(std::abs(NU(i, i)) * std::abs(NV(j, j)));
                if (den > 0.0) worst = std::max(worst, std::abs(C(i, j)) / den);
            }
        return worst;
    }
}

template <typename S>
Subspace<S> image_space(const Mat<S>& block) {
    return Subspace<S>::span(block);
}

template <typename S>
Mat<S> kernel_basis_of(const Mat<S>& M) {
    if constexpr (scalar_traits<S>::exact)
        return exact_kernel_basis(M);
    else
        return float_kernel_basis(M);
}

// A derived block all of whose entries sit at rounding level relative to the
// package's raw operators is the zero map; without this floor, rank cutoffs
// that scale with the largest singular value would read pure noise as full
// rank.
template <typename S>
bool noise_only(const Mat<S>& M, double scale) {
    if constexpr (scalar_traits<S>::exact) {
        (void)scale;
        return M.is_zero();
    } else {
        return max_abs(M) <= 1e-12 * (1.0 + scale);
    }
}

} // namespace

double harmonic_threshold(double sigma_max) { return 1e-9 * (1.0 + sigma_max); }

template <typename S>
Mat<S> harmonic_basis(const Mat<S>& op, const GramForm<S>& G) {
    if constexpr (scalar_traits<S>::exact) {
        (void)G;
        return exact_kernel_basis(op);
    } else {
        if (op.rows() == 0) return Mat<S>(0, 0);
        EigResult eig = hermitian_eigs(op, G);
        double sigma_max = 0.0;
        for (double v : eig.values) sigma_max = std::max(sigma_max, std::abs(v));
        double thr = harmonic_threshold(sigma_max);
        if (!eig.values.empty() && eig.values.front() < -thr)
            throw numeric_error("operator expected to be positive semidefinite has eigenvalue " +
                                std::to_string(eig.values.front()));
        std::vector<int> idx;
        for (int k = 0; k < (int)eig.values.size() && eig.values[k] <= thr; ++k) idx.push_back(k);
        return eig.vectors.cols_subset(idx);
    }
}

template <typename S>
Mat<S> span_projector(const Mat<S>& basis, const GramForm<S>& G) {
    const int n = G.dim();
    if (basis.rows() != n) throw dim_error("span_projector basis/Gram mismatch");
    if (basis.cols() == 0) return Mat<S>(n, n);
    Mat<S> GB = G.apply(basis);
    Mat<S> M = basis.hconj() * GB;
    if constexpr (scalar_traits<S>::exact) {
        return basis * (exact_inverse(M) * GB.hconj());
    } else {
        Eigen::MatrixXcd sol = lapackb::lu_solve(to_eigen(M), to_eigen(GB.hconj()));
        return basis * from_eigen(sol);
    }
}

namespace {

template <typename S>
double package_operator_scale(const HodgePackage<S>& pkg) {
    double s = 0.0;
    const int n = pkg.K->n();
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q)
            s = std::max({s, size_of(pkg.del[p][q]), size_of(pkg.dbar[p][q]),
                          size_of(pkg.del_adj[p][q]), size_of(pkg.dbar_adj[p][q]),
                          size_of(pkg.proj_dbar[p][q])});
    return s;
}

// The assembled blocks are self-adjoint and, where stated, identical by
// construction; a miss means the package assembly itself is broken.
template <typename S>
void verify_package(const HodgePackage<S>& pkg) {
    const DoubleComplex& K = *pkg.K;
    const int n = K.n();
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            const GramForm<S>& G = pkg.gram(p, q);
            const int d = K.dim(p, q);
            if (d == 0) continue;

            const std::vector<const Mat<S>*> selfadj = {
                &pkg.lap_del[p][q], &pkg.lap_dbar[p][q], &pkg.lap_sum[p][q],
                &pkg.lap_del_hproj[p][q], &pkg.lap_page2[p][q]};
            for (const Mat<S>* A : selfadj) {
                Mat<S> diff = gram_adjoint(*A, G, G) - *A;
                if (!negligible(diff, 1e-12, size_of(*A)))
                    throw theorem_violation(at_bidegree("assembled Laplacian is not self-adjoint", p, q));
            }

            const std::vector<const Mat<S>*> projectors = {
                &pkg.proj_del[p][q], &pkg.proj_dbar[p][q],
                &pkg.proj_del_perp[p][q], &pkg.proj_dbar_perp[p][q]};
            for (const Mat<S>* P : projectors) {
                double scale = size_of(*P);
                if (!negligible(*P * *P - *P, 1e-12, scale))
                    throw theorem_violation(at_bidegree("harmonic projector is not idempotent", p, q));
                if (!negligible(gram_adjoint(*P, G, G) - *P, 1e-12, scale))
                    throw theorem_violation(at_bidegree("harmonic projector is not self-adjoint", p, q));
            }

            Mat<S> split = pkg.lap_del_hproj[p][q] + pkg.lap_del_hproj_perp[p][q] - pkg.lap_del[p][q];
            if (!negligible(split, 1e-12, size_of(pkg.lap_del[p][q])))
                throw theorem_violation(
                    at_bidegree("projected pieces do not add up to the holomorphic Laplacian", p, q));

            Subspace<S> h2 = Subspace<S>::span(pkg.harm_page2[p][q]);
            Subspace<S> cut = subspace_intersect(
                Subspace<S>::span(harmonic_basis(pkg.lap_del_hproj[p][q], G)),
                Subspace<S>::span(pkg.harm_dbar[p][q]));
            if (!subspace_equal(h2, cut))
                throw theorem_violation(
                    at_bidegree("kernel of the combined Laplacian is not the intersection of kernels", p, q));

            // K^{p,q} = harmonic + image + coimage of the vertical operator,
            // and its cycle space is harmonic + image.
            Subspace<S> harm = Subspace<S>::span(pkg.harm_dbar[p][q]);
            Subspace<S> im = q >= 1 ? image_space(pkg.dbar[p][q - 1]) : Subspace<S>::zero(d);
            Subspace<S> coim = q < n ? image_space(pkg.dbar_adj[p][q + 1]) : Subspace<S>::zero(d);
            if (harm.dim() + im.dim() + coim.dim() != d)
                throw numeric_error(at_bidegree("vertical decomposition dimensions do not add up", p, q));
            double resid = std::max({cross_gram_residual(pkg.harm_dbar[p][q], im.basis, G),
                                     cross_gram_residual(pkg.harm_dbar[p][q], coim.basis, G),
                                     cross_gram_residual(im.basis, coim.basis, G)});
            if (resid > 1e-9)
                throw numeric_error(at_bidegree("vertical decomposition is not orthogonal", p, q));
            Subspace<S> cycles = Subspace<S>::span(kernel_basis_of(pkg.dbar[p][q]));
            if (cycles.dim() != harm.dim() + im.dim() ||
                !subspace_equal(cycles, subspace_sum(harm, im)))
                throw numeric_error(at_bidegree("vertical cycle space decomposition failed", p, q));
        }
}

} // namespace

template <typename S>
HodgePackage<S> build_hodge_package(const DoubleComplex& K, const HermitianMetric<S>& m) {
    if (&m.complex() != &K)
        throw precondition_error("metric belongs to a different complex");
    const int n = K.n();
    HodgePackage<S> pkg;
    pkg.K = &K;
    pkg.metric = std::make_shared<HermitianMetric<S>>(m);
    for (auto* g : {&pkg.del, &pkg.dbar, &pkg.del_adj, &pkg.dbar_adj, &pkg.lap_del,
                    &pkg.lap_dbar, &pkg.lap_sum, &pkg.harm_del, &pkg.harm_dbar,
                    &pkg.proj_del, &pkg.proj_dbar, &pkg.proj_del_perp, &pkg.proj_dbar_perp,
                    &pkg.lap_del_hproj, &pkg.lap_del_hproj_perp, &pkg.lap_page2,
                    &pkg.harm_page2})
        *g = block_grid<S>(n);

    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            if constexpr (scalar_traits<S>::exact) {
                pkg.del[p][q] = K.del_block(p, q);
                pkg.dbar[p][q] = K.dbar_block(p, q);
            } else {
                pkg.del[p][q] = to_float(K.del_block(p, q));
                pkg.dbar[p][q] = to_float(K.dbar_block(p, q));
            }
        }

    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            pkg.del_adj[p][q] = p >= 1
                ? gram_adjoint(pkg.del[p - 1][q], m.gram(p - 1, q), m.gram(p, q))
                : Mat<S>(0, K.dim(0, q));
            pkg.dbar_adj[p][q] = q >= 1
                ? gram_adjoint(pkg.dbar[p][q - 1], m.gram(p, q - 1), m.gram(p, q))
                : Mat<S>(0, K.dim(p, 0));
        }

    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            const int d = K.dim(p, q);
            Mat<S> ld(d, d), lb(d, d);
            if (p >= 1) ld += pkg.del[p - 1][q] * pkg.del_adj[p][q];
            if (p < n) ld += pkg.del_adj[p + 1][q] * pkg.del[p][q];
            if (q >= 1) lb += pkg.dbar[p][q - 1] * pkg.dbar_adj[p][q];
            if (q < n) lb += pkg.dbar_adj[p][q + 1] * pkg.dbar[p][q];
            pkg.lap_del[p][q] = std::move(ld);
            pkg.lap_dbar[p][q] = std::move(lb);
            pkg.lap_sum[p][q] = pkg.lap_del[p][q] + pkg.lap_dbar[p][q];

            pkg.harm_del[p][q] = harmonic_basis(pkg.lap_del[p][q], m.gram(p, q));
            pkg.harm_dbar[p][q] = harmonic_basis(pkg.lap_dbar[p][q], m.gram(p, q));
            pkg.proj_del[p][q] = span_projector(pkg.harm_del[p][q], m.gram(p, q));
            pkg.proj_dbar[p][q] = span_projector(pkg.harm_dbar[p][q], m.gram(p, q));
            pkg.proj_del_perp[p][q] = Mat<S>::identity(d) - pkg.proj_del[p][q];
            pkg.proj_dbar_perp[p][q] = Mat<S>::identity(d) - pkg.proj_dbar[p][q];
        }

    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            const int d = K.dim(p, q);
            Mat<S> lh(d, d), lhp(d, d);
            if (p >= 1) {
                lh += pkg.del[p - 1][q] * (pkg.proj_dbar[p - 1][q] * pkg.del_adj[p][q]);
                lhp += pkg.del[p - 1][q] * (pkg.proj_dbar_perp[p - 1][q] * pkg.del_adj[p][q]);
            }
            if (p < n) {
                lh += pkg.del_adj[p + 1][q] * (pkg.proj_dbar[p + 1][q] * pkg.del[p][q]);
                lhp += pkg.del_adj[p + 1][q] * (pkg.proj_dbar_perp[p + 1][q] * pkg.del[p][q]);
            }
            pkg.lap_del_hproj[p][q] = std::move(lh);
            pkg.lap_del_hproj_perp[p][q] = std::move(lhp);
            pkg.lap_page2[p][q] = pkg.lap_del_hproj[p][q] + pkg.lap_dbar[p][q];
            pkg.harm_page2[p][q] = harmonic_basis(pkg.lap_page2[p][q], m.gram(p, q));
        }

    verify_package(pkg);
    return pkg;
}

template <typename S>
Mat<S> hproj_laplacian_via_frames(const HodgePackage<S>& pkg, int p, int q, const Mat<S>& u) {
    if constexpr (scalar_traits<S>::exact) {
        (void)pkg;
        (void)p;
        (void)q;
        (void)u;
        throw precondition_error("frame evaluation needs orthonormal frames, float backend only");
    } else {
        const DoubleComplex& K = *pkg.K;
        const int n = K.n();
        if (p < 0 || p > n || q < 0 || q > n) throw dim_error("bidegree out of range");
        if (u.rows() != K.dim(p, q)) throw dim_error("form has the wrong ambient dimension");
        const GramForm<S>& G = pkg.gram(p, q);
        Mat<S> out(u.rows(), u.cols());
        if (p >= 1) {
            Mat<S> A = pkg.del[p - 1][q] * pkg.harm_dbar[p - 1][q];
            out += A * (A.hconj() * G.apply(u));
        }
        if (p < n) {
            Mat<S> B = pkg.del_adj[p + 1][q] * pkg.harm_dbar[p + 1][q];
            out += B * (B.hconj() * G.apply(u));
        }
        return out;
    }
}

template <typename S>
HodgeIsoReport hodge_iso_e2_check(const HodgePackage<S>& pkg) {
    const DoubleComplex& K = *pkg.K;
    const int n = K.n();
    const double scale = package_operator_scale(pkg);
    PageTable<S> e2 = page_table(make_bicomplex<S>(K), 2);
    HodgeIsoReport report;
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            const int d = K.dim(p, q);
            const GramForm<S>& G = pkg.gram(p, q);
            Subspace<S> h2 = Subspace<S>::span(pkg.harm_page2[p][q]);

            auto keep = [&](std::vector<Mat<S>>& rows, Mat<S> block) {
                if (!noise_only(block, scale)) rows.push_back(std::move(block));
            };

            // four-condition kernel
            std::vector<Mat<S>> rows;
            if (p < n) keep(rows, pkg.proj_dbar[p + 1][q] * pkg.del[p][q]);
            if (p >= 1) keep(rows, pkg.proj_dbar[p - 1][q] * pkg.del_adj[p][q]);
            if (q < n) keep(rows, pkg.dbar[p][q]);
            if (q >= 1) keep(rows, pkg.dbar_adj[p][q]);
            Subspace<S> four = rows.empty()
                ? Subspace<S>::full(d)
                : Subspace<S>::span(kernel_basis_of(Mat<S>::vstack(rows)));
            if (!subspace_equal(h2, four))
                throw theorem_violation(
                    at_bidegree("harmonic space differs from the four-condition kernel", p, q));

            // cycle space of the projected horizontal operator
            std::vector<Mat<S>> cyc;
            if (p < n) keep(cyc, pkg.proj_dbar[p + 1][q] * pkg.del[p][q]);
            if (q < n) keep(cyc, pkg.dbar[p][q]);
            Subspace<S> cycles = cyc.empty()
                ? Subspace<S>::full(d)
                : Subspace<S>::span(kernel_basis_of(Mat<S>::vstack(cyc)));

            // second-page boundaries: vertical image + horizontal image of
            // vertical cycles one step to the left
            Subspace<S> b2 = q >= 1 ? image_space(pkg.dbar[p][q - 1]) : Subspace<S>::zero(d);
            if (p >= 1) {
                Mat<S> bd = pkg.del[p - 1][q] * kernel_basis_of(pkg.dbar[p - 1][q]);
                if (!noise_only(bd, scale)) b2 = subspace_sum(b2, Subspace<S>::span(bd));
            }
            double resid = cross_gram_residual(h2.basis, b2.basis, G);
            if (cycles.dim() != h2.dim() + b2.dim() || !subspace_equal(cycles, subspace_sum(h2, b2)))
                throw theorem_violation(
                    at_bidegree("cycle space does not split into harmonic plus boundary parts", p, q));

            // the orthogonal complement: coimage of the projected horizontal
            // operator + vertical coimage
            Subspace<S> third = Subspace<S>::zero(d);
            if (p < n) {
                Mat<S> co = pkg.del_adj[p + 1][q] * pkg.proj_dbar[p + 1][q];
                if (!noise_only(co, scale)) third = image_space(co);
            }
            if (q < n) third = subspace_sum(third, image_space(pkg.dbar_adj[p][q + 1]));
            resid = std::max({resid, cross_gram_residual(h2.basis, third.basis, G),
                              cross_gram_residual(b2.basis, third.basis, G)});
            if (h2.dim() + b2.dim() + third.dim() != d ||
                subspace_sum(subspace_sum(h2, b2), third).dim() != d)
                throw theorem_violation(
                    at_bidegree("three-space decomposition does not fill the bidegree", p, q));
            if (resid > 1e-9)
                throw theorem_violation(
                    at_bidegree("three-space decomposition is not orthogonal", p, q));

            auto it = e2.dims.find({p, q});
            int target = it == e2.dims.end() ? 0 : it->second;
            if (h2.dim() != target)
                throw theorem_violation(
                    at_bidegree("harmonic dimension disagrees with the second page", p, q));

            report.rows.push_back({p, q, h2.dim(), target, resid});
        }
    return report;
}

namespace {

template <typename S>
bool form_negligible(const Mat<S>& v, double scale) {
    return negligible(v, 1e-9, scale);
}

template <typename S>
bool lies_in_image(const Mat<S>& block, const Mat<S>& v, double scale) {
    if constexpr (scalar_traits<S>::exact) {
        if (v.is_zero()) return true;
    } else {
        if (max_abs(v) <= 1e-9 * (1.0 + scale)) return true;
    }
    return subspace_contains(Subspace<S>::span(block), v);
}

} // namespace

template <typename S>
MetricFlags metric_classify(const HodgePackage<S>& pkg) {
    const DoubleComplex& K = *pkg.K;
    const HermitianMetric<S>& m = *pkg.metric;
    const int n = K.n();
    MetricFlags f;

    const Mat<S>& w = m.omega();
    const Mat<S>& wp = m.omega_power(n - 1);
    const double sw = size_of(w);
    const double swp = size_of(wp);

    Mat<S> dw = pkg.del[1][1] * w;
    Mat<S> dbw = pkg.dbar[1][1] * w;
    f.kahler = form_negligible(dw, sw) && form_negligible(dbw, sw);

    f.skt = dbw.rows() == 0 || form_negligible(pkg.del[1][2] * dbw, sw);

    Mat<S> dbwp = pkg.dbar[n - 1][n - 1] * wp;
    f.gauduchon = dbwp.rows() == 0 || form_negligible(pkg.del[n - 1][n] * dbwp, swp);

    f.super_skt = dw.rows() == 0 || lies_in_image(pkg.dbar[2][0], dw, sw);

    Mat<S> dwp = pkg.del[n - 1][n - 1] * wp;
    if (dwp.rows() == 0 || dwp.is_zero())
        f.sg = true;
    else
        f.sg = lies_in_image(pkg.dbar[n][n - 2], dwp, swp);

    // harmonicity of omega, cross-checked against the projections of its
    // derivative and coderivative onto the vertical-harmonic spaces
    f.harmonic_omega = form_negligible(pkg.lap_del_hproj[1][1] * w, sw);
    Mat<S> dsw = pkg.del_adj[1][1] * w;
    bool omega_subspaces =
        (dw.rows() == 0 || form_negligible(pkg.proj_dbar[2][1] * dw, sw)) &&
        (dsw.rows() == 0 || form_negligible(pkg.proj_dbar[0][1] * dsw, sw));
    if (f.harmonic_omega != omega_subspaces)
        throw theorem_violation("harmonicity of the metric form disagrees with its subspace test");

    f.harmonic_omega_power = form_negligible(pkg.lap_del_hproj[n - 1][n - 1] * wp, swp);
    Mat<S> dswp = pkg.del_adj[n - 1][n - 1] * wp;
    bool power_subspaces =
        (dwp.rows() == 0 || form_negligible(pkg.proj_dbar[n][n - 1] * dwp, swp)) &&
        (dswp.rows() == 0 || form_negligible(pkg.proj_dbar[n - 2][n - 1] * dswp, swp));
    if (f.harmonic_omega_power != power_subspaces)
        throw theorem_violation("harmonicity of the top power disagrees with its subspace test");

    if (f.super_skt && f.sg && !(f.harmonic_omega && f.harmonic_omega_power))
        throw theorem_violation("exactness of both derivatives failed to make the metric harmonic");

    if (f.skt && f.gauduchon) {
        bool both_exact = f.super_skt && f.sg;
        if (f.harmonic_omega != f.harmonic_omega_power || f.harmonic_omega != both_exact)
            throw theorem_violation("the pinched equivalences failed for a torsion-balanced metric");
    }

    return f;
}

template Mat<ExactC> harmonic_basis(const Mat<ExactC>&, const GramForm<ExactC>&);
template Mat<FloatC> harmonic_basis(const Mat<FloatC>&, const GramForm<FloatC>&);
template Mat<ExactC> span_projector(const Mat<ExactC>&, const GramForm<ExactC>&);
template Mat<FloatC> span_projector(const Mat<FloatC>&, const GramForm<FloatC>&);
template HodgePackage<ExactC> build_hodge_package(const DoubleComplex&, const HermitianMetric<ExactC>&);
template HodgePackage<FloatC> build_hodge_package(const DoubleComplex&, const HermitianMetric<FloatC>&);
template Mat<ExactC> hproj_laplacian_via_frames(const HodgePackage<ExactC>&, int, int, const Mat<ExactC>&);
template Mat<FloatC> hproj_laplacian_via_frames(const HodgePackage<FloatC>&, int, int, const Mat<FloatC>&);
template HodgeIsoReport hodge_iso_e2_check(const HodgePackage<ExactC>&);
template HodgeIsoReport hodge_iso_e2_check(const HodgePackage<FloatC>&);
template MetricFlags metric_classify(const HodgePackage<ExactC>&);
template MetricFlags metric_classify(const HodgePackage<FloatC>&);

} // namespace hodgelab
