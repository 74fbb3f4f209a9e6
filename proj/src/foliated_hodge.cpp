#include "hodgelab/foliated_hodge.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hodgelab/lapack_bridge.hpp"
#include "hodgelab/rng.hpp"

namespace hodgelab {

namespace {

constexpr double kProjTol = 1e-12;   // projector algebra
constexpr double kExpandTol = 1e-11; // ambient Laplacian expansion
constexpr double kResidTol = 1e-9;   // vanishing statements
constexpr double kHoldTol = 1e-8;    // derived identities
constexpr double kPsdSlack = 1e-10;

template <typename S>
Mat<S> from_exact(const MatQ& M) {
    if constexpr (scalar_traits<S>::exact)
        return M;
    else
        return to_float(M);
}

template <typename S>
double block_scale(const Mat<S>& M) {
    if constexpr (scalar_traits<S>::exact)
        return M.is_zero() ? 0.0 : 1.0;
    else
        return max_abs(M);
}

// 0/1 for the exact backend, scaled sup-norm difference for floats.
template <typename S>
double mat_resid(const Mat<S>& A, const Mat<S>& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw dim_error("residual shape mismatch");
    if constexpr (scalar_traits<S>::exact) {
        return (A - B).is_zero() ? 0.0 : 1.0;
    } else {
        double s = std::max(max_abs(A), max_abs(B));
        return max_abs(A - B) / (1.0 + s);
    }
}

template <typename S>
bool vanishes(const Mat<S>& M, double scale) {
    if constexpr (scalar_traits<S>::exact)
        return M.is_zero();
    else
        return max_abs(M) <= kResidTol * (1.0 + scale);
}

template <typename S>
int kernel_dim(const Mat<S>& M) {
    if constexpr (scalar_traits<S>::exact)
        return M.cols() - exact_rank(M);
    else
        return M.cols() - float_rank(M);
}

template <typename S>
Mat<S> embed_matrix(const FoliatedComplex& E, int p, int q) {
    const int d = E.dim(p, q);
    const int D = E.complex().dim(p + q, 0);
    Mat<S> M(D, d);
    for (int j = 0; j < d; ++j) {
        Mat<S> e(d, 1);
        e(j, 0) = scalar_traits<S>::one();
        Mat<S> c = E.embed(p, q, e);
        for (int i = 0; i < D; ++i) M(i, j) = c(i, 0);
    }
    return M;
}

template <typename S>
std::vector<std::vector<Mat<S>>> make_grid(int r, int f) {
    return std::vector<std::vector<Mat<S>>>((size_t)r + 1,
                                            std::vector<Mat<S>>((size_t)f + 1));
}

template <typename S>
void require_sa_psd(const Mat<S>& A, const GramForm<S>& G, const char* what) {
    if (A.rows() == 0) return;
    double tol = scalar_traits<S>::exact ? 0.0 : kPsdSlack;
    if (mat_resid(A, gram_adjoint(A, G, G)) > tol)
        throw theorem_violation(std::string(what) + ": block is not self-adjoint");
    if constexpr (!scalar_traits<S>::exact) {
        auto ev = hermitian_eigvals(A, G);
        if (!ev.empty()) {
            double top = std::max(std::abs(ev.front()), std::abs(ev.back()));
            if (ev.front() < -kPsdSlack * (1.0 + top))
                throw theorem_violation(std::string(what) + ": block is not positive semidefinite");
        }
    }
}

// Eigenvectors of a PSD block strictly above the harmonic cutoff; columns
// are G-orthonormal.
MatF positive_frame(const MatF& A, const GramC& G) {
    if (A.rows() == 0) return MatF(0, 0);
    EigResult e = hermitian_eigs(A, G);
    double top = 0.0;
    for (double v : e.values) top = std::max(top, std::abs(v));
    double thr = harmonic_threshold(top);
    std::vector<int> keep;
    for (size_t i = 0; i < e.values.size(); ++i)
        if (e.values[i] > thr) keep.push_back((int)i);
    return e.vectors.cols_subset(keep);
}

} // namespace

template <typename S>
const GramForm<S>& FoliatedHodgePackage<S>::gram(int p, int q) const {
    if (p < 0 || p > r() || q < 0 || q > f())
        throw dim_error("foliated gram out of range");
    return grams[p][q];
}

template <typename S>
ProductMetric<S> product_metric_from_ambient(const FoliatedComplex& E, const Mat<S>& H) {
    const int n = E.complex().n();
    if (H.rows() != n || H.cols() != n)
        throw dim_error("ambient Gram does not match the coframe");
    const auto& N = E.N_indices();
    const auto& F = E.F_indices();
    for (int i : N)
        for (int j : F)
            if (!scalar_is_zero(H(i, j)) || !scalar_is_zero(H(j, i)))
                throw metric_error("coframe Gram couples the two index groups");
    ProductMetric<S> m;
    m.gN = Mat<S>((int)N.size(), (int)N.size());
    m.gF = Mat<S>((int)F.size(), (int)F.size());
    for (size_t a = 0; a < N.size(); ++a)
        for (size_t b = 0; b < N.size(); ++b) m.gN((int)a, (int)b) = H(N[a], N[b]);
    for (size_t a = 0; a < F.size(); ++a)
        for (size_t b = 0; b < F.size(); ++b) m.gF((int)a, (int)b) = H(F[a], F[b]);
    return m;
}

template <typename S>
Mat<S> assemble_product_metric(const FoliatedComplex& E, const ProductMetric<S>& m) {
    const int r = E.r(), f = E.f();
    if (m.gN.rows() != r || m.gN.cols() != r || m.gF.rows() != f || m.gF.cols() != f)
        throw dim_error("product metric blocks do not match the splitting");
    if (mat_resid(m.gN, m.gN.hconj()) > kProjTol || mat_resid(m.gF, m.gF.hconj()) > kProjTol)
        throw metric_error("product metric block is not Hermitian");
    Mat<S> H(r + f, r + f);
    const auto& N = E.N_indices();
    const auto& F = E.F_indices();
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) H(N[a], N[b]) = m.gN(a, b);
    for (int a = 0; a < f; ++a)
        for (int b = 0; b < f; ++b) H(F[a], F[b]) = m.gF(a, b);
    return H;
}

template <typename S>
FoliatedHodgePackage<S> build_foliated_package(const FoliatedComplex& E,
                                               const ProductMetric<S>& m) {
    const int r = E.r(), f = E.f(), n = r + f;
    FoliatedHodgePackage<S> fp;
    fp.E = &E;
    fp.gN = m.gN;
    fp.gF = m.gF;
    Mat<S> H = assemble_product_metric(E, m);
    fp.ambient = std::make_shared<const HermitianMetric<S>>(build_metric(E.complex(), H));

    std::vector<std::vector<Mat<S>>> emb = make_grid<S>(r, f);
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) emb[p][q] = embed_matrix<S>(E, p, q);

    // summands of one total degree must be pairwise orthogonal
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q)
            for (int p2 = p + 1; p2 <= r; ++p2) {
                int q2 = p + q - p2;
                if (q2 < 0 || q2 > f) continue;
                Mat<S> X = emb[p][q].hconj() *
                           fp.ambient->gram(p + q, 0).apply(emb[p2][q2]);
                if (!vanishes(X, block_scale(fp.ambient->gram(p + q, 0).matrix())))
                    throw theorem_violation("regraded summands are not orthogonal");
            }

    fp.grams.reserve((size_t)r + 1);
    for (int p = 0; p <= r; ++p) {
        std::vector<GramForm<S>> row;
        row.reserve((size_t)f + 1);
        for (int q = 0; q <= f; ++q) {
            Mat<S> G = emb[p][q].hconj() * fp.ambient->gram(p + q, 0).apply(emb[p][q]);
            if constexpr (!scalar_traits<S>::exact) G = (G + G.hconj()) * FloatC(0.5);
            row.push_back(GramForm<S>(std::move(G)));
        }
        fp.grams.push_back(std::move(row));
    }

    fp.delN = make_grid<S>(r, f);
    fp.delF = make_grid<S>(r, f);
    fp.delN_adj = make_grid<S>(r, f);
    fp.delF_adj = make_grid<S>(r, f);
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            fp.delN[p][q] = from_exact<S>(E.delN_block(p, q));
            fp.delF[p][q] = from_exact<S>(E.delF_block(p, q));
        }
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            fp.delN_adj[p][q] =
                p >= 1 ? gram_adjoint(fp.delN[p - 1][q], fp.grams[p - 1][q], fp.grams[p][q])
                       : Mat<S>(0, E.dim(p, q));
            fp.delF_adj[p][q] =
                q >= 1 ? gram_adjoint(fp.delF[p][q - 1], fp.grams[p][q - 1], fp.grams[p][q])
                       : Mat<S>(0, E.dim(p, q));
        }

    fp.lapN = make_grid<S>(r, f);
    fp.lapF = make_grid<S>(r, f);
    fp.lap_sum = make_grid<S>(r, f);
    fp.cross_raise = make_grid<S>(r, f);
    fp.cross_lower = make_grid<S>(r, f);
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            const int d = E.dim(p, q);
            Mat<S> ln(d, d), lf(d, d);
            if (p < r) ln += fp.delN_adj[p + 1][q] * fp.delN[p][q];
            if (p >= 1) ln += fp.delN[p - 1][q] * fp.delN_adj[p][q];
            if (q < f) lf += fp.delF_adj[p][q + 1] * fp.delF[p][q];
            if (q >= 1) lf += fp.delF[p][q - 1] * fp.delF_adj[p][q];
            fp.lapN[p][q] = std::move(ln);
            fp.lapF[p][q] = std::move(lf);
            fp.lap_sum[p][q] = fp.lapN[p][q] + fp.lapF[p][q];

            Mat<S> cr(E.dim(p + 1, q - 1), d);
            if (cr.rows() > 0)
                cr = fp.delN[p][q - 1] * fp.delF_adj[p][q] +
                     fp.delF_adj[p + 1][q] * fp.delN[p][q];
            fp.cross_raise[p][q] = std::move(cr);
            Mat<S> cl(E.dim(p - 1, q + 1), d);
            if (cl.rows() > 0)
                cl = fp.delF[p - 1][q] * fp.delN_adj[p][q] +
                     fp.delN_adj[p][q + 1] * fp.delF[p][q];
            fp.cross_lower[p][q] = std::move(cl);
        }

    fp.harmN = make_grid<S>(r, f);
    fp.harmF = make_grid<S>(r, f);
    fp.projF = make_grid<S>(r, f);
    fp.projF_perp = make_grid<S>(r, f);
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            fp.harmN[p][q] = harmonic_basis(fp.lapN[p][q], fp.grams[p][q]);
            fp.harmF[p][q] = harmonic_basis(fp.lapF[p][q], fp.grams[p][q]);
            fp.projF[p][q] = span_projector(fp.harmF[p][q], fp.grams[p][q]);
            fp.projF_perp[p][q] = Mat<S>::identity(E.dim(p, q)) - fp.projF[p][q];
        }

    fp.lapN_hproj = make_grid<S>(r, f);
    fp.lap_page2 = make_grid<S>(r, f);
    fp.harm_page2 = make_grid<S>(r, f);
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            const int d = E.dim(p, q);
            Mat<S> h(d, d);
            if (p >= 1) h += fp.delN[p - 1][q] * fp.projF[p - 1][q] * fp.delN_adj[p][q];
            if (p < r) h += fp.delN_adj[p + 1][q] * fp.projF[p + 1][q] * fp.delN[p][q];
            fp.lapN_hproj[p][q] = std::move(h);
            fp.lap_page2[p][q] = fp.lapN_hproj[p][q] + fp.lapF[p][q];
            fp.harm_page2[p][q] = harmonic_basis(fp.lap_page2[p][q], fp.grams[p][q]);
        }

    fp.ambient_del.resize((size_t)n + 1);
    fp.ambient_del_adj.resize((size_t)n + 1);
    fp.ambient_lap.resize((size_t)n + 1);
    for (int k = 0; k <= n; ++k)
        fp.ambient_del[k] = from_exact<S>(E.complex().del_block(k, 0));
    for (int k = 0; k <= n; ++k)
        fp.ambient_del_adj[k] =
            k >= 1 ? gram_adjoint(fp.ambient_del[k - 1], fp.ambient->gram(k - 1, 0),
                                  fp.ambient->gram(k, 0))
                   : Mat<S>(0, E.complex().dim(0, 0));
    for (int k = 0; k <= n; ++k) {
        const int D = E.complex().dim(k, 0);
        Mat<S> L(D, D);
        if (k < n) L += fp.ambient_del_adj[k + 1] * fp.ambient_del[k];
        if (k >= 1) L += fp.ambient_del[k - 1] * fp.ambient_del_adj[k];
        fp.ambient_lap[k] = std::move(L);
    }

    // validation: projector algebra, operator symmetry, kernel identities,
    // and the graded expansion of the ambient Laplacian
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            const GramForm<S>& G = fp.grams[p][q];
            const Mat<S>& P = fp.projF[p][q];
            if (mat_resid(P * P, P) > kProjTol)
                throw theorem_violation("projF is not idempotent");
            if (mat_resid(gram_adjoint(P, G, G), P) > kProjTol)
                throw theorem_violation("projF is not self-adjoint");

            require_sa_psd(fp.lapN[p][q], G, "lapN");
            require_sa_psd(fp.lapF[p][q], G, "lapF");
            require_sa_psd(fp.lap_sum[p][q], G, "lap_sum");
            require_sa_psd(fp.lapN_hproj[p][q], G, "lapN_hproj");
            require_sa_psd(fp.lap_page2[p][q], G, "lap_page2");

            double dsc = std::max(block_scale(fp.delN[p][q]), block_scale(fp.delN_adj[p][q]));
            if (!vanishes(fp.delN[p][q] * fp.harmN[p][q], dsc) ||
                !vanishes(fp.delN_adj[p][q] * fp.harmN[p][q], dsc))
                throw theorem_violation("harmN escapes the joint kernel of delN and its adjoint");
            if (kernel_dim(Mat<S>::vstack({fp.delN[p][q], fp.delN_adj[p][q]})) !=
                fp.harmN[p][q].cols())
                throw theorem_violation("ker lapN differs from ker delN intersect ker delN_adj");

            double hsc = std::max(block_scale(fp.lapN_hproj[p][q]), block_scale(fp.lapF[p][q]));
            if (!vanishes(fp.lapN_hproj[p][q] * fp.harm_page2[p][q], hsc) ||
                !vanishes(fp.lapF[p][q] * fp.harm_page2[p][q], hsc))
                throw theorem_violation("harm_page2 escapes the joint kernel of its two parts");
            if (kernel_dim(Mat<S>::vstack({fp.lapN_hproj[p][q], fp.lapF[p][q]})) !=
                fp.harm_page2[p][q].cols())
                throw theorem_violation("ker lap_page2 differs from the joint kernel of its parts");
        }

    for (int k = 0; k <= n; ++k)
        require_sa_psd(fp.ambient_lap[k], fp.ambient->gram(k, 0), "ambient_lap");

    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            Mat<S> lhs = fp.ambient_lap[p + q] * emb[p][q];
            Mat<S> rhs = emb[p][q] * fp.lap_sum[p][q];
            if (p < r && q >= 1) rhs += emb[p + 1][q - 1] * fp.cross_raise[p][q];
            if (p >= 1 && q < f) rhs += emb[p - 1][q + 1] * fp.cross_lower[p][q];
            double resid = mat_resid(lhs, rhs);
            if (resid > (scalar_traits<S>::exact ? 0.0 : kExpandTol))
                throw theorem_violation("ambient Laplacian does not match its graded expansion");
        }

    return fp;
}

template <typename S>
FoliatedHodgePackage<S> build_foliated_package(const FoliatedComplex& E, const Mat<S>& H) {
    return build_foliated_package(E, product_metric_from_ambient(E, H));
}

const KernelSumRow& KernelSumReport::at(int p, int q) const {
    for (const auto& row : rows)
        if (row.p == p && row.q == q) return row;
    throw precondition_error("no kernel-sum row at this bidegree");
}

KernelSumReport kernel_sum_hypothesis(const FoliatedHodgePackage<FloatC>& fp) {
    KernelSumReport rep;
    const int r = fp.r(), f = fp.f();
    double min_sq = 1.0;
    bool all = true;
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            KernelSumRow row;
            row.p = p;
            row.q = q;
            row.space_dim = fp.dim(p, q);
            const GramC& G = fp.gram(p, q);

            SubF kerN = SubF::span(fp.harmN[p][q]);
            SubF kerF = SubF::span(fp.harmF[p][q]);
            row.sum_dim = subspace_sum(kerN, kerF).dim();
            row.holds = row.sum_dim == row.space_dim;
            all = all && row.holds;

            MatF V = positive_frame(fp.lapN[p][q], G);
            row.perp_dim = V.cols();
            if (V.cols() > 0) {
                const MatF& W = fp.harmF[p][q];
                double smin = 0.0;
                if (W.cols() >= V.cols()) {
                    MatF M = W.hconj() * G.apply(V);
                    auto sv = lapackb::svd(to_eigen(M), false).sigma;
                    smin = (int)sv.size() < V.cols() ? 0.0 : sv(sv.size() - 1);
                }
                row.sigma_min_sq = smin * smin;
                min_sq = std::min(min_sq, row.sigma_min_sq);
            }

            MatF Vf = positive_frame(fp.lapF[p][q], G);
            row.overlap_dim = subspace_intersect(SubF::span(V), SubF::span(Vf)).dim();
            rep.rows.push_back(row);
        }
    rep.holds_all = all;
    rep.eps = std::clamp(1.0 - min_sq, 0.0, 1.0);

    if (rep.holds_all) {
        for (const auto& row : rep.rows)
            if (row.overlap_dim != 0)
                throw theorem_violation("kernel-sum holds but the complements overlap");
        Rng rng(20260822);
        for (int p = 0; p <= r; ++p)
            for (int q = 0; q <= f; ++q) {
                const GramC& G = fp.gram(p, q);
                for (int t = 0; t < 4; ++t) {
                    MatF u = rng.vector(fp.dim(p, q));
                    double lhs = G.inner(fp.lapN_hproj[p][q] * u, u).real();
                    double rhs = G.inner(fp.lapN[p][q] * u, u).real();
                    if (lhs < (1.0 - rep.eps) * rhs -
                                  kResidTol * (1.0 + std::abs(lhs) + std::abs(rhs)))
                        throw theorem_violation("projected Laplacian violates the contraction bound");
                }
            }
    }
    return rep;
}

template <typename S>
NFPages<S> nf_pages_and_degeneration(const FoliatedComplex& E) {
    auto B = make_bicomplex<S>(E);
    NFPages<S> out;
    out.report = degeneration_index(B);
    for (int rr = 1; rr <= out.report.degeneration_index + 1; ++rr)
        out.pages.push_back(page_table(B, rr));
    return out;
}

const NFHodgeIsoRow& NFHodgeIsoReport::at(int p, int q) const {
    for (const auto& row : rows)
        if (row.p == p && row.q == q) return row;
    throw precondition_error("no Hodge-iso row at this bidegree");
}

namespace {

struct OpScales {
    double dels = 0.0;
    double adjs = 0.0;
    double cross = 0.0;
};

OpScales scan_scales(const FoliatedHodgePackage<FloatC>& fp) {
    OpScales s;
    for (int p = 0; p <= fp.r(); ++p)
        for (int q = 0; q <= fp.f(); ++q) {
            s.dels = std::max({s.dels, max_abs(fp.delN[p][q]), max_abs(fp.delF[p][q])});
            s.adjs = std::max({s.adjs, max_abs(fp.delN_adj[p][q]), max_abs(fp.delF_adj[p][q])});
            s.cross = std::max({s.cross, max_abs(fp.cross_raise[p][q]),
                                max_abs(fp.cross_lower[p][q])});
        }
    return s;
}

} // namespace

NFHodgeIsoReport nf_hodge_iso_check(const FoliatedHodgePackage<FloatC>& fp) {
    NFHodgeIsoReport rep;
    auto ks = kernel_sum_hypothesis(fp);
    rep.kernel_sum_holds = ks.holds_all;
    OpScales s = scan_scales(fp);
    rep.anticommute_resid = s.cross / (1.0 + s.dels * s.adjs);
    rep.applicable = ks.holds_all && rep.anticommute_resid <= kResidTol;

    auto engine = nf_pages_and_degeneration<ExactC>(*fp.E);
    const auto& page2 = engine.report.page_dims.at(2);

    const int r = fp.r(), f = fp.f();
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            NFHodgeIsoRow row;
            row.p = p;
            row.q = q;
            const int d = fp.dim(p, q);
            const GramC& G = fp.gram(p, q);
            row.dim_harm = fp.harm_page2[p][q].cols();
            auto it = page2.find({p, q});
            row.dim_page2 = it == page2.end() ? 0 : it->second;

            MatF top = p < r ? fp.projF[p + 1][q] * fp.delN[p][q] : MatF(0, d);
            SubF cycles = SubF::span(float_kernel_basis(MatF::vstack({top, fp.delF[p][q]})));
            MatF imF = q >= 1 ? fp.delF[p][q - 1] : MatF(d, 0);
            MatF dN_kerF = p >= 1
                               ? fp.delN[p - 1][q] * float_kernel_basis(fp.delF[p - 1][q])
                               : MatF(d, 0);
            SubF split = SubF::span(MatF::hstack({fp.harm_page2[p][q], imF, dN_kerF}));
            row.kernel_match = subspace_equal(cycles, split);

            MatF U1 = orthonormal_image(fp.harm_page2[p][q]);
            MatF dN_harmF = p >= 1 ? fp.delN[p - 1][q] * fp.harmF[p - 1][q] : MatF(d, 0);
            MatF U2 = orthonormal_image(MatF::hstack({imF, dN_harmF}));
            MatF adj_pF = p < r ? fp.delN_adj[p + 1][q] * fp.harmF[p + 1][q] : MatF(d, 0);
            MatF imF_adj = q < f ? fp.delF_adj[p][q + 1] : MatF(d, 0);
            MatF U3 = orthonormal_image(MatF::hstack({adj_pF, imF_adj}));
            row.decomp_spans = U1.cols() + U2.cols() + U3.cols() == d &&
                               float_rank(MatF::hstack({U1, U2, U3})) == d;

            double gn = 1.0 + max_abs(G.matrix());
            double o = 0.0;
            o = std::max(o, max_abs(U1.hconj() * G.apply(U2)) / gn);
            o = std::max(o, max_abs(U1.hconj() * G.apply(U3)) / gn);
            o = std::max(o, max_abs(U2.hconj() * G.apply(U3)) / gn);
            MatF b1 = orthonormal_image(imF);
            MatF b2 = orthonormal_image(dN_harmF);
            o = std::max(o, max_abs(b1.hconj() * G.apply(b2)) / gn);
            MatF c1 = orthonormal_image(adj_pF);
            MatF c2 = orthonormal_image(imF_adj);
            o = std::max(o, max_abs(c1.hconj() * G.apply(c2)) / gn);
            row.ortho_resid = o;

            rep.rows.push_back(row);
            if (rep.applicable) {
                if (row.dim_harm != row.dim_page2)
                    throw theorem_violation("page-two harmonic dimension mismatch");
                if (!row.kernel_match)
                    throw theorem_violation("cycle space fails to split as harmonic plus boundaries");
                if (!row.decomp_spans)
                    throw theorem_violation("three-space decomposition fails to span");
                if (row.ortho_resid > kHoldTol)
                    throw theorem_violation("orthogonality relations fail");
            }
        }
    return rep;
}

NFChainReport nf_implication_chain_check(const FoliatedHodgePackage<FloatC>& fp) {
    NFChainReport rep;
    OpScales s = scan_scales(fp);
    rep.anticommute_resid = s.cross / (1.0 + s.dels * s.adjs);

    const int r = fp.r(), f = fp.f();
    double lap_scale = 0.0, n_scale = 0.0;
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            lap_scale = std::max(lap_scale, max_abs(fp.lapF[p][q]));
            n_scale = std::max(n_scale, max_abs(fp.lapN[p][q]));
        }

    double lc = 0.0, pc = 0.0, inc = 0.0;
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            if (p < r) {
                lc = std::max(lc, max_abs(fp.delN[p][q] * fp.lapF[p][q] -
                                          fp.lapF[p + 1][q] * fp.delN[p][q]));
                pc = std::max(pc, max_abs(fp.delN[p][q] * fp.projF[p][q] -
                                          fp.projF[p + 1][q] * fp.delN[p][q]));
            }
            inc = std::max(inc, max_abs(fp.lapN[p][q] * fp.harm_page2[p][q]));
        }
    rep.lap_commute_resid = lc / ((1.0 + s.dels) * (1.0 + lap_scale));
    rep.proj_commute_resid = pc / (1.0 + s.dels);
    rep.inclusion_resid = inc / (1.0 + n_scale);

    rep.antecedent = rep.anticommute_resid <= kResidTol;
    rep.commutes = rep.lap_commute_resid <= kHoldTol && rep.proj_commute_resid <= kHoldTol;
    rep.inclusion = rep.inclusion_resid <= kHoldTol;
    if (rep.antecedent && !rep.commutes)
        throw theorem_violation("vanishing cross commutator fails to propagate to lapF and projF");
    if (rep.commutes && !rep.inclusion)
        throw theorem_violation("commuting projector fails to force the kernel inclusion");

    auto ks = kernel_sum_hypothesis(fp);
    rep.kernel_sum_holds = ks.holds_all;
    bool coincide = true;
    for (int p = 0; p <= r; ++p)
        for (int q = 0; q <= f; ++q) {
            SubF a = SubF::span(fp.harm_page2[p][q]);
            SubF b = SubF::span(harmonic_basis(fp.lap_sum[p][q], fp.gram(p, q)));
            coincide = coincide && subspace_equal(a, b);
        }
    rep.kernels_coincide = coincide;
    if (rep.kernel_sum_holds && !rep.kernels_coincide)
        throw theorem_violation("kernel-sum holds but the page-two kernel differs from the joint kernel");
    return rep;
}

template struct FoliatedHodgePackage<ExactC>;
template struct FoliatedHodgePackage<FloatC>;

template ProductMetricQ product_metric_from_ambient(const FoliatedComplex&, const MatQ&);
template ProductMetricF product_metric_from_ambient(const FoliatedComplex&, const MatF&);
template MatQ assemble_product_metric(const FoliatedComplex&, const ProductMetricQ&);
template MatF assemble_product_metric(const FoliatedComplex&, const ProductMetricF&);
template FoliatedHodgeQ build_foliated_package(const FoliatedComplex&, const ProductMetricQ&);
template FoliatedHodgeF build_foliated_package(const FoliatedComplex&, const ProductMetricF&);
template FoliatedHodgeQ build_foliated_package(const FoliatedComplex&, const MatQ&);
template FoliatedHodgeF build_foliated_package(const FoliatedComplex&, const MatF&);
template NFPages<ExactC> nf_pages_and_degeneration<ExactC>(const FoliatedComplex&);
template NFPages<FloatC> nf_pages_and_degeneration<FloatC>(const FoliatedComplex&);

} // namespace hodgelab
