#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hodgelab/foliated_hodge.hpp"
#include "hodgelab/rng.hpp"
#include "hodgelab/structure.hpp"

using namespace hodgelab;

namespace {

DoubleComplex model(const char* name) { return DoubleComplex{builtin_model(name)}; }

template <typename S>
ProductMetric<S> identity_blocks(int r, int f) {
    return {Mat<S>::identity(r), Mat<S>::identity(f)};
}

double resid(const MatF& A, const MatF& B) { return max_abs(A - B); }

// del-cohomology dimensions of the three-dimensional Heisenberg column
const std::vector<int> kH3 = {1, 2, 2, 1};

} // namespace

TEST_CASE("abelian split model has vanishing Laplacians in both gradings") {
    DoubleComplex K = model("torus3");
    auto E = foliated_split(K, {0}, {1, 2});

    auto fq = build_foliated_package(E, identity_blocks<ExactC>(1, 2));
    for (int p = 0; p <= 1; ++p)
        for (int q = 0; q <= 2; ++q) {
            CHECK(fq.lapN[p][q].is_zero());
            CHECK(fq.lapF[p][q].is_zero());
            CHECK(fq.lap_page2[p][q].is_zero());
            CHECK((fq.projF[p][q] - MatQ::identity(fq.dim(p, q))).is_zero());
            CHECK(fq.harm_page2[p][q].cols() == fq.dim(p, q));
        }

    auto ff = build_foliated_package(E, identity_blocks<FloatC>(1, 2));
    auto ks = kernel_sum_hypothesis(ff);
    CHECK(ks.holds_all);
    CHECK(ks.eps == 0.0);
    for (const auto& row : ks.rows) {
        CHECK(row.holds);
        CHECK(row.perp_dim == 0);
        CHECK(row.overlap_dim == 0);
    }

    auto np = nf_pages_and_degeneration<ExactC>(E);
    CHECK(np.report.degeneration_index == 1);
    CHECK(np.report.betti.at(0) == 1);
    CHECK(np.report.betti.at(1) == 3);
    CHECK(np.report.betti.at(2) == 3);
    CHECK(np.report.betti.at(3) == 1);
    for (int p = 0; p <= 1; ++p)
        for (int q = 0; q <= 2; ++q)
            CHECK(np.report.page_dims.at(2).at({p, q}) == E.dim(p, q));

    auto iso = nf_hodge_iso_check(ff);
    CHECK(iso.applicable);
    CHECK(iso.kernel_sum_holds);
    for (const auto& row : iso.rows) {
        CHECK(row.dim_harm == row.dim_page2);
        CHECK(row.dim_harm == E.dim(row.p, row.q));
        CHECK(row.kernel_match);
        CHECK(row.decomp_spans);
        CHECK(row.ortho_resid <= 1e-12);
    }

    auto chain = nf_implication_chain_check(ff);
    CHECK(chain.antecedent);
    CHECK(chain.commutes);
    CHECK(chain.inclusion);
    CHECK(chain.kernel_sum_holds);
    CHECK(chain.kernels_coincide);
}

TEST_CASE("product model split closes exactly over the rationals") {
    DoubleComplex K = model("heisenberg_sum");
    auto E = foliated_split(K, {0, 1, 2}, {3, 4, 5});
    auto fq = build_foliated_package(E, identity_blocks<ExactC>(3, 3));

    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) {
            // identity blocks make the monomial frames orthonormal
            CHECK((fq.gram(p, q).matrix() - MatQ::identity(fq.dim(p, q))).is_zero());
            // the two differentials anticommute on the nose
            if (p < 3 && q < 3)
                CHECK((fq.delN[p][q + 1] * fq.delF[p][q] +
                       fq.delF[p + 1][q] * fq.delN[p][q])
                          .is_zero());
            // cross commutators of the tensor factors vanish identically
            CHECK(fq.cross_raise[p][q].is_zero());
            CHECK(fq.cross_lower[p][q].is_zero());
            // orthonormal frames turn the adjoint into the conjugate transpose
            if (p >= 1) CHECK((fq.delN_adj[p][q] - fq.delN[p - 1][q].hconj()).is_zero());
            if (q >= 1) CHECK((fq.delF_adj[p][q] - fq.delF[p][q - 1].hconj()).is_zero());
        }

    CHECK(fq.harmN[1][1].cols() == 6);
    CHECK(fq.harmF[1][1].cols() == 6);

    // with vanishing cross commutators the ambient kernel splits over the grid
    for (int k = 0; k <= 6; ++k) {
        int ambient_kernel = K.dim(k, 0) - exact_rank(fq.ambient_lap[k]);
        int graded = 0;
        for (int p = 0; p <= 3; ++p) {
            int q = k - p;
            if (q < 0 || q > 3) continue;
            graded += fq.dim(p, q) - exact_rank(fq.lap_sum[p][q]);
        }
        CHECK(ambient_kernel == graded);
    }
}

TEST_CASE("kernel-sum condition separates the three builtin splits") {
    DoubleComplex Khs = model("heisenberg_sum");
    auto Ehs = foliated_split(Khs, {0, 1, 2}, {3, 4, 5});
    auto fhs = build_foliated_package(Ehs, identity_blocks<FloatC>(3, 3));
    auto ks = kernel_sum_hypothesis(fhs);
    CHECK_FALSE(ks.holds_all);
    const auto& bad = ks.at(1, 1);
    CHECK_FALSE(bad.holds);
    CHECK(bad.space_dim == 9);
    CHECK(bad.sum_dim == 8);
    CHECK(bad.overlap_dim > 0);

    DoubleComplex Kha = model("heisenberg_plus_abelian");
    auto Eha = foliated_split(Kha, {0, 1, 2}, {3});
    auto fha = build_foliated_package(Eha, identity_blocks<FloatC>(3, 1));
    auto ksa = kernel_sum_hypothesis(fha);
    CHECK(ksa.holds_all);
    CHECK(ksa.eps <= 1e-12);
    for (const auto& row : ksa.rows) {
        CHECK(row.holds);
        CHECK(row.overlap_dim == 0);
        if (row.perp_dim > 0) CHECK(row.sigma_min_sq == doctest::Approx(1.0).epsilon(1e-9));
    }

    CHECK_THROWS_AS(ks.at(5, 5), precondition_error);
}

TEST_CASE("extension model reaches page two with the expected dimensions") {
    DoubleComplex K = model("heisenberg_plus_abelian");
    auto E = foliated_split(K, {0, 1, 2}, {3});

    auto np = nf_pages_and_degeneration<ExactC>(E);
    CHECK(np.report.degeneration_index == 2);
    CHECK((int)np.pages.size() == 3);
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 1; ++q)
            CHECK(np.report.page_dims.at(2).at({p, q}) == kH3[p]);

    // the vertical direction is inert, so the page-two Laplacian collapses
    auto fq = build_foliated_package(E, identity_blocks<ExactC>(3, 1));
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 1; ++q) {
            CHECK(fq.lapF[p][q].is_zero());
            CHECK((fq.projF[p][q] - MatQ::identity(fq.dim(p, q))).is_zero());
            CHECK((fq.lap_page2[p][q] - fq.lapN[p][q]).is_zero());
        }

    auto ff = build_foliated_package(E, identity_blocks<FloatC>(3, 1));
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 1; ++q) CHECK(ff.harm_page2[p][q].cols() == kH3[p]);

    auto iso = nf_hodge_iso_check(ff);
    CHECK(iso.applicable);
    for (const auto& row : iso.rows) {
        CHECK(row.dim_harm == row.dim_page2);
        CHECK(row.dim_harm == kH3[row.p]);
        CHECK(row.kernel_match);
        CHECK(row.decomp_spans);
        CHECK(row.ortho_resid <= 1e-10);
    }

    auto chain = nf_implication_chain_check(ff);
    CHECK(chain.antecedent);
    CHECK(chain.commutes);
    CHECK(chain.inclusion);
    CHECK(chain.kernels_coincide);
}

TEST_CASE("product model pages factor and the totals match an independent count") {
    DoubleComplex K = model("heisenberg_sum");
    auto E = foliated_split(K, {0, 1, 2}, {3, 4, 5});

    auto np = nf_pages_and_degeneration<ExactC>(E);
    CHECK(np.report.degeneration_index == 2);
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q)
            CHECK(np.report.page_dims.at(2).at({p, q}) == kH3[p] * kH3[q]);

    // column cohomology from raw ranks, no engine involved
    for (int k = 0; k <= 6; ++k) {
        int rk = exact_rank(K.del_block(k, 0));
        int rk_prev = k >= 1 ? exact_rank(K.del_block(k - 1, 0)) : 0;
        int bk = K.dim(k, 0) - rk - rk_prev;
        CHECK(np.report.betti.at(k) == bk);
    }

    auto npf = nf_pages_and_degeneration<FloatC>(E);
    CHECK(npf.report.degeneration_index == 2);
    CHECK(npf.report.page_dims.at(2) == np.report.page_dims.at(2));
}

TEST_CASE("product model is out of scope for the sufficient test yet still degenerates") {
    DoubleComplex K = model("heisenberg_sum");
    auto E = foliated_split(K, {0, 1, 2}, {3, 4, 5});
    auto ff = build_foliated_package(E, identity_blocks<FloatC>(3, 3));

    auto iso = nf_hodge_iso_check(ff);
    CHECK_FALSE(iso.applicable);
    CHECK_FALSE(iso.kernel_sum_holds);
    CHECK(iso.anticommute_resid <= 1e-12);
    CHECK((int)iso.rows.size() == 16);
    CHECK(iso.at(1, 1).dim_page2 == 4);

    auto chain = nf_implication_chain_check(ff);
    CHECK(chain.antecedent);
    CHECK(chain.commutes);
    CHECK(chain.inclusion);
    CHECK_FALSE(chain.kernel_sum_holds);
    CHECK(chain.kernels_coincide);
}

TEST_CASE("random product metrics keep every verified implication intact") {
    Rng rng(8123);

    DoubleComplex Khs = model("heisenberg_sum");
    auto Ehs = foliated_split(Khs, {0, 1, 2}, {3, 4, 5});
    for (int t = 0; t < 3; ++t) {
        ProductMetricF m{rng.pd_matrix(3), rng.pd_matrix(3)};
        auto fp = build_foliated_package(Ehs, m);
        auto chain = nf_implication_chain_check(fp);
        CHECK(chain.antecedent);
        CHECK(chain.commutes);
        CHECK(chain.inclusion);
    }

    DoubleComplex Kha = model("heisenberg_plus_abelian");
    auto Eha = foliated_split(Kha, {0, 1, 2}, {3});
    for (int t = 0; t < 3; ++t) {
        ProductMetricF m{rng.pd_matrix(3), rng.pd_matrix(1)};
        auto fp = build_foliated_package(Eha, m);
        auto ks = kernel_sum_hypothesis(fp);
        CHECK(ks.holds_all);
        auto iso = nf_hodge_iso_check(fp);
        CHECK(iso.applicable);
        for (const auto& row : iso.rows) CHECK(row.dim_harm == row.dim_page2);
    }

    DoubleComplex Kt = model("torus3");
    auto Et = foliated_split(Kt, {0}, {1, 2});
    for (int t = 0; t < 2; ++t) {
        ProductMetricF m{rng.pd_matrix(1), rng.pd_matrix(2)};
        auto fp = build_foliated_package(Et, m);
        auto iso = nf_hodge_iso_check(fp);
        CHECK(iso.applicable);
        auto chain = nf_implication_chain_check(fp);
        CHECK(chain.kernels_coincide);
    }
}

TEST_CASE("package rejects malformed metrics and bad lookups") {
    DoubleComplex K = model("torus3");
    auto E = foliated_split(K, {0}, {1, 2});

    MatF H = MatF::identity(3);
    H(0, 1) = FloatC(0.5);
    H(1, 0) = FloatC(0.5);
    CHECK_THROWS_AS(product_metric_from_ambient(E, H), metric_error);
    CHECK_THROWS_AS(build_foliated_package(E, H), metric_error);

    MatQ Hq = MatQ::identity(3);
    Hq(0, 2) = ExactC(1);
    CHECK_THROWS_AS(product_metric_from_ambient(E, Hq), metric_error);

    ProductMetricF bad_shape{MatF::identity(2), MatF::identity(2)};
    CHECK_THROWS_AS(build_foliated_package(E, bad_shape), dim_error);

    ProductMetricF askew{MatF::identity(1), MatF::identity(2)};
    askew.gF(0, 1) = FloatC(0.0, 1.0);
    CHECK_THROWS_AS(build_foliated_package(E, askew), metric_error);

    auto fp = build_foliated_package(E, identity_blocks<FloatC>(1, 2));
    CHECK_THROWS_AS(fp.gram(2, 0), dim_error);
    CHECK_THROWS_AS(fp.gram(0, 3), dim_error);

    // a split Gram reassembles to the ambient one it came from
    MatF Hd = MatF::identity(3);
    Hd(1, 1) = FloatC(2.0);
    Hd(1, 2) = FloatC(0.25, 0.5);
    Hd(2, 1) = FloatC(0.25, -0.5);
    auto m = product_metric_from_ambient(E, Hd);
    CHECK(resid(assemble_product_metric(E, m), Hd) == 0.0);
}
