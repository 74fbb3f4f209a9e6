#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "hodgelab/error.hpp"
#include "hodgelab/pages.hpp"

using namespace hodgelab;

namespace {

int binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return (int)r;
}

BicomplexQ exact_builtin(const char* name) {
    return make_bicomplex<ExactC>(DoubleComplex(builtin_model(name)));
}

} // namespace

TEST_CASE("torus pages are the whole complex at every r") {
    auto B = exact_builtin("torus3");
    for (int r = 1; r <= 4; ++r) {
        for (int p = 0; p <= 3; ++p) {
            for (int q = 0; q <= 3; ++q) {
                auto Z = zigzag_space(B, p, q, r);
                auto Bd = boundary_space(B, p, q, r);
                CHECK(Z.dim() == binom(3, p) * binom(3, q));
                CHECK(Bd.dim() == 0);
            }
        }
    }
    auto T1 = page_table(B, 1);
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) CHECK(T1.dims.at({p, q}) == binom(3, p) * binom(3, q));
    auto rep = degeneration_index(B);
    CHECK(rep.degeneration_index == 1);
    for (int k = 0; k <= 6; ++k) CHECK(rep.betti.at(k) == binom(6, k));
}

TEST_CASE("first-page cycles are the kernel of the vertical block") {
    auto B = exact_builtin("iwasawa");
    for (int p = 0; p <= 3; ++p) {
        for (int q = 0; q <= 3; ++q) {
            auto Z1 = zigzag_space(B, p, q, 1);
            auto direct = SubQ::span(exact_kernel_basis(B.vert[p][q]));
            CHECK(subspace_equal(Z1, direct));
        }
    }
}

TEST_CASE("iwasawa second page") {
    auto B = exact_builtin("iwasawa");

    auto Z2 = zigzag_space(B, 1, 0, 2);
    CHECK(Z2.dim() == 2);
    MatQ first_two(3, 2);
    first_two(0, 0) = ExactC(1);
    first_two(1, 1) = ExactC(1);
    CHECK(subspace_equal(Z2, SubQ::span(first_two)));

    auto B2 = boundary_space(B, 2, 0, 2);
    CHECK(B2.dim() == 1);
    MatQ w1w2(3, 1);
    w1w2(0, 0) = ExactC(1);
    CHECK(subspace_equal(B2, SubQ::span(w1w2)));

    auto T1 = page_table(B, 1);
    auto T2 = page_table(B, 2);
    CHECK(T1.dims.at({1, 0}) == 3);
    CHECK(T2.dims.at({1, 0}) == 2);
    CHECK(T2.dims.at({0, 1}) == 2);

    auto rep = degeneration_index(B);
    CHECK(rep.degeneration_index == 2);
    std::vector<int> expect = {1, 4, 8, 10, 8, 4, 1};
    for (int k = 0; k <= 6; ++k) CHECK(rep.betti.at(k) == expect[k]);
    CHECK(rep.page_sums.at({2, 1}) == 4);
}

TEST_CASE("second-page boundaries match the image-sum description") {
    for (const char* name :
         {"torus2", "torus3", "iwasawa", "kodaira_thurston", "heisenberg_plus_abelian"}) {
        CAPTURE(name);
        auto B = exact_builtin(name);
        for (int p = 0; p <= B.pmax; ++p) {
            for (int q = 0; q <= B.qmax; ++q) {
                auto via_chain = boundary_space(B, p, q, 2);
                auto vert_image =
                    q >= 1 ? SubQ::span(B.vert[p][q - 1]) : SubQ::zero(B.dim(p, q));
                auto horiz_image =
                    p >= 1 ? SubQ::span(B.horiz[p - 1][q] * exact_kernel_basis(B.vert[p - 1][q]))
                           : SubQ::zero(B.dim(p, q));
                CHECK(subspace_equal(via_chain, subspace_sum(vert_image, horiz_image)));
            }
        }
    }
}

TEST_CASE("cycles shrink and boundaries grow with r") {
    for (const char* name : {"iwasawa", "kodaira_thurston", "heisenberg_plus_abelian"}) {
        CAPTURE(name);
        auto B = exact_builtin(name);
        for (int p = 0; p <= B.pmax; ++p) {
            for (int q = 0; q <= B.qmax; ++q) {
                for (int r = 1; r <= 3; ++r) {
                    auto Zr = zigzag_space(B, p, q, r);
                    auto Zn = zigzag_space(B, p, q, r + 1);
                    auto Br = boundary_space(B, p, q, r);
                    auto Bn = boundary_space(B, p, q, r + 1);
                    CHECK(subspace_contains_all(Zr, Zn));
                    CHECK(subspace_contains_all(Bn, Br));
                    CHECK(subspace_contains_all(Zr, Br));
                }
            }
        }
    }
}

TEST_CASE("graded page sums dominate betti numbers until degeneration") {
    for (const char* name : {"iwasawa", "kodaira_thurston", "heisenberg_plus_abelian"}) {
        CAPTURE(name);
        auto B = exact_builtin(name);
        auto rep = degeneration_index(B);
        for (auto& [rk, s] : rep.page_sums) CHECK(s >= rep.betti.at(rk.second));
        for (auto& [k, b] : rep.betti)
            CHECK(rep.page_sums.at({rep.degeneration_index, k}) == b);
    }
}

TEST_CASE("kodaira-thurston degenerates on the first page") {
    auto rep = degeneration_index(exact_builtin("kodaira_thurston"));
    CHECK(rep.degeneration_index == 1);
}

TEST_CASE("split heisenberg-sum total cohomology obeys the product rule") {
    DoubleComplex K(builtin_model("heisenberg_sum"));
    auto E = foliated_split(K, {0, 1, 2}, {3, 4, 5});
    auto B = make_bicomplex<ExactC>(E);

    std::vector<int> h = {1, 2, 2, 1};
    std::vector<int> expect(7, 0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) expect[i + j] += h[i] * h[j];

    auto betti = total_cohomology(B);
    REQUIRE((int)betti.size() == 7);
    for (int k = 0; k <= 6; ++k) CHECK(betti[k] == expect[k]);

    auto rep = degeneration_index(B);
    CHECK(rep.degeneration_index == 2);
}

TEST_CASE("abelian-factor split collapses on page two") {
    DoubleComplex K(builtin_model("heisenberg_plus_abelian"));
    auto E = foliated_split(K, {0, 1, 2}, {3});
    auto B = make_bicomplex<ExactC>(E);
    for (int p = 0; p <= B.pmax; ++p)
        for (int q = 0; q <= B.qmax; ++q) CHECK(B.vert[p][q].is_zero());
    auto rep = degeneration_index(B);
    CHECK(rep.degeneration_index == 2);
}

TEST_CASE("float page dims match exact page dims") {
    for (const char* name : {"torus3", "iwasawa", "kodaira_thurston"}) {
        CAPTURE(name);
        DoubleComplex K(builtin_model(name));
        auto BQ = make_bicomplex<ExactC>(K);
        auto BF = make_bicomplex<FloatC>(K);
        for (int r = 1; r <= 3; ++r) {
            auto TQ = page_table(BQ, r);
            auto TF = page_table(BF, r);
            CHECK(TQ.dims == TF.dims);
        }
        auto rq = degeneration_index(BQ);
        auto rf = degeneration_index(BF);
        CHECK(rq.degeneration_index == rf.degeneration_index);
        CHECK(rq.betti == rf.betti);
    }
}

TEST_CASE("non-commuting blocks fail the convergence cross-check") {
    // horiz(0,0) and vert(1,0) compose to the identity, so this is not a
    // bicomplex; the surviving class at (0,1) never matches total cohomology.
    BicomplexQ bad;
    bad.pmax = bad.qmax = 1;
    bad.dims = {{1, 1}, {1, 1}};
    MatQ one(1, 1), zero1(1, 1), zero0(0, 1);
    one(0, 0) = ExactC(1);
    bad.horiz = {{one, zero1}, {zero0, zero0}};
    bad.vert = {{zero1, zero0}, {one, zero0}};
    CHECK_THROWS_AS(degeneration_index(bad), theorem_violation);
}
