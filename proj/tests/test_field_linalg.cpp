#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hodgelab/linalg.hpp"
#include "hodgelab/scalar.hpp"

using namespace hodgelab;

namespace {

std::mt19937_64 rng_for(uint64_t seed) { return std::mt19937_64(seed); }

FloatC rand_c(std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return FloatC(u(g), u(g));
}

MatF rand_mat(std::mt19937_64& g, int r, int c) {
    MatF m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = rand_c(g);
    return m;
}

// Random Hermitian positive definite matrix, well conditioned.
MatF rand_pd(std::mt19937_64& g, int n) {
    MatF B = rand_mat(g, n, n);
    MatF G = B.hconj() * B;
    for (int i = 0; i < n; ++i) G(i, i) += FloatC(double(n), 0.0);
    return G;
}

MatF rand_psd(std::mt19937_64& g, int n, int rank) {
    MatF B = rand_mat(g, rank, n);
    return B.hconj() * B;
}

MatQ rand_matq(std::mt19937_64& g, int r, int c) {
    std::uniform_int_distribution<int> u(-6, 6);
    MatQ m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) {
            mpq_class im(u(g), 2);
            im.canonicalize();
            m(i, j) = ExactC(mpq_class(u(g)), im);
        }
    return m;
}

double max_eig(const std::vector<double>& v) { return v.empty() ? 0.0 : v.back(); }

} // namespace

TEST_CASE("exact scalar literals round-trip") {
    const char* cases[] = {"0",      "1",        "-1",         "1/2",     "-3/4",
                           "i",      "-i",       "2*i",        "1+i",     "1/2-3/4*i",
                           "-5+2/3*i", "7/3+1/9*i"};
    for (const char* s : cases) {
        ExactC v = parse_exact(s);
        CHECK(parse_exact(format_exact(v)) == v);
    }
    CHECK(parse_exact("3i") == parse_exact("3*i"));
    CHECK(parse_exact("1/2+1/2*i") == ExactC(mpq_class(1, 2), mpq_class(1, 2)));
    CHECK_THROWS_AS(parse_exact("1/0"), input_error);
    CHECK_THROWS_AS(parse_exact("abc"), input_error);
    CHECK_THROWS_AS(parse_exact(""), input_error);
    CHECK_THROWS_AS(parse_exact("1+"), input_error);
}

TEST_CASE("exact scalar field axioms spot checks") {
    ExactC a(mpq_class(3, 4), mpq_class(-2, 5));
    ExactC b(mpq_class(-1, 3), mpq_class(7, 2));
    CHECK(a + b - b == a);
    CHECK((a * b) / b == a);
    CHECK(a * (ExactC(1) / a) == ExactC(1));
    CHECK_THROWS_AS(a / ExactC(), numeric_error);
}

TEST_CASE("rank_kernel_image: zero and identity") {
    // zero 3x3: rank 0, kernel is everything
    auto rz = rank_kernel_image(MatQ(3, 3));
    CHECK(rz.rank == 0);
    CHECK(rz.kernel.dim() == 3);
    CHECK(rz.image.dim() == 0);
    auto rzf = rank_kernel_image(MatF(3, 3));
    CHECK(rzf.rank == 0);
    CHECK(rzf.kernel.dim() == 3);

    for (int n : {1, 4, 7}) {
        auto ri = rank_kernel_image(MatQ::identity(n));
        CHECK(ri.rank == n);
        CHECK(ri.kernel.dim() == 0);
        CHECK(ri.image.dim() == n);
        auto rif = rank_kernel_image(MatF::identity(n));
        CHECK(rif.rank == n);
        CHECK(rif.kernel.dim() == 0);
    }
}

TEST_CASE("rank_kernel_image: single-generator block") {
    // d(w3) = -w1^w2 on a 3-dim coframe: in the bases {w1,w2,w3} and
    // {w1^w2, w1^w3, w2^w3} the block has a lone -1 at (0,2).
    MatQ D(3, 3);
    D(0, 2) = ExactC(-1);
    auto r = rank_kernel_image(D);
    CHECK(r.rank == 1);
    CHECK(r.kernel.dim() == 2);
    CHECK(r.image.dim() == 1);
    // kernel = span(w1, w2), image = span(w1^w2)
    MatQ e1(3, 1), e2(3, 1), f1(3, 1);
    e1(0, 0) = ExactC(1);
    e2(1, 0) = ExactC(1);
    f1(0, 0) = ExactC(1);
    CHECK(subspace_contains(r.kernel, e1));
    CHECK(subspace_contains(r.kernel, e2));
    CHECK(subspace_contains(r.image, f1));

    auto rf = rank_kernel_image(to_float(D));
    CHECK(rf.rank == 1);
    CHECK(rf.kernel.dim() == 2);
}

TEST_CASE("rank_kernel_image: rank-nullity on random matrices") {
    auto g = rng_for(11);
    for (int trial = 0; trial < 20; ++trial) {
        int m = 1 + int(g() % 6), n = 1 + int(g() % 6);
        MatF A = rand_mat(g, m, n);
        auto r = rank_kernel_image(A);
        CHECK(r.rank + r.kernel.dim() == n);
        CHECK(r.image.dim() == r.rank);
        // A annihilates its kernel
        if (r.kernel.dim() > 0) CHECK(max_abs(A * r.kernel.basis) < 1e-9);
    }
    auto gq = rng_for(12);
    for (int trial = 0; trial < 10; ++trial) {
        MatQ A = rand_matq(gq, 4, 5);
        auto r = rank_kernel_image(A);
        CHECK(r.rank + r.kernel.dim() == 5);
        if (r.kernel.dim() > 0) CHECK((A * r.kernel.basis).is_zero());
    }
}

TEST_CASE("rank_kernel_image rejects NaN") {
    MatF A(2, 2);
    A(0, 0) = FloatC(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(rank_kernel_image(A), numeric_error);
}

TEST_CASE("exact solve and inverse") {
    auto g = rng_for(21);
    for (int trial = 0; trial < 8; ++trial) {
        MatQ A = rand_matq(g, 4, 4);
        if (exact_rank(A) < 4) continue;
        MatQ X = exact_inverse(A);
        CHECK(A * X == MatQ::identity(4));
        CHECK(X * A == MatQ::identity(4));
    }
    // inconsistent system has no solution
    MatQ A(2, 1), b(2, 1);
    A(0, 0) = ExactC(1);
    b(1, 0) = ExactC(1);
    CHECK(!exact_try_solve(A, b).has_value());
    MatQ sing(2, 2);
    sing(0, 0) = ExactC(1);
    CHECK_THROWS_AS(exact_inverse(sing), precondition_error);
}

TEST_CASE("subspace algebra: coordinate planes") {
    // U = span(e1), V = span(e2) inside C^3
    for (int pass = 0; pass < 2; ++pass) {
        if (pass == 0) {
            MatQ e1(3, 1), e2(3, 1);
            e1(0, 0) = ExactC(1);
            e2(1, 0) = ExactC(1);
            auto U = SubQ::span(e1), V = SubQ::span(e2);
            CHECK(subspace_sum(U, V).dim() == 2);
            CHECK(subspace_intersect(U, V).dim() == 0);
            CHECK(subspace_equal(subspace_intersect(U, U), U));
        } else {
            MatF e1(3, 1), e2(3, 1);
            e1(0, 0) = FloatC(1.0, 0.0);
            e2(1, 0) = FloatC(1.0, 0.0);
            auto U = SubF::span(e1), V = SubF::span(e2);
            CHECK(subspace_sum(U, V).dim() == 2);
            CHECK(subspace_intersect(U, V).dim() == 0);
            CHECK(subspace_equal(subspace_intersect(U, U), U));
        }
    }
}

TEST_CASE("subspace algebra: generic 3+3 in ambient 5") {
    auto g = rng_for(31);
    MatF BU = rand_mat(g, 5, 3), BV = rand_mat(g, 5, 3);
    // oracle for the intersection dimension: rank of the concatenated basis
    int cat_rank = float_rank(MatF::hstack({BU, BV}));
    CHECK(cat_rank == 5); // generic position
    auto U = SubF::span(BU), V = SubF::span(BV);
    auto W = subspace_intersect(U, V);
    CHECK(W.dim() == 3 + 3 - cat_rank);
    CHECK(W.dim() == 1);
    // the intersection really lies in both spaces
    CHECK(subspace_contains_all(U, W));
    CHECK(subspace_contains_all(V, W));
}

TEST_CASE("subspace algebra: dimension formula and complements") {
    auto g = rng_for(41);
    for (int trial = 0; trial < 12; ++trial) {
        int amb = 3 + int(g() % 4);
        int du = 1 + int(g() % amb), dv = 1 + int(g() % amb);
        auto U = SubF::span(rand_mat(g, amb, du));
        auto V = SubF::span(rand_mat(g, amb, dv));
        auto S = subspace_sum(U, V);
        auto I = subspace_intersect(U, V);
        CHECK(S.dim() == U.dim() + V.dim() - I.dim());
        CHECK(subspace_contains_all(S, U));
        CHECK(subspace_contains_all(S, I));

        GramC G(rand_pd(g, amb));
        auto Uperp = orth_complement(U, G);
        CHECK(Uperp.dim() == amb - U.dim());
        CHECK(subspace_equal(orth_complement(Uperp, G), U));
        // complement is G-orthogonal to U
        CHECK(max_abs(U.basis.hconj() * G.apply(Uperp.basis)) < 1e-9);
    }

    auto gq = rng_for(42);
    for (int trial = 0; trial < 6; ++trial) {
        auto U = SubQ::span(rand_matq(gq, 5, 2));
        auto V = SubQ::span(rand_matq(gq, 5, 3));
        auto S = subspace_sum(U, V);
        auto I = subspace_intersect(U, V);
        CHECK(S.dim() == U.dim() + V.dim() - I.dim());
        auto Uperp = orth_complement(U, GramQ::identity_form(5));
        CHECK(Uperp.dim() == 5 - U.dim());
        CHECK(subspace_equal(orth_complement(Uperp, GramQ::identity_form(5)), U));
    }
}

TEST_CASE("subspace membership is idempotent") {
    auto g = rng_for(51);
    auto U = SubF::span(rand_mat(g, 6, 3));
    for (int j = 0; j < U.dim(); ++j) {
        CHECK(subspace_contains(U, U.basis.col(j)));
    }
    MatF outside = rand_mat(g, 6, 1);
    bool in_first = subspace_contains(U, outside);
    CHECK(subspace_contains(U, outside) == in_first);
}

TEST_CASE("subspace ambient mismatch raises") {
    auto U = SubF::full(3);
    auto V = SubF::full(4);
    CHECK_THROWS_AS(subspace_sum(U, V), dim_error);
    CHECK_THROWS_AS(subspace_intersect(U, V), dim_error);
}

TEST_CASE("gram_adjoint: identity Grams give the conjugate transpose") {
    auto g = rng_for(61);
    MatF A = rand_mat(g, 4, 3);
    MatF Ad = gram_adjoint(A, GramC::identity_form(3), GramC::identity_form(4));
    CHECK(max_abs(Ad - A.hconj()) == 0.0);

    MatQ B = rand_matq(g, 3, 3);
    MatQ Bd = gram_adjoint(B, GramQ::identity_form(3), GramQ::identity_form(3));
    CHECK(Bd == B.hconj());
}

TEST_CASE("gram_adjoint: identity operator is self-adjoint under any Gram") {
    auto g = rng_for(62);
    for (int n : {2, 4}) {
        GramC G(rand_pd(g, n));
        MatF Id = MatF::identity(n);
        CHECK(max_abs(gram_adjoint(Id, G, G) - Id) < 1e-12);
    }
}

TEST_CASE("gram_adjoint: defining identity over random pairs") {
    auto g = rng_for(63);
    GramC Gdom(rand_pd(g, 3)), Gcod(rand_pd(g, 5));
    MatF A = rand_mat(g, 5, 3);
    MatF Ad = gram_adjoint(A, Gdom, Gcod);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        MatF u = rand_mat(g, 3, 1), v = rand_mat(g, 5, 1);
        FloatC lhs = Gcod.inner(A * u, v);
        FloatC rhs = Gdom.inner(u, Ad * v);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    CHECK(worst <= 1e-12);
    // involution
    CHECK(max_abs(gram_adjoint(Ad, Gcod, Gdom) - A) <= 1e-12);
    // rank is preserved by taking adjoints
    CHECK(float_rank(Ad) == float_rank(A));

    // exact backend: involution is entrywise equality
    MatQ Gq(2, 2);
    Gq(0, 0) = ExactC(2);
    Gq(1, 1) = ExactC(3);
    Gq(0, 1) = ExactC::i();
    Gq(1, 0) = -ExactC::i();
    GramQ Ge(Gq);
    MatQ B = rand_matq(g, 2, 2);
    MatQ Bd = gram_adjoint(B, Ge, Ge);
    CHECK(gram_adjoint(Bd, Ge, Ge) == B);
    CHECK(exact_rank(Bd) == exact_rank(B));
}

TEST_CASE("GramForm rejects bad matrices") {
    MatF notherm(2, 2);
    notherm(0, 1) = FloatC(1.0, 0.0);
    CHECK_THROWS_AS(GramC{notherm}, metric_error);

    MatF indef = MatF::identity(2);
    indef(1, 1) = FloatC(-1.0, 0.0);
    CHECK_THROWS_AS(GramC{indef}, metric_error);

    MatQ qindef = MatQ::identity(2);
    qindef(1, 1) = ExactC(-1);
    CHECK_THROWS_AS(GramQ{qindef}, metric_error);

    MatQ qnh(2, 2);
    qnh(0, 0) = ExactC::i();
    qnh(1, 1) = ExactC(1);
    CHECK_THROWS_AS(GramQ{qnh}, metric_error);
}

TEST_CASE("hermitian_eigs: pinned spectra") {
    // zero operator
    auto r0 = hermitian_eigs(MatF(3, 3), GramC::identity_form(3));
    for (double v : r0.values) CHECK(std::abs(v) <= 1e-14);

    // diag(1,2)
    MatF D(2, 2);
    D(0, 0) = FloatC(1.0, 0.0);
    D(1, 1) = FloatC(2.0, 0.0);
    auto rd = hermitian_eigs(D, GramC::identity_form(2));
    REQUIRE(rd.values.size() == 2);
    CHECK(rd.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rd.values[1] == doctest::Approx(2.0).epsilon(1e-12));

    // Laplacian of the single-generator block above: D'+D'' on the (1,0)
    // component with the standard metric reduces to B*B with one unit entry,
    // so the spectrum is {0, 0, 1}.
    MatF B(3, 3);
    B(0, 2) = FloatC(-1.0, 0.0);
    auto I3 = GramC::identity_form(3);
    MatF lap = gram_adjoint(B, I3, I3) * B;
    auto rl = hermitian_eigs(lap, I3);
    REQUIRE(rl.values.size() == 3);
    CHECK(std::abs(rl.values[0]) <= 1e-12);
    CHECK(std::abs(rl.values[1]) <= 1e-12);
    CHECK(rl.values[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hermitian_eigs: residuals and G-orthonormality") {
    auto g = rng_for(71);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 2 + int(g() % 5);
        GramC G(rand_pd(g, n));
        // build a G-self-adjoint operator: G^{-1} M with M Hermitian
        MatF M0 = rand_mat(g, n, n);
        MatF M = M0 + M0.hconj();
        MatF A = G.inv_apply(M);
        auto r = hermitian_eigs(A, G);
        REQUIRE((int)r.values.size() == n);
        double smax = std::max(std::abs(r.values.front()), std::abs(r.values.back()));
        for (int i = 0; i < n; ++i) {
            MatF v = r.vectors.col(i);
            MatF resid = A * v - r.values[i] * v;
            CHECK(fro_norm(resid) <= 1e-10 * (1.0 + smax));
            for (int j = 0; j < n; ++j) {
                FloatC gij = G.inner(r.vectors.col(j), v);
                double want = (i == j) ? 1.0 : 0.0;
                CHECK(std::abs(gij - FloatC(want, 0.0)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("hermitian_eigs: PSD spectra stay above -tol") {
    auto g = rng_for(72);
    for (int trial = 0; trial < 8; ++trial) {
        int n = 3 + int(g() % 4);
        MatF A = rand_psd(g, n, std::max(1, n - 2));
        auto vals = hermitian_eigvals(A, GramC::identity_form(n));
        double smax = max_eig(vals);
        CHECK(vals.front() >= -1e-10 * (1.0 + smax));
    }
}

TEST_CASE("hermitian_eigs rejects non-self-adjoint input") {
    MatF A(2, 2);
    A(0, 1) = FloatC(1.0, 0.0); // nilpotent, not Hermitian
    CHECK_THROWS_AS(hermitian_eigs(A, GramC::identity_form(2)), symmetry_error);
}

TEST_CASE("psd_domination_check: trivial orders") {
    auto I2 = GramC::identity_form(2);
    CHECK(psd_domination_check(MatF::identity(2), MatF(2, 2), I2));
    CHECK(!psd_domination_check(MatF(2, 2), MatF::identity(2), I2));
    // non-PSD input refused
    MatF neg = MatF::identity(2);
    neg *= FloatC(-1.0, 0.0);
    CHECK_THROWS_AS(psd_domination_check(neg, MatF(2, 2), I2), precondition_error);
}

TEST_CASE("psd_domination_check: kernel-inclusion construction") {
    // Build pairs (A, B) with ker A contained in ker B and B bounded by A on
    // the orthogonal complement of ker A; domination must then hold globally.
    auto g = rng_for(81);
    int tested = 0;
    for (int trial = 0; tested < 50; ++trial) {
        REQUIRE(trial < 200);
        int n = 3 + int(g() % 4);
        int defect = 1 + int(g() % 2);
        MatF M = rand_psd(g, n, n - defect);
        auto I_n = GramC::identity_form(n);
        auto rk = rank_kernel_image(M);
        if (rk.kernel.dim() != defect) continue;

        // complement of ker M and the smallest positive eigenvalue there
        MatF V = rk.image.basis; // = (ker M)^perp for Hermitian M
        auto vals = hermitian_eigvals(M, I_n);
        double lam_min_pos = 0.0;
        for (double v : vals)
            if (v > 1e-8 * (1.0 + max_eig(vals))) {
                lam_min_pos = v;
                break;
            }
        REQUIRE(lam_min_pos > 0.0);

        // N = P C P scaled so that N <= lam_min_pos on the complement
        MatF C = rand_psd(g, n, n);
        double cmax = max_eig(hermitian_eigvals(C, I_n));
        REQUIRE(cmax > 0.0);
        MatF P = V * V.hconj();
        MatF N = P * C * P;
        N *= FloatC(0.9 * lam_min_pos / cmax, 0.0);

        // hypotheses hold by construction; confirm numerically
        CHECK(max_abs(N * rk.kernel.basis) <= 1e-9);
        MatF diff_on_comp = V.hconj() * (M - N) * V;
        auto comp_vals = hermitian_eigvals(diff_on_comp, GramC::identity_form(V.cols()));
        CHECK(comp_vals.front() >= -1e-9 * (1.0 + max_eig(vals)));

        // the global conclusion
        CHECK(psd_domination_check(M, N, I_n));

        // same instance pushed through a non-trivial Gram
        GramC G(rand_pd(g, n));
        MatF A_g = G.inv_apply(M), B_g = G.inv_apply(N);
        CHECK(psd_domination_check(A_g, B_g, G));
        ++tested;
    }
    CHECK(tested == 50);
}

TEST_CASE("orthonormal_image and float_kernel_basis shapes") {
    auto g = rng_for(91);
    MatF A = rand_mat(g, 6, 4);
    MatF Q = orthonormal_image(A);
    CHECK(Q.cols() == 4);
    CHECK(max_abs(Q.hconj() * Q - MatF::identity(4)) < 1e-12);
    MatF K = float_kernel_basis(A);
    CHECK(K.cols() == 0);

    // duplicate a column; rank drops, kernel appears
    MatF A2 = MatF::hstack({A, A.col(0)});
    CHECK(float_rank(A2) == 4);
    MatF K2 = float_kernel_basis(A2);
    CHECK(K2.cols() == 1);
    CHECK(max_abs(A2 * K2) < 1e-9);
}
