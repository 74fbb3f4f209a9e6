#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hodgelab/certify.hpp"
#include "hodgelab/rng.hpp"
#include "hodgelab/structure.hpp"

using namespace hodgelab;

namespace {

DoubleComplex model(const char* name) { return DoubleComplex{builtin_model(name)}; }

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename S>
bool grid_zero(const std::vector<std::vector<Mat<S>>>& grid) {
    for (const auto& row : grid)
        for (const auto& blk : row)
            if (!blk.is_zero()) return false;
    return true;
}

} // namespace

TEST_CASE("flat model carries no torsion for any constant metric") {
    auto K = model("torus3");

    auto mq = build_metric(K, MatQ::identity(3));
    auto pq = build_hodge_package(K, mq);
    auto tq = torsion_operators(pq);
    CHECK(grid_zero(tq.tau));
    CHECK(grid_zero(tq.wdel));
    CHECK(grid_zero(tq.wdbar));
    CHECK(grid_zero(tq.z_omega));
    CHECK(grid_zero(tq.rbar_omega));
    CHECK(grid_zero(tq.t_omega));

    Rng rng(421);
    auto mq2 = build_metric(K, rng.pd_matrix_exact(3));
    auto pq2 = build_hodge_package(K, mq2);
    auto tq2 = torsion_operators(pq2);
    CHECK(grid_zero(tq2.tau));
    CHECK(grid_zero(tq2.z_omega));

    auto mf = build_metric(K, rng.pd_matrix(3));
    auto pf = build_hodge_package(K, mf);
    auto tf = torsion_operators(pf);
    CHECK(grid_zero(tf.tau));
    CHECK(grid_zero(tf.t_omega));
}

TEST_CASE("nilpotent model torsion blocks have the expected exact values") {
    auto K = model("iwasawa");
    auto m = build_metric(K, MatQ::identity(3));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);

    MatQ one(1, 1);
    one(0, 0) = ExactC(1);
    CHECK(tp.sbar_omega[0][0] == one);

    CHECK_FALSE(grid_zero(tp.tau));
    CHECK_FALSE(grid_zero(tp.t_omega));
}

TEST_CASE("exact identity suite closes on the built-in models") {
    for (const char* name : {"torus3", "iwasawa", "kodaira_thurston"}) {
        CAPTURE(name);
        auto K = model(name);
        auto m = build_metric(K, MatQ::identity(K.n()));
        auto pkg = build_hodge_package(K, m);
        auto tp = torsion_operators(pkg);
        IdentityReport rep = identity_suite(tp, 2, 99);
        CHECK(rep.rows.size() == 15);
        for (const auto& row : rep.rows) {
            CAPTURE(row.id);
            CHECK(row.residual == 0.0);
            CHECK(row.holds);
        }
    }
}

TEST_CASE("float identity suite is tight on the nilpotent model") {
    auto K = model("iwasawa");
    auto m = build_metric(K, MatF::identity(3));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);
    IdentityReport rep = identity_suite(tp, 3, 7);
    CHECK(rep.at("BKN2").residual <= 1e-11);
    for (const auto& row : rep.rows) {
        CAPTURE(row.id);
        CHECK(row.holds);
    }
}

TEST_CASE("identity suite holds for random metrics on the four-dimensional model") {
    auto K = model("kodaira_thurston");
    Rng rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        CAPTURE(trial);
        auto m = build_metric(K, rng.pd_matrix(2));
        auto pkg = build_hodge_package(K, m);
        auto tp = torsion_operators(pkg);
        IdentityReport rep = identity_suite(tp, 2, 31 + trial);
        for (const char* id : {"COMM1", "COMM2", "COMM3", "COMM4", "AUX1", "AUX2", "AUX3",
                               "AUX4", "ANTI", "L54", "L54q"}) {
            CAPTURE(id);
            CHECK(rep.at(id).residual <= 1e-10);
        }
        for (const char* id : {"BKN1", "BKN2", "BKN2c"}) {
            CAPTURE(id);
            CHECK(rep.at(id).residual <= 1e-8);
        }
        CHECK(rep.at("L55").holds);
    }
}

TEST_CASE("identity report lookups") {
    auto K = model("torus3");
    auto m = build_metric(K, MatF::identity(3));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);
    IdentityReport rep = identity_suite(tp, 1, 5);
    CHECK(rep.at("L54").id == "L54");
    CHECK_THROWS_AS(rep.at("no-such-identity"), precondition_error);
    CHECK_THROWS_AS(identity_suite(tp, 0, 5), precondition_error);
}

TEST_CASE("gap quantities on the flat model") {
    auto K = model("torus3");
    auto m = build_metric(K, MatF::identity(3));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) {
            CAPTURE(p);
            CAPTURE(q);
            GapAndBound gb = gap_and_bound(tp, p, q);
            CHECK(gb.rho == kInf);
            CHECK(gb.lambda0 == kInf);
            CHECK(gb.mu0 == kInf);
            CHECK(gb.cbound == 0.0);
        }
    CHECK_THROWS_AS(gap_and_bound(tp, -1, 0), dim_error);
    CHECK_THROWS_AS(gap_and_bound(tp, 0, 4), dim_error);
}

TEST_CASE("gap quantities on the nilpotent model at bidegree (1,0)") {
    auto K = model("iwasawa");
    auto m = build_metric(K, MatF::identity(3));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);

    GapAndBound gb = gap_and_bound(tp, 1, 0);
    CHECK(gb.lambda0 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(gb.rho == doctest::Approx(1.0).epsilon(1e-9));

    auto vals = hermitian_eigvals(pkg.lap_sum[1][0], pkg.gram(1, 0));
    REQUIRE(vals.size() == 3);
    CHECK(std::abs(vals[0]) <= 1e-9);
    CHECK(std::abs(vals[1]) <= 1e-9);
    CHECK(vals[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("metric scaling moves all gap quantities by one common factor") {
    auto K = model("iwasawa");
    auto m1 = build_metric(K, MatF::identity(3));
    auto p1 = build_hodge_package(K, m1);
    auto t1 = torsion_operators(p1);

    MatF H2 = MatF::identity(3);
    H2 *= FloatC(2.5, 0.0);
    auto m2 = build_metric(K, H2);
    auto p2 = build_hodge_package(K, m2);
    auto t2 = torsion_operators(p2);

    std::vector<double> ratios;
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) {
            GapAndBound a = gap_and_bound(t1, p, q);
            GapAndBound b = gap_and_bound(t2, p, q);
            auto note = [&](double x, double y) {
                if (std::isfinite(x) && x > 1e-9) {
                    CHECK(std::isfinite(y));
                    ratios.push_back(y / x);
                } else {
                    CHECK(x == y);
                }
            };
            note(a.rho, b.rho);
            note(a.lambda0, b.lambda0);
            note(a.mu0, b.mu0);
            note(a.cbound, b.cbound);
        }
    REQUIRE(!ratios.empty());
    for (double r : ratios) CHECK(r == doctest::Approx(2.5).epsilon(1e-9));

    auto tk = model("torus3");
    auto km1 = build_metric(tk, MatF::identity(3));
    auto kp1 = build_hodge_package(tk, km1);
    auto kt1 = torsion_operators(kp1);
    MatF KH2 = MatF::identity(3);
    KH2 *= FloatC(2.5, 0.0);
    auto km2 = build_metric(tk, KH2);
    auto kp2 = build_hodge_package(tk, km2);
    auto kt2 = torsion_operators(kp2);
    auto r1 = certify_e2(kt1);
    auto r2 = certify_e2(kt2);
    REQUIRE(r1.size() == r2.size());
    for (size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].verdict == r2[i].verdict);
}

TEST_CASE("flat model fires every page-two certificate") {
    auto K = model("torus3");
    auto m = build_metric(K, MatF::identity(3));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);

    auto reports = certify_e2(tp);
    REQUIRE(reports.size() == 4);
    for (const auto& r : reports) {
        CAPTURE(r.name);
        CHECK(r.applicable);
        CHECK(r.verdict);
        CHECK(r.cross_check == 1);
    }

    auto e1 = certify_e1(tp);
    REQUIRE(e1.size() == 2);
    for (const auto& r : e1) {
        CAPTURE(r.name);
        CHECK(r.applicable);
        CHECK(r.verdict);
        CHECK(r.cross_check == 1);
    }
}

TEST_CASE("nilpotent model certificates are sound at page two") {
    auto K = model("iwasawa");
    auto m = build_metric(K, MatF::identity(3));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);

    auto reports = certify_e2(tp);
    REQUIRE(reports.size() == 4);
    for (const auto& r : reports) CHECK(r.cross_check == 2);
    CHECK_FALSE(reports[0].applicable); // GAP needs the closed-torsion metric condition
    CHECK_FALSE(reports[0].verdict);

    auto e1 = certify_e1(tp);
    REQUIRE(e1.size() == 2);
    for (const auto& r : e1) {
        CAPTURE(r.name);
        CHECK_FALSE(r.verdict);
        CHECK(r.cross_check == 2);
    }
}

TEST_CASE("four-dimensional model certificates stay sound") {
    auto K = model("kodaira_thurston");
    auto m = build_metric(K, MatF::identity(2));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);
    auto reports = certify_e2(tp);
    for (const auto& r : reports) CHECK(r.cross_check == 1);
    auto e1 = certify_e1(tp);
    for (const auto& r : e1) CHECK(r.cross_check == 1);

    Rng rng(777);
    for (int trial = 0; trial < 5; ++trial) {
        CAPTURE(trial);
        auto mr = build_metric(K, rng.pd_matrix(2));
        auto pr = build_hodge_package(K, mr);
        auto tr = torsion_operators(pr);
        CHECK_NOTHROW(certify_e2(tr));
        CHECK_NOTHROW(certify_e1(tr));
    }
}

TEST_CASE("sharp gap analysis on the flat model") {
    auto K = model("torus3");
    auto m = build_metric(K, MatF::identity(3));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);
    SharpGapReport rep = sharp_gap_analysis(tp);
    CHECK(rep.applicable);
    CHECK(rep.hypothesis_all);
    CHECK(rep.eps1 == 0.0);
    CHECK(rep.domination);
    REQUIRE(rep.rows.size() == 16);
    for (const auto& row : rep.rows) {
        CHECK(row.hypothesis);
        CHECK(row.lower_bound);
        CHECK(row.injective);
        CHECK(row.trivial_overlap);
    }
}

TEST_CASE("sharp gap analysis reports without firing on the nilpotent model") {
    auto K = model("iwasawa");
    auto m = build_metric(K, MatF::identity(3));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);
    SharpGapReport rep;
    CHECK_NOTHROW(rep = sharp_gap_analysis(tp));
    CHECK_FALSE(rep.applicable);
    CHECK(rep.rows.size() == 16);
}

TEST_CASE("sharp gap analysis runs on the four-dimensional model") {
    auto K = model("kodaira_thurston");
    auto m = build_metric(K, MatF::identity(2));
    auto pkg = build_hodge_package(K, m);
    auto tp = torsion_operators(pkg);
    SharpGapReport rep;
    CHECK_NOTHROW(rep = sharp_gap_analysis(tp));
    CHECK(rep.rows.size() == 9);
    for (const auto& row : rep.rows) {
        CHECK(row.eps1 >= 0.0);
        CHECK(row.eps1 <= 1.0);
    }
}

TEST_CASE("sharp gap internal equivalences hold for random metrics") {
    Rng rng(6061);
    for (const char* name : {"torus3", "iwasawa", "kodaira_thurston"}) {
        CAPTURE(name);
        auto K = model(name);
        for (int trial = 0; trial < 3; ++trial) {
            CAPTURE(trial);
            auto m = build_metric(K, rng.pd_matrix(K.n()));
            auto pkg = build_hodge_package(K, m);
            auto tp = torsion_operators(pkg);
            CHECK_NOTHROW(sharp_gap_analysis(tp));
        }
    }
}
