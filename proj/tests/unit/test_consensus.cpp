#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "limas/consensus.hpp"
#include "limas/error.hpp"
#include "limas/sim.hpp"

using namespace limas;
using limas::testing::random_matrix;

namespace {

Matrix scalar_mat(double v) { return Matrix::Constant(1, 1, v); }

/// Path 1-2-3 with weights giving nonzero eigenvalues {1, g}: w12 + w23 = (1 + g)/2, 3 w12 w23 = g.
WeightedGraph path_with_eigenratio(double g) {
    const double s = 0.5 * (1.0 + g), p = g / 3.0;
    const double d = std::sqrt(s * s - 4.0 * p);
    return WeightedGraph(3, {{0, 1, 0.5 * (s + d)}, {1, 2, 0.5 * (s - d)}});
}

LimasModel supercap_model(std::uint64_t seed = 42) {
    SupercapParams p;
    p.line_resistances = draw_uniform(seed, "line_resistances", 6, 10.0, 50.0);
    return build_supercap(p, supercap_physical_topology(), supercap_cyber_topology());
}

LimasModel dcmg_model(std::uint64_t seed = 42) {
    DcmgParams p;
    p.line_resistances = draw_uniform(seed, "line_resistances", 8, 4.0, 8.0);
    return build_dcmg(p, dcmg_physical_topology(), complete_graph(9, 1.0 / 9.0));
}

/// Random model whose Laplacians commute: Lc complete uniform or Lp = beta Lc.
LimasModel random_commuting_model(CounterRng& rng) {
    const auto N = static_cast<std::size_t>(3 + rng.below(3));
    const auto n = static_cast<Eigen::Index>(1 + rng.below(3));
    while (true) {
        Matrix a = random_matrix(rng, n, n, -1.2, 1.2);
        Matrix ap = random_matrix(rng, n, n, -0.3, 0.3);
        Vector b = random_matrix(rng, n, 1);
        if (!is_controllable(a, b)) continue;
        std::vector<Edge> ce;
        for (std::size_t i = 1; i < N; ++i) ce.push_back({rng.below(i), i, rng.uniform(0.2, 1.0)});
        const WeightedGraph tree(N, ce);
        if (rng.uniform() < 0.5) {
            return LimasModel(a, ap, b, tree.scaled(rng.uniform(0.05, 0.5)), complete_graph(N, rng.uniform(0.1, 1.0)));
        }
        return LimasModel(a, ap, b, tree.scaled(rng.uniform(0.05, 0.5)), tree);
    }
}

}  // namespace

TEST_CASE("model validation") {
    const auto g = path_graph(3, 1.0);
    CHECK_THROWS_AS(LimasModel(Matrix::Identity(2, 2), Matrix::Zero(1, 1), Vector::Ones(2), g, g), Error);
    CHECK_THROWS_AS(LimasModel(scalar_mat(1), scalar_mat(0), Vector::Ones(1), path_graph(4, 1.0), g), Error);
    try {
        LimasModel(scalar_mat(1), scalar_mat(0), Vector::Ones(1), g, WeightedGraph(3, {{0, 1, 1.0}}));
        FAIL("expected CyberGraphDisconnected");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CyberGraphDisconnected);
    }
    // a disconnected physical graph is fine
    CHECK_NOTHROW(LimasModel(scalar_mat(1), scalar_mat(1), Vector::Ones(1), WeightedGraph(3, {{0, 1, 1.0}}), g));
}

TEST_CASE("assumption checks") {
    const auto g = path_graph(3, 1.0);
    Matrix a(2, 2);
    a << 1.1, 0.2, 0.0, 0.9;
    Vector b(2);
    b << 0.0, 1.0;

    const auto zero = check_assumptions(LimasModel(a, Matrix::Zero(2, 2), b, g, g));
    REQUIRE(zero.alpha.has_value());
    CHECK(*zero.alpha == 0.0);
    CHECK(zero.a1_commuting);
    CHECK(zero.a2_controllable.value_or(false));

    const auto prop = check_assumptions(LimasModel(a, 0.3 * a, b, g, g));
    REQUIRE(prop.alpha.has_value());
    CHECK(*prop.alpha == doctest::Approx(0.3));

    Matrix ap = 0.3 * a;
    ap(1, 0) = 1e-3;
    CHECK_FALSE(proportionality(a, ap).has_value());
    CHECK_FALSE(proportionality(Matrix::Zero(2, 2), ap).has_value());

    const auto dc = check_assumptions(dcmg_model());
    CHECK(dc.a1_commuting);
    CHECK(dc.a2_controllable.value_or(false));
    CHECK_FALSE(dc.alpha.has_value());

    const auto sc = check_assumptions(supercap_model());
    CHECK_FALSE(sc.a1_commuting);
}

TEST_CASE("scalar test examples") {
    SUBCASE("no physical coupling recovers the exact condition") {
        const auto sp = spectrum(Matrix::Zero(4, 4));
        const auto sc = spectrum(laplacian(complete_graph(4, 0.5)));
        const auto r = scalar_test(1.0, sp, sc);
        REQUIRE(r.intervals.has_value());
        CHECK_FALSE(r.intervals->s1);
        CHECK(r.intervals->s2);
        CHECK(r.verdict == Verdict::ConsensusableSufficient);
        // K- = (-2/lambda_c, 0) with lambda_c = 2
        CHECK(r.intervals->admissible_minus->lo == doctest::Approx(-1.0));
        CHECK(r.intervals->admissible_minus->hi == 0.0);
        CHECK((*r.gain)[0] == doctest::Approx(-0.5));
    }
    SUBCASE("delta_p above 2 defeats both conditions") {
        LaplacianSpectrum sp;
        sp.eigenvalues = (Vector(3) << 0.0, 0.5, 3.5).finished();
        sp.delta = 3.0;
        for (double gamma : {1.0, 1.5, 3.0, 10.0, 100.0}) {
            LaplacianSpectrum sc;
            sc.eigenvalues = (Vector(3) << 0.0, 1.0, gamma).finished();
            sc.eigenratio = gamma;
            for (double a : {-1.5, 0.0, 0.7, 1.0, 2.0}) {
                const auto r = scalar_test(a, sp, sc);
                CHECK_FALSE(r.intervals->s1);
                CHECK_FALSE(r.intervals->s2);
                CHECK(r.verdict == Verdict::NotConcluded);
            }
        }
    }
    SUBCASE("supercapacitor network") {
        const auto r = scalar_test(supercap_model());
        REQUIRE(r.intervals.has_value());
        CHECK(r.intervals->s1);
        CHECK(r.intervals->s2);
        CHECK(r.verdict == Verdict::ConsensusableSufficient);
        CHECK(r.intervals->k_plus.hi > 1e-5);
        CHECK(r.intervals->k_plus.hi < 1e-3);
        CHECK(r.intervals->k_minus.lo < -1e4);
        CHECK(r.intervals->k_minus.lo > -1e6);
        CHECK(gain_is_sound(supercap_model(), *r.gain));
    }
    SUBCASE("non-scalar or unlumpable models") {
        CHECK(scalar_test(dcmg_model()).verdict == Verdict::AssumptionViolation);
        const auto g = path_graph(3, 1.0);
        CHECK(scalar_test(LimasModel(scalar_mat(1), scalar_mat(-1), Vector::Ones(1), g, g)).verdict ==
              Verdict::AssumptionViolation);
    }
}

TEST_CASE("property: scalar intervals are stabilizing") {
    CounterRng rng(1000, "prop-scalar-interval");
    int hits = 0;
    for (int t = 0; t < 60; ++t) {
        const auto N = static_cast<std::size_t>(3 + rng.below(5));
        std::vector<Edge> pe, ce;
        for (std::size_t i = 1; i < N; ++i) {
            pe.push_back({rng.below(i), i, rng.uniform(0.001, 0.1)});
            ce.push_back({rng.below(i), i, rng.uniform(0.2, 1.0)});
        }
        const WeightedGraph gc(N, ce);
        const LimasModel m(scalar_mat(rng.uniform(0.5, 1.3)), scalar_mat(1.0), Vector::Ones(1), WeightedGraph(N, pe),
                           rng.uniform() < 0.5 ? gc : complete_graph(N, rng.uniform(0.2, 1.0)));
        const auto r = scalar_test(m);
        if (!r.intervals) continue;
        for (const auto& adm : {r.intervals->admissible_plus, r.intervals->admissible_minus}) {
            if (!adm) continue;
            ++hits;
            for (int i = 1; i < 1000; ++i) {
                const double k = adm->lo + adm->width() * i / 1000.0;
                CHECK(spectral_radius(reduced_closed_loop_matrix(m, RowVector::Constant(1, k))) < 1.0);
            }
        }
    }
    CHECK(hits > 20);
}

TEST_CASE("property: no-coupling scalar test is exact") {
    CounterRng rng(2000, "prop-no-coupling");
    int yes = 0, no = 0;
    for (int t = 0; t < 300; ++t) {
        const auto N = static_cast<std::size_t>(3 + rng.below(5));
        std::vector<Edge> ce;
        for (std::size_t i = 1; i < N; ++i) ce.push_back({rng.below(i), i, rng.uniform(0.2, 1.5)});
        const double a = rng.uniform(-4.0, 4.0);
        const auto sp = spectrum(Matrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N)));
        const auto sc = spectrum(laplacian(WeightedGraph(N, ce)));
        const auto r = scalar_test(a, sp, sc);
        // exact: some k with |a + k lambda_i| < 1 for every nonzero lambda_i
        double lo = -1e300, hi = 1e300;
        for (Eigen::Index i = 1; i < sc.eigenvalues.size(); ++i) {
            lo = std::max(lo, (-1.0 - a) / sc.eigenvalues[i]);
            hi = std::min(hi, (1.0 - a) / sc.eigenvalues[i]);
        }
        const bool exact = hi > lo;
        CHECK((r.verdict == Verdict::ConsensusableSufficient) == exact);
        (exact ? yes : no)++;
    }
    CHECK(yes > 20);
    CHECK(no > 20);
}

TEST_CASE("lp sufficient test") {
    const auto dc = lp_sufficient_test(dcmg_model());
    CHECK(dc.verdict == Verdict::ConsensusableSufficient);
    REQUIRE(dc.gain.has_value());
    CHECK(gain_is_sound(dcmg_model(), *dc.gain));

    // Ap = 0 with a complete uniform cyber graph: identical modal pairs
    CounterRng rng(17, "identical-pairs");
    for (int t = 0; t < 20; ++t) {
        const auto p = limas::testing::random_pair(rng, 3, 2.0);
        const LimasModel m(p.a(), Matrix::Zero(3, 3), p.b(), path_graph(5, 1.0), complete_graph(5, 0.3));
        const auto r = lp_sufficient_test(m);
        CHECK(r.verdict == Verdict::ConsensusableSufficient);
        CHECK(r.margin.value_or(0.0) == doctest::Approx(1.0));
    }

    // circle and star cyber graphs break A1 on the DGU tree
    DcmgParams p;
    p.line_resistances = draw_uniform(42, "line_resistances", 8, 4.0, 8.0);
    for (const auto& gc : {circle_graph(9, 1.0), star_graph(9, 1.0)}) {
        const auto r = lp_sufficient_test(build_dcmg(p, dcmg_physical_topology(), gc));
        CHECK(r.verdict == Verdict::NotConcluded);
        CHECK_FALSE(r.gain.has_value());
    }
}

TEST_CASE("analytic sufficient test") {
    SUBCASE("uncoupled stable agents") {
        Matrix a(2, 2);
        a << 0.5, 0.1, 0.0, 0.3;
        const LimasModel m(a, Matrix::Zero(2, 2), (Vector(2) << 0.0, 1.0).finished(), path_graph(4, 1.0),
                           path_graph(4, 1.0));
        const auto r = analytic_sufficient_test(m);
        CHECK(r.verdict == Verdict::ConsensusableSufficient);
        CHECK(r.gain->isZero());
        CHECK(*r.sigma_c == 0.0);
    }
    SUBCASE("scalar pipeline") {
        // Lp on three nodes with nonzero eigenvalues {1, 2}; Ap = 0.01 A
        const WeightedGraph gp(3, {{0, 1, 1.0 / 3.0}, {0, 2, 1.0 / 3.0}, {1, 2, 5.0 / 6.0}});
        const auto sp = spectrum(laplacian(gp));
        CHECK(sp.eigenvalues[1] == doctest::Approx(1.0));
        CHECK(sp.eigenvalues[2] == doctest::Approx(2.0));
        const LimasModel m(scalar_mat(1.1), scalar_mat(0.011), Vector::Ones(1), gp, complete_graph(3, 1.0 / 3.0));
        const auto r = analytic_sufficient_test(m);
        REQUIRE(r.verdict == Verdict::ConsensusableSufficient);
        // alpha_i in {0.99, 0.98}, lambda_c = 1: k* = 0.985 and K = -k* a for n = 1
        CHECK(*r.k_star == doctest::Approx(0.985));
        CHECK(*r.sigma_c == doctest::Approx(1.0 - 1.0 / (1.089 * 1.089)));
        CHECK(*r.sigma == doctest::Approx((2.0 * 0.98 * 0.985 - 0.985 * 0.985) / (0.99 * 0.99)));
        CHECK((*r.gain)[0] == doctest::Approx(-0.985 * 1.1));
        for (double ai : {0.99, 0.98}) CHECK(std::abs(ai * 1.1 + (*r.gain)[0]) < 1.0);
        CHECK(gain_is_sound(m, *r.gain));
    }
    SUBCASE("uncoupled unstable agents") {
        const LimasModel m(scalar_mat(1.5), scalar_mat(0.0), Vector::Ones(1), WeightedGraph(3),
                           WeightedGraph(3, {{0, 1, 1.0 / 3.0}, {0, 2, 1.0 / 3.0}, {1, 2, 13.0 / 30.0}}));
        const auto r = analytic_sufficient_test(m);
        // lambda_c = {3x, x + 2y} = {1, 1.2}; ((1/1 - 1/1.2)/2)^2 = 0.00694 < (1 - sigma_c)/1.44 = 0.3086
        REQUIRE(r.verdict == Verdict::ConsensusableSufficient);
        CHECK(gain_is_sound(m, *r.gain));
    }
    SUBCASE("budget exhausted") {
        const LimasModel m(scalar_mat(3.0), scalar_mat(0.3), Vector::Ones(1), path_graph(3, 1.0),
                           path_graph(3, 1.0));
        const auto r = analytic_sufficient_test(m);
        CHECK(r.verdict == Verdict::NotConcluded);
        CHECK_FALSE(r.sigma.has_value());
    }
    SUBCASE("assumption 3 required") { CHECK(analytic_sufficient_test(dcmg_model()).verdict == Verdict::AssumptionViolation); }
}

TEST_CASE("necessary test") {
    const auto sc = necessary_test(supercap_model());
    REQUIRE(sc.n_flags.has_value());
    CHECK(sc.n_flags->n1);
    CHECK(sc.verdict == Verdict::AssumptionViolation);

    const auto dc = necessary_test(dcmg_model());
    REQUIRE(dc.n_flags.has_value());
    CHECK(dc.n_flags->n1);
    CHECK(dc.verdict == Verdict::NotConcluded);

    const auto g3 = complete_graph(3, 1.0);
    const auto n3 = necessary_test(LimasModel(scalar_mat(3.0), scalar_mat(0.0), Vector::Ones(1), g3, g3));
    CHECK(*n3.gamma_c == doctest::Approx(1.0));
    CHECK(n3.n_flags->n3);
    CHECK_FALSE(n3.n_flags->n1);
    CHECK(n3.verdict == Verdict::NotConcluded);

    const LimasModel bad(scalar_mat(5.0), scalar_mat(0.0), Vector::Ones(1), g3, path_with_eigenratio(10.0));
    const auto nv = necessary_test(bad);
    CHECK(*nv.gamma_c == doctest::Approx(10.0));
    CHECK(nv.verdict == Verdict::NecessaryViolated);

    // |det| inside the band around 1 is flagged and never claimed as a violation
    const auto edge = necessary_test(LimasModel(scalar_mat(1.0), scalar_mat(0.0), Vector::Ones(1), g3, g3));
    CHECK(edge.n_flags->boundary);
    CHECK_FALSE(edge.n_flags->n1);
}

TEST_CASE("design gain") {
    const auto sc = design_gain(supercap_model());
    CHECK(sc.summary.verdict == Verdict::ConsensusableSufficient);
    CHECK(sc.summary.test == TestName::ScalarS1S2);

    const auto dc = design_gain(dcmg_model());
    CHECK(dc.summary.verdict == Verdict::ConsensusableSufficient);
    CHECK(dc.summary.test == TestName::LpSufficient);
    REQUIRE(dc.reports.size() == 2);
    CHECK(dc.reports[0].test == TestName::Necessary);

    const auto bad = design_gain(LimasModel(scalar_mat(5.0), scalar_mat(0.0), Vector::Ones(1), complete_graph(3, 1.0),
                                            path_with_eigenratio(10.0)));
    CHECK(bad.summary.verdict == Verdict::NecessaryViolated);
    CHECK(bad.reports.size() == 1);

    DcmgParams p;
    p.line_resistances = draw_uniform(42, "line_resistances", 8, 4.0, 8.0);
    const auto star = design_gain(build_dcmg(p, dcmg_physical_topology(), star_graph(9, 1.0)));
    CHECK(star.summary.verdict == Verdict::NotConcluded);
    CHECK(exit_code(star.summary.verdict) == 1);

    CHECK(exit_code(Verdict::ConsensusableSufficient) == 0);
    CHECK(exit_code(Verdict::NecessaryViolated) == 2);
    CHECK(exit_code(Verdict::AssumptionViolation) == 3);
    CHECK(parse_test_name("lp") == TestName::LpSufficient);
    CHECK_FALSE(parse_test_name("bogus").has_value());
}

TEST_CASE("property: necessity is never violated when the LP certifies") {
    CounterRng rng(500, "prop-necessity");
    int certified = 0;
    for (int t = 0; t < 500; ++t) {
        const auto m = random_commuting_model(rng);
        const auto lp = lp_sufficient_test(m);
        if (lp.verdict != Verdict::ConsensusableSufficient) continue;
        ++certified;
        CHECK(necessary_test(m).verdict != Verdict::NecessaryViolated);
    }
    CHECK(certified > 100);
}

TEST_CASE("property: every emitted gain is sound") {
    CounterRng rng(321, "prop-gain-sound");
    int gains = 0;
    for (int t = 0; t < 150; ++t) {
        const auto m = random_commuting_model(rng);
        for (const auto& r : design_gain(m, {TestName::ScalarS1S2, TestName::LpSufficient, TestName::AnalyticSufficient}).reports) {
            if (!r.gain) continue;
            ++gains;
            CHECK(r.verdict == Verdict::ConsensusableSufficient);
            CHECK(gain_is_sound(m, *r.gain, 1e-9));
        }
    }
    CHECK(gains > 30);
}
