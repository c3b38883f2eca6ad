#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "limas/error.hpp"
#include "limas/graph.hpp"
#include "limas/random.hpp"

using namespace limas;

namespace {

WeightedGraph random_graph(CounterRng& rng, std::size_t n, double density) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < density) edges.push_back({i, j, rng.uniform(0.1, 2.0)});
    return WeightedGraph(n, edges);
}

}  // namespace

TEST_CASE("graph construction validates edges") {
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 0, 1.0}}), Error);
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 3, 1.0}}), Error);
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, 0.0}}), Error);
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, -1.0}}), Error);
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, 1.0}, {1, 0, 2.0}}), Error);
    try {
        WeightedGraph(2, {{0, 0, 1.0}});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidGraph);
    }
}

TEST_CASE("laplacian examples") {
    Matrix two(2, 2);
    two << 1, -1, -1, 1;
    CHECK(max_abs(laplacian(WeightedGraph(2, {{0, 1, 1.0}})) - two) == 0.0);

    Matrix path(3, 3);
    path << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK(max_abs(laplacian(path_graph(3, 1.0)) - path) == 0.0);

    const Matrix k9 = laplacian(complete_graph(9, 1.0 / 9.0));
    const Matrix expected = Matrix::Identity(9, 9) - Matrix::Constant(9, 9, 1.0 / 9.0);
    CHECK(max_abs(k9 - expected) < 1e-15);
}

TEST_CASE("connectivity") {
    CHECK(is_connected(path_graph(3, 1.0)));
    CHECK_FALSE(is_connected(WeightedGraph(4, {{0, 1, 1.0}, {2, 3, 1.0}})));
    const WeightedGraph clusters(9, {{0, 2, 1}, {1, 2, 1}, {3, 6, 1}, {4, 5, 1}, {5, 6, 1}, {7, 8, 1}});
    CHECK_FALSE(is_connected(clusters));
    CHECK(is_connected(star_graph(5, 1.0)));
    CHECK(is_connected(circle_graph(5, 1.0)));
}

TEST_CASE("spectrum examples") {
    const auto kn = spectrum(laplacian(complete_graph(6, 1.0)));
    for (Eigen::Index i = 1; i < 6; ++i) CHECK(kn.eigenvalues[i] == doctest::Approx(6.0));
    CHECK(kn.eigenratio == doctest::Approx(1.0));
    CHECK(kn.delta == doctest::Approx(0.0).epsilon(1e-12));

    const auto k9 = spectrum(Matrix::Identity(9, 9) - Matrix::Constant(9, 9, 1.0 / 9.0));
    CHECK(k9.lambda_min() == doctest::Approx(1.0));
    CHECK(k9.eigenratio == doctest::Approx(1.0));

    // det(zI - L) = z (z - 1)(z - 3) for the unit path on three nodes
    const auto p = spectrum(laplacian(path_graph(3, 1.0)));
    CHECK(std::abs(p.eigenvalues[0]) < 1e-12);
    CHECK(p.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(p.eigenvalues[2] == doctest::Approx(3.0));
    CHECK(p.eigenratio == doctest::Approx(3.0));
    CHECK(p.delta == doctest::Approx(2.0));

    const auto disc = spectrum(laplacian(WeightedGraph(4, {{0, 1, 1.0}, {2, 3, 1.0}})));
    CHECK(std::isinf(disc.eigenratio));

    Matrix bad(2, 2);
    bad << 1, 0, 0, 1;
    CHECK_THROWS_AS(spectrum(bad), Error);
}

TEST_CASE("commute check") {
    const Matrix lc = laplacian(path_graph(4, 1.0));
    CHECK(commute_check(2.0 * lc, lc));
    const Matrix lp = laplacian(WeightedGraph(4, {{0, 1, 0.3}, {2, 3, 1.7}}));
    CHECK(commute_check(lp, laplacian(complete_graph(4, 0.25))));

    // path 1-2-3 against path 2-1-3
    const Matrix a = laplacian(path_graph(3, 1.0));
    const Matrix b = laplacian(WeightedGraph(3, {{1, 0, 1.0}, {0, 2, 1.0}}));
    const Matrix ab = a * b, ba = b * a;
    CHECK(max_abs(ab - ba) > 0.5);
    CHECK_FALSE(commute_check(a, b));

    CHECK_THROWS_AS(commute_check(Matrix::Zero(2, 2), Matrix::Zero(3, 3), 1e-8), Error);
}

namespace {

void check_modal(const Matrix& lp, const Matrix& lc, const ModalDecomposition& md) {
    const auto n = lp.rows();
    REQUIRE(md.phi.rows() == n);
    REQUIRE(md.pairs.size() == static_cast<std::size_t>(n - 1));
    CHECK(max_abs(md.phi.transpose() * md.phi - Matrix::Identity(n, n)) <= 1e-8);
    for (Eigen::Index r = 0; r < n; ++r) CHECK(md.phi(r, 0) == doctest::Approx(1.0 / std::sqrt(double(n))));
    const Matrix dp = md.phi.transpose() * lp * md.phi;
    const Matrix dc = md.phi.transpose() * lc * md.phi;
    Matrix off_p = dp, off_c = dc;
    off_p.diagonal().setZero();
    off_c.diagonal().setZero();
    CHECK(max_abs(off_p) <= 1e-7 * std::max(1.0, max_abs(lp)));
    CHECK(max_abs(off_c) <= 1e-7 * std::max(1.0, max_abs(lc)));
    for (Eigen::Index k = 1; k < n; ++k) {
        const auto& pr = md.pairs[static_cast<std::size_t>(k - 1)];
        const Vector phi = md.phi.col(k);
        CHECK((lp * phi - pr.lambda_p * phi).norm() <= 1e-6);
        CHECK((lc * phi - pr.lambda_c * phi).norm() <= 1e-6);
        CHECK(pr.lambda_c > 0.0);
    }
}

}  // namespace

TEST_CASE("modal decomposition examples") {
    const Matrix lc = laplacian(path_graph(5, 1.0));
    const auto sc = spectrum(lc);

    SUBCASE("no physical coupling") {
        const Matrix lp = Matrix::Zero(5, 5);
        const auto md = modal_decomposition(lp, lc);
        check_modal(lp, lc, md);
        std::vector<double> lcs;
        for (const auto& p : md.pairs) {
            CHECK(std::abs(p.lambda_p) < 1e-12);
            lcs.push_back(p.lambda_c);
        }
        std::sort(lcs.begin(), lcs.end());
        for (std::size_t i = 0; i < lcs.size(); ++i)
            CHECK(lcs[i] == doctest::Approx(sc.eigenvalues[static_cast<Eigen::Index>(i + 1)]));
    }
    SUBCASE("proportional") {
        const Matrix lp = 2.0 * lc;
        const auto md = modal_decomposition(lp, lc);
        check_modal(lp, lc, md);
        for (const auto& p : md.pairs) CHECK(p.lambda_p == doctest::Approx(2.0 * p.lambda_c));
    }
    SUBCASE("complete cyber graph, arbitrary physical") {
        const Matrix lp = laplacian(WeightedGraph(5, {{0, 1, 0.4}, {1, 2, 1.3}, {3, 4, 0.8}}));
        const Matrix lk = laplacian(complete_graph(5, 0.2));
        const auto md = modal_decomposition(lp, lk);
        check_modal(lp, lk, md);
        const auto sp = spectrum(lp);
        std::vector<double> lps;
        for (const auto& p : md.pairs) {
            CHECK(p.lambda_c == doctest::Approx(1.0));
            lps.push_back(p.lambda_p);
        }
        std::sort(lps.begin(), lps.end());
        for (std::size_t i = 0; i < lps.size(); ++i)
            CHECK(lps[i] == doctest::Approx(sp.eigenvalues[static_cast<Eigen::Index>(i + 1)]).epsilon(1e-9));
    }
    SUBCASE("errors") {
        const Matrix a = laplacian(path_graph(3, 1.0));
        const Matrix b = laplacian(WeightedGraph(3, {{1, 0, 1.0}, {0, 2, 1.0}}));
        try {
            modal_decomposition(a, b);
            FAIL("expected NotCommuting");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotCommuting);
        }
        const Matrix disc = laplacian(WeightedGraph(4, {{0, 1, 1.0}, {2, 3, 1.0}}));
        try {
            modal_decomposition(Matrix::Zero(4, 4), disc);
            FAIL("expected CyberGraphDisconnected");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::CyberGraphDisconnected);
        }
    }
}

TEST_CASE("property: laplacians of random graphs") {
    CounterRng rng(7, "prop-laplacian");
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(2 + rng.below(9));
        const Matrix L = laplacian(random_graph(rng, n, 0.5));
        CHECK(max_abs(L - L.transpose()) == 0.0);
        CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
        const auto s = spectrum(L);
        CHECK(std::abs(s.eigenvalues[0]) <= 1e-8);
    }
}

TEST_CASE("property: modal decomposition of commuting pairs") {
    CounterRng rng(11, "prop-modal");
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = static_cast<std::size_t>(3 + rng.below(7));
        WeightedGraph gc = random_graph(rng, n, 0.6);
        if (!is_connected(gc)) gc = path_graph(n, 1.0);
        const Matrix lc = laplacian(gc);
        Matrix lp;
        switch (trial % 3) {
            case 0: lp = rng.uniform(0.1, 3.0) * lc; break;
            case 1: lp = laplacian(random_graph(rng, n, 0.4)); break;
            default: lp = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        }
        const Matrix lc_used = trial % 3 == 1 ? laplacian(complete_graph(n, rng.uniform(0.1, 1.0))) : lc;
        check_modal(lp, lc_used, modal_decomposition(lp, lc_used));
    }
}

TEST_CASE("eigenratio is not monotone under edge addition in general") {
    // 5-cycle 0-2-1-3-4-0: eigenvalues 2 - 2cos(2 pi k / 5)
    const WeightedGraph cycle(5, {{0, 2, 1}, {0, 4, 1}, {1, 2, 1}, {1, 3, 1}, {3, 4, 1}});
    const double before = spectrum(laplacian(cycle)).eigenratio;
    CHECK(before == doctest::Approx((2.0 + 2.0 * std::cos(std::numbers::pi / 5.0)) / (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / 5.0))));
    auto edges = cycle.edges();
    edges.push_back({1, 4, 1.0});
    const double after = spectrum(laplacian(WeightedGraph(5, edges))).eigenratio;
    CHECK(after > before + 0.5);
}

TEST_CASE("property: some edge addition never increases the eigenratio") {
    CounterRng rng(3, "prop-eigenratio");
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = static_cast<std::size_t>(3 + rng.below(6));
        const auto g = random_graph(rng, n, 0.5);
        if (!is_connected(g)) continue;
        const double before = spectrum(laplacian(g)).eigenratio;
        bool missing_any = false;
        bool decreased = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                bool present = false;
                for (const auto& e : g.edges()) present |= (e.i == i && e.j == j);
                if (present) continue;
                missing_any = true;
                for (double w : {0.01, 0.1, 0.5, 1.0, 2.0}) {
                    auto edges = g.edges();
                    edges.push_back({i, j, w});
                    decreased |= spectrum(laplacian(WeightedGraph(n, edges))).eigenratio <= before * (1.0 + 1e-12);
                }
            }
        if (!missing_any) continue;
        CHECK(decreased);
        ++checked;
    }
    CHECK(checked > 50);
}
