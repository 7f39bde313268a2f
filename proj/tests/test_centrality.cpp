#include <doctest.h>

#include <cmath>
#include <numeric>

#include "collabnet/centrality.hpp"
#include "oracles.hpp"

using namespace collabnet;
using oracle::make_snapshot;

namespace {

// Two hubs of equal degree: hub 0's neighbors all connect onward to node 8,
// hub 4's neighbors are mostly leaves, so messages reach 4 through a single
// gateway. Node 7 has degree 2.
Snapshot two_hubs() {
    return make_snapshot(9, {{0, 1}, {0, 2}, {0, 3}, {1, 8}, {2, 8}, {3, 8},
                             {4, 5}, {4, 6}, {4, 7}, {7, 8}});
}

Snapshot path3() { return make_snapshot(3, {{0, 1}, {1, 2}}); } // u - v - w

Snapshot cycle(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(std::min(i, (i + 1) % n), std::max(i, (i + 1) % n));
    std::sort(edges.begin(), edges.end());
    return make_snapshot(n, std::move(edges));
}

Snapshot complete(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return make_snapshot(n, std::move(edges));
}

} // namespace

TEST_SUITE("centrality") {

TEST_CASE("degree counts neighbors") {
    const Snapshot g = two_hubs();
    const CentralityScores d = degree(g);
    CHECK(d.at(0) == 3.0);
    CHECK(d.at(4) == 3.0);
    CHECK(d.at(7) == 2.0);

    const CentralityScores iso = degree(make_snapshot(2, {}));
    CHECK(iso.at(0) == 0.0);

    const CentralityScores k5 = degree(complete(5));
    for (int u = 0; u < 5; ++u) CHECK(k5.at(u) == 4.0);
}

TEST_CASE("log_degree is the natural log, undefined for isolated nodes") {
    const Snapshot g = make_snapshot(4, {{0, 1}, {1, 2}});
    const CentralityScores ld = log_degree(g);
    CHECK(ld.at(0) == 0.0);                                    // degree 1
    CHECK(ld.at(1) == doctest::Approx(0.6931471805599453).epsilon(1e-12)); // ln 2
    CHECK_FALSE(ld.values[3].has_value());
    CHECK_THROWS_WITH_AS(ld.at(3), doctest::Contains("undefined for isolated node"), NumericError);
}

TEST_CASE("pagerank is uniform on cycles and on edgeless graphs") {
    for (int n : {3, 5, 8}) {
        const CentralityScores pr = pagerank(cycle(n));
        for (int u = 0; u < n; ++u) CHECK(pr.at(u) == doctest::Approx(1.0 / n).epsilon(1e-10));
    }
    const CentralityScores two = pagerank(make_snapshot(2, {}), {0.85, 1e-12, 2000});
    CHECK(two.at(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(two.at(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pagerank matches the dense linear solve on random graphs") {
    Rng rng(11);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 5 + static_cast<int>(rng.below(21));
        const Snapshot g = oracle::random_gnp(rng, n, 0.2);
        const CentralityScores pr = pagerank(g);
        const Eigen::VectorXd exact = oracle::pagerank_dense(g, 0.85);
        double sum = 0.0;
        for (int u = 0; u < n; ++u) {
            CHECK(std::abs(pr.at(u) - exact(u)) < 1e-8);
            CHECK(pr.at(u) >= 0.0);
            sum += pr.at(u);
        }
        CHECK(std::abs(sum - 1.0) < 1e-10);
    }
}

TEST_CASE("pagerank is equivariant under node relabeling") {
    Rng rng(12);
    const int n = 12;
    const Snapshot g = oracle::random_gnp(rng, n, 0.3);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<std::pair<int, int>> mapped;
    for (auto [u, v] : g.edges()) {
        mapped.emplace_back(std::min(perm[u], perm[v]), std::max(perm[u], perm[v]));
    }
    const Snapshot h = make_snapshot(n, std::move(mapped));
    const CentralityScores pg = pagerank(g);
    const CentralityScores ph = pagerank(h);
    for (int u = 0; u < n; ++u) {
        CHECK(pg.at(u) == doctest::Approx(ph.at(perm[u])).epsilon(1e-9));
    }
}

TEST_CASE("pagerank validates alpha and reports non-convergence") {
    const Snapshot g = path3();
    CHECK_THROWS_AS(pagerank(g, {1.5, 1e-12, 100}), InputError);
    CHECK_THROWS_WITH_AS(pagerank(g, {0.85, 1e-16, 2}), doctest::Contains("residual"),
                         NumericError);
}

TEST_CASE("target entropy on hand-checked graphs") {
    const Snapshot p = path3();
    const CentralityScores te = target_entropy(p);
    CHECK(te.at(1) == doctest::Approx(std::log(2.0)).epsilon(1e-12)); // middle: two sources
    CHECK(te.at(0) == doctest::Approx(0.0));                          // everything via the middle

    std::vector<std::pair<int, int>> star = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    const CentralityScores ts = target_entropy(make_snapshot(5, star));
    CHECK(ts.at(0) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(ts.at(1) == doctest::Approx(0.0));

    const CentralityScores iso = target_entropy(make_snapshot(1, {}));
    CHECK(iso.at(0) == 0.0);
}

TEST_CASE("equal degree does not mean equal target entropy") {
    const Snapshot g = two_hubs();
    const CentralityScores te = target_entropy(g);
    CHECK(degree(g).at(0) == degree(g).at(4));
    CHECK(te.at(0) > te.at(4)); // interconnected neighbors beat leaf neighbors
}

TEST_CASE("path message tally conserves mass and splits fractionally") {
    // 4-cycle, focal 0: sources 1 and 3 deliver directly; source 2 splits
    // its unit between the two shortest paths.
    const Snapshot square = cycle(4);
    const PathMessageTally tally = path_message_tally(square, 0);
    REQUIRE(tally.neighbor_mass.size() == 2);
    CHECK(tally.total == doctest::Approx(3.0));
    CHECK(tally.neighbor_mass[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(tally.neighbor_mass[1] == doctest::Approx(1.5).epsilon(1e-12));

    Rng rng(25);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(7));
        const Snapshot g = oracle::random_gnp(rng, n, 0.35);
        for (int u = 0; u < n; ++u) {
            const PathMessageTally t = path_message_tally(g, u);
            double sum = 0.0;
            for (double m : t.neighbor_mass) {
                CHECK(m >= 0.0);
                sum += m;
            }
            CHECK(sum == doctest::Approx(t.total).epsilon(1e-12)); // every message arrives
        }
    }
}

TEST_CASE("target entropy matches the path-enumeration oracle") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(7));
        const Snapshot g = oracle::random_gnp(rng, n, 0.35);
        const CentralityScores te = target_entropy(g);
        const CentralityScores d = degree(g);
        for (int u = 0; u < n; ++u) {
            CHECK(te.at(u) == doctest::Approx(oracle::target_entropy(g, u)).epsilon(1e-9));
            CHECK(te.at(u) >= -1e-12);
            if (d.at(u) >= 1.0) {
                CHECK(te.at(u) <= std::log(d.at(u)) + 1e-9);
                if (d.at(u) == 1.0) CHECK(te.at(u) == doctest::Approx(0.0));
            }
        }
    }
}

TEST_CASE("search information on hand-checked graphs") {
    const Snapshot tri = complete(3);
    CHECK(search_information(tri, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));

    const Snapshot p = path3();
    CHECK(search_information(p, 0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(search_information(p, 0, 1) == doctest::Approx(0.0)); // forced walk

    const Snapshot square = cycle(4);
    CHECK(search_information(square, 0, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("search information errors") {
    const Snapshot g = make_snapshot(3, {{0, 1}});
    CHECK_THROWS_WITH_AS(search_information(g, 0, 2), doctest::Contains("no path"), InputError);
    CHECK_THROWS_AS(search_information(g, 1, 1), InputError);
}

TEST_CASE("search information matches the path-enumeration oracle") {
    Rng rng(22);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(7));
        const Snapshot g = oracle::random_gnp(rng, n, 0.4);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const auto expected = oracle::search_information(g, i, j);
                if (!expected) {
                    CHECK_THROWS_AS(search_information(g, i, j), InputError);
                } else {
                    const double s = search_information(g, i, j);
                    CHECK(s == doctest::Approx(*expected).epsilon(1e-9));
                    CHECK(s >= -1e-12);
                }
            }
        }
    }
}

TEST_CASE("hide on hand-checked graphs") {
    const Snapshot tri = complete(3);
    const CentralityScores h = hide(tri);
    for (int u = 0; u < 3; ++u) CHECK(h.at(u) == doctest::Approx(1.0).epsilon(1e-12));

    const CentralityScores hp = hide(path3());
    CHECK(hp.at(1) == doctest::Approx(0.0));
    CHECK(hp.at(0) == doctest::Approx(1.0).epsilon(1e-12));

    const CentralityScores iso = hide(make_snapshot(3, {{0, 1}}));
    CHECK(iso.at(2) == 0.0); // alone in its component
}

TEST_CASE("hide matches the exhaustive oracle and ignores other components") {
    Rng rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(7));
        const Snapshot g = oracle::random_gnp(rng, n, 0.3);
        const CentralityScores h = hide(g);
        for (int u = 0; u < n; ++u) {
            CHECK(h.at(u) == doctest::Approx(oracle::hide(g, u)).epsilon(1e-9));
        }
    }
}

TEST_CASE("measures are independent of edge input order") {
    Rng rng(24);
    const Snapshot g = oracle::random_gnp(rng, 10, 0.4);
    auto edges = g.edges();
    rng.shuffle(edges);
    const Snapshot h = make_snapshot(10, std::move(edges));
    const CentralityScores a = target_entropy(g);
    const CentralityScores b = target_entropy(h);
    const CentralityScores pa = pagerank(g);
    const CentralityScores pb = pagerank(h);
    for (int u = 0; u < 10; ++u) {
        CHECK(a.at(u) == b.at(u));   // bitwise: same sorted adjacency
        CHECK(pa.at(u) == pb.at(u));
    }
}

} // TEST_SUITE
