#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "collabnet/community.hpp"
#include "oracles.hpp"

using namespace collabnet;
using oracle::make_snapshot;

namespace {

Snapshot two_cliques(int size) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < size; ++i)
        for (int j = i + 1; j < size; ++j) edges.emplace_back(i, j);
    for (int i = 0; i < size; ++i)
        for (int j = i + 1; j < size; ++j) edges.emplace_back(size + i, size + j);
    edges.emplace_back(0, size); // bridge
    return make_snapshot(2 * size, std::move(edges));
}

double recompute_codelength(const Partition& p) {
    double L = p.switch_rate * p.index_entropy;
    for (std::size_t c = 0; c < p.module_weight.size(); ++c) {
        L += p.module_weight[c] * p.module_entropy[c];
    }
    return L;
}

} // namespace

TEST_SUITE("community") {

TEST_CASE("personalized pagerank of an isolated focal node is exactly the indicator") {
    const Snapshot g = make_snapshot(4, {{1, 2}});
    const PprVector ppr = personalized_pagerank(g, 0);
    CHECK(ppr.weights[0] == 1.0);
    CHECK(ppr.weights[1] == 0.0);
    CHECK(ppr.weights[2] == 0.0);
    CHECK(ppr.weights[3] == 0.0);
}

TEST_CASE("personalized pagerank on a single edge matches the closed form") {
    const double alpha = 0.85;
    const Snapshot g = make_snapshot(2, {{0, 1}});
    const PprVector ppr = personalized_pagerank(g, 1, {alpha, 1e-13, 5000});
    CHECK(ppr.weights[1] == doctest::Approx(1.0 / (1.0 + alpha)).epsilon(1e-9));
    CHECK(ppr.weights[0] == doctest::Approx(alpha / (1.0 + alpha)).epsilon(1e-9));
}

TEST_CASE("personalized pagerank matches the dense linear solve") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4 + static_cast<int>(rng.below(17));
        const Snapshot g = oracle::random_gnp(rng, n, 0.25);
        for (int rep = 0; rep < 3; ++rep) {
            const int focal = static_cast<int>(rng.below(n));
            const PprVector ppr = personalized_pagerank(g, focal);
            const Eigen::VectorXd exact = oracle::ppr_dense(g, focal, 0.85);
            double sum = 0.0;
            for (int u = 0; u < n; ++u) {
                CHECK(std::abs(ppr.weights[static_cast<std::size_t>(u)] - exact(u)) < 1e-8);
                CHECK(ppr.weights[static_cast<std::size_t>(u)] >= 0.0);
                sum += ppr.weights[static_cast<std::size_t>(u)];
            }
            CHECK(std::abs(sum - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("personalized pagerank keeps at least the teleport mass on the focal node") {
    // "Focal entry is the maximum" does not hold in general: on a star with
    // the focal on a leaf, the hub ends up with alpha/(1+alpha) while the
    // focal keeps only about (1-alpha) plus a quarter of the hub's outflow.
    // It is therefore a report-only diagnostic; the guaranteed bound is
    // weights[focal] >= 1 - alpha.
    const Snapshot star = make_snapshot(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    const PprVector leaf = personalized_pagerank(star, 1);
    CHECK(leaf.weights[0] > leaf.weights[1]); // the counterexample

    Rng rng(32);
    int focal_max_violations = 0, checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4 + static_cast<int>(rng.below(12));
        const Snapshot g = oracle::random_gnp(rng, n, 0.3);
        for (int focal = 0; focal < n; ++focal) {
            if (g.degree(focal) == 0) continue;
            const PprVector ppr = personalized_pagerank(g, focal);
            const double fw = ppr.weights[static_cast<std::size_t>(focal)];
            CHECK(fw >= (1.0 - ppr.alpha) - 1e-12);
            ++checked;
            for (int u = 0; u < n; ++u) {
                if (fw < ppr.weights[static_cast<std::size_t>(u)] - 1e-12) {
                    ++focal_max_violations;
                    break;
                }
            }
        }
    }
    MESSAGE("focal-is-maximum diagnostic: ", focal_max_violations, " of ", checked,
            " focal nodes had a heavier peer");
}

TEST_CASE("personalized pagerank validates inputs") {
    const Snapshot g = make_snapshot(2, {{0, 1}});
    CHECK_THROWS_AS(personalized_pagerank(g, 0, {0.0, 1e-12, 100}), InputError);
    CHECK_THROWS_AS(personalized_pagerank(g, 5), InputError);
    CHECK_THROWS_WITH_AS(personalized_pagerank(g, 0, {0.85, 1e-16, 1}),
                         doctest::Contains("residual"), NumericError);
}

TEST_CASE("map equation of the 4-cycle in one module is exactly 2 bits") {
    const Snapshot g = make_snapshot(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    const Partition p = map_equation(g, {0, 0, 0, 0});
    CHECK(p.codelength == 2.0);
    CHECK(p.switch_rate == 0.0);
    CHECK(p.num_communities == 1);
}

TEST_CASE("map equation terms recompose to the stored codelength") {
    Rng rng(33);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(8));
        const Snapshot g = oracle::random_gnp(rng, n, 0.4);
        std::vector<int> labels(static_cast<std::size_t>(n));
        const int groups = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        for (auto& l : labels) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(groups)));
        const Partition p = map_equation(g, labels);
        CHECK(std::abs(p.codelength - recompute_codelength(p)) < 1e-10);
        // relabeling invariance: reverse the label alphabet
        std::vector<int> relabeled = labels;
        for (auto& l : relabeled) l = groups - l;
        const Partition q = map_equation(g, relabeled);
        CHECK(q.codelength == doctest::Approx(p.codelength).epsilon(1e-12));
        CHECK(q.labels == p.labels); // canonical form ignores label names
    }
}

TEST_CASE("map equation is permutation equivariant") {
    Rng rng(34);
    const int n = 9;
    const Snapshot g = oracle::random_gnp(rng, n, 0.35);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = static_cast<int>(rng.below(3));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<std::pair<int, int>> mapped;
    for (auto [u, v] : g.edges()) {
        mapped.emplace_back(std::min(perm[u], perm[v]), std::max(perm[u], perm[v]));
    }
    const Snapshot h = make_snapshot(n, std::move(mapped));
    std::vector<int> mapped_labels(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) mapped_labels[static_cast<std::size_t>(perm[u])] = labels[static_cast<std::size_t>(u)];
    CHECK(map_equation(h, mapped_labels).codelength ==
          doctest::Approx(map_equation(g, labels).codelength).epsilon(1e-12));
}

TEST_CASE("map equation rejects an empty assignment") {
    const Snapshot g = make_snapshot(3, {{0, 1}});
    CHECK_THROWS_AS(map_equation(g, {}), InputError);
}

TEST_CASE("planted split of two bridged triangles beats the baselines") {
    const Snapshot g = make_snapshot(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {0, 3}});
    const double planted = map_equation(g, {0, 0, 0, 1, 1, 1}).codelength;
    const double one_module = map_equation(g, {0, 0, 0, 0, 0, 0}).codelength;
    const double singletons = map_equation(g, {0, 1, 2, 3, 4, 5}).codelength;
    CHECK(planted < one_module);
    CHECK(planted < singletons);
    // and it is the exhaustive optimum
    CHECK(exhaustive_partition_search(g).codelength == doctest::Approx(planted).epsilon(1e-12));
}

TEST_CASE("singleton partition never beats one module on a clique") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) edges.emplace_back(i, j);
    const Snapshot g = make_snapshot(5, std::move(edges));
    CHECK(map_equation(g, {0, 1, 2, 3, 4}).codelength >=
          map_equation(g, {0, 0, 0, 0, 0}).codelength);
}

TEST_CASE("infomap splits two bridged 5-cliques into the planted communities") {
    const Snapshot g = two_cliques(5);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Partition p = infomap(g, {10, seed});
        REQUIRE(p.num_communities == 2);
        for (int u = 1; u < 5; ++u) CHECK(p.labels[static_cast<std::size_t>(u)] == p.labels[0]);
        for (int u = 6; u < 10; ++u) CHECK(p.labels[static_cast<std::size_t>(u)] == p.labels[5]);
        CHECK(p.labels[0] != p.labels[5]);
    }
}

TEST_CASE("infomap on an edgeless graph returns singletons with zero codelength") {
    const Partition p = infomap(make_snapshot(4, {}), {4, 9});
    CHECK(p.num_communities == 4);
    CHECK(p.codelength == 0.0);
    const std::set<int> labels(p.labels.begin(), p.labels.end());
    CHECK(labels.size() == 4);
}

TEST_CASE("infomap matches the exhaustive minimum on small random graphs") {
    Rng rng(35);
    int hits = 0;
    const int trials = 25;
    for (int trial = 0; trial < trials; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(5));
        const Snapshot g = oracle::random_gnp(rng, n, 0.45);
        const Partition greedy = infomap(g, {10, 1000 + static_cast<std::uint64_t>(trial)});
        const Partition exact = exhaustive_partition_search(g);
        CHECK(greedy.codelength >= exact.codelength - 1e-9); // never below the optimum
        if (greedy.codelength <= exact.codelength + 1e-9) ++hits;
    }
    CHECK(hits >= trials * 9 / 10);
}

TEST_CASE("infomap never exceeds the trivial baselines") {
    Rng rng(36);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(8));
        const Snapshot g = oracle::random_gnp(rng, n, 0.3);
        const Partition p = infomap(g, {4, static_cast<std::uint64_t>(trial)});
        const double one_module = map_equation(g, detail::one_module_labels(g)).codelength;
        const double singletons = map_equation(g, detail::singleton_labels(n)).codelength;
        CHECK(p.codelength <= one_module + 1e-12);
        CHECK(p.codelength <= singletons + 1e-12);
    }
}

TEST_CASE("greedy accepted moves are monotone in codelength") {
    // One restart per run: every restart starts over from singletons, so the
    // monotone property holds within a single greedy descent.
    Rng rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + static_cast<int>(rng.below(6));
        const Snapshot g = oracle::random_gnp(rng, n, 0.4);
        std::vector<double> trace;
        infomap(g, {1, static_cast<std::uint64_t>(trial)}, &trace);
        for (std::size_t i = 1; i < trace.size(); ++i) {
            CHECK(trace[i] <= trace[i - 1] + 1e-9);
        }
    }
}

TEST_CASE("infomap is deterministic given seed and restarts") {
    Rng rng(38);
    const Snapshot g = oracle::random_gnp(rng, 15, 0.25);
    const Partition a = infomap(g, {6, 77});
    const Partition b = infomap(g, {6, 77});
    CHECK(a.labels == b.labels);
    CHECK(a.codelength == b.codelength);
}

TEST_CASE("exhaustive search on hand-checked graphs") {
    const Partition tri = exhaustive_partition_search(make_snapshot(3, {{0, 1}, {0, 2}, {1, 2}}));
    CHECK(tri.num_communities == 1); // among all 5 partitions

    const Partition pairs = exhaustive_partition_search(make_snapshot(4, {{0, 1}, {2, 3}}));
    CHECK(pairs.num_communities == 2); // among all 15 partitions
    CHECK(pairs.labels[0] == pairs.labels[1]);
    CHECK(pairs.labels[2] == pairs.labels[3]);

    const Partition single = exhaustive_partition_search(make_snapshot(1, {}));
    CHECK(single.codelength == 0.0);
    CHECK(single.num_communities == 1);

    CHECK_THROWS_AS(exhaustive_partition_search(oracle::make_snapshot(11, {})), InputError);
}

TEST_CASE("infomap restarts must be positive") {
    CHECK_THROWS_AS(infomap(make_snapshot(2, {{0, 1}}), {0, 7}), InputError);
}

} // TEST_SUITE
