#pragma once

#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "collabnet/common.hpp"
#include "collabnet/graph.hpp"

namespace collabnet {

enum class Measure { degree, log_degree, pagerank, target_entropy, hide };

inline const char* measure_name(Measure m) {
    switch (m) {
    case Measure::degree: return "degree";
    case Measure::log_degree: return "log_degree";
    case Measure::pagerank: return "pagerank";
    case Measure::target_entropy: return "target_entropy";
    case Measure::hide: return "hide";
    }
    return "?";
}

/// Per-node values for one measure, aligned with snapshot node indices.
/// A disengaged entry means the measure is undefined for that node
/// (log-degree of an isolated student).
struct CentralityScores {
    Measure measure;
    std::vector<std::optional<double>> values;

    double at(int node) const {
        const auto& v = values.at(static_cast<std::size_t>(node));
        if (!v) {
            throw NumericError(std::string(measure_name(measure)) +
                               " undefined for isolated node " + std::to_string(node));
        }
        return *v;
    }
};

struct PagerankOptions {
    double alpha = 0.85;
    double tol = 1e-12; // L1 change between iterations
    int max_iter = 2000;
};

namespace detail {

/// BFS from `src`: hop distances and shortest-path counts. Counts are doubles
/// since they can grow combinatorially; only their ratios are ever used.
inline void bfs_dist_sigma(const Snapshot& g, int src,
                           std::vector<int>& dist, std::vector<double>& sigma) {
    const int n = g.size();
    dist.assign(static_cast<std::size_t>(n), -1);
    sigma.assign(static_cast<std::size_t>(n), 0.0);
    dist[static_cast<std::size_t>(src)] = 0;
    sigma[static_cast<std::size_t>(src)] = 1.0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int w : g.neighbors(u)) {
            auto wi = static_cast<std::size_t>(w);
            if (dist[wi] < 0) {
                dist[wi] = dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(w);
            }
            if (dist[wi] == dist[static_cast<std::size_t>(u)] + 1) {
                sigma[wi] += sigma[static_cast<std::size_t>(u)];
            }
        }
    }
}

/// Connected component label per node, labels in discovery order.
inline std::vector<int> components(const Snapshot& g) {
    const int n = g.size();
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        comp[static_cast<std::size_t>(s)] = next;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int w : g.neighbors(u)) {
                if (comp[static_cast<std::size_t>(w)] < 0) {
                    comp[static_cast<std::size_t>(w)] = next;
                    queue.push_back(w);
                }
            }
        }
        ++next;
    }
    return comp;
}

/// Total random-walk probability of reaching each node from `src` along
/// shortest paths: sum over shortest paths of prod(1/degree) over the path's
/// hop sources. phi[src] = 1; unreachable nodes get 0.
inline std::vector<double> walk_probability_from(const Snapshot& g, int src) {
    const int n = g.size();
    std::vector<int> dist;
    std::vector<double> sigma;
    bfs_dist_sigma(g, src, dist, sigma);

    // Process nodes by increasing distance; predecessors are already final.
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        if (dist[static_cast<std::size_t>(u)] >= 0) order.push_back(u);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        auto da = dist[static_cast<std::size_t>(a)], db = dist[static_cast<std::size_t>(b)];
        return da != db ? da < db : a < b;
    });

    std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
    phi[static_cast<std::size_t>(src)] = 1.0;
    for (int u : order) {
        if (u == src) continue;
        double acc = 0.0;
        for (int p : g.neighbors(u)) {
            if (dist[static_cast<std::size_t>(p)] >= 0 &&
                dist[static_cast<std::size_t>(p)] + 1 == dist[static_cast<std::size_t>(u)]) {
                acc += phi[static_cast<std::size_t>(p)] / static_cast<double>(g.degree(p));
            }
        }
        phi[static_cast<std::size_t>(u)] = acc;
    }
    return phi;
}

} // namespace detail

/// Shortest-path message mass arriving at a focal node, split by delivering
/// neighbor. Masses can be fractional: a source with N shortest paths sends
/// 1/N along each. total is the number of reachable senders.
struct PathMessageTally {
    int focal = -1;
    std::vector<double> neighbor_mass; // aligned with neighbors(focal)
    double total = 0.0;
};

namespace detail {

/// Tally for one node given all-pairs distances and path counts.
inline PathMessageTally tally_from_all_pairs(const Snapshot& g, int focal,
                                             const std::vector<std::vector<int>>& dist,
                                             const std::vector<std::vector<double>>& sigma) {
    PathMessageTally tally;
    tally.focal = focal;
    const auto& nbrs = g.neighbors(focal);
    tally.neighbor_mass.assign(nbrs.size(), 0.0);
    for (int src = 0; src < g.size(); ++src) {
        if (src == focal) continue;
        const auto& d = dist[static_cast<std::size_t>(src)];
        const auto& sig = sigma[static_cast<std::size_t>(src)];
        const int df = d[static_cast<std::size_t>(focal)];
        if (df < 0) continue; // unreachable: no message
        for (std::size_t j = 0; j < nbrs.size(); ++j) {
            const int nb = nbrs[j];
            if (d[static_cast<std::size_t>(nb)] >= 0 && d[static_cast<std::size_t>(nb)] + 1 == df) {
                tally.neighbor_mass[j] += sig[static_cast<std::size_t>(nb)] / sig[static_cast<std::size_t>(focal)];
            }
        }
        tally.total += 1.0;
    }
    return tally;
}

inline void all_pairs_dist_sigma(const Snapshot& g, std::vector<std::vector<int>>& dist,
                                 std::vector<std::vector<double>>& sigma) {
    const int n = g.size();
    dist.resize(static_cast<std::size_t>(n));
    sigma.resize(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        bfs_dist_sigma(g, u, dist[static_cast<std::size_t>(u)], sigma[static_cast<std::size_t>(u)]);
    }
}

} // namespace detail

/// Per-neighbor message tally for one focal node.
inline PathMessageTally path_message_tally(const Snapshot& g, int focal) {
    if (focal < 0 || focal >= g.size()) throw InputError("path message tally: node out of range");
    std::vector<std::vector<int>> dist;
    std::vector<std::vector<double>> sigma;
    detail::all_pairs_dist_sigma(g, dist, sigma);
    return detail::tally_from_all_pairs(g, focal, dist, sigma);
}

inline CentralityScores degree(const Snapshot& g) {
    CentralityScores s{Measure::degree, {}};
    s.values.reserve(static_cast<std::size_t>(g.size()));
    for (int u = 0; u < g.size(); ++u) s.values.emplace_back(static_cast<double>(g.degree(u)));
    return s;
}

/// Natural log of the degree; undefined for isolated nodes, which are
/// excluded from model rows anyway.
inline CentralityScores log_degree(const Snapshot& g) {
    CentralityScores s{Measure::log_degree, {}};
    s.values.reserve(static_cast<std::size_t>(g.size()));
    for (int u = 0; u < g.size(); ++u) {
        if (g.degree(u) >= 1) s.values.emplace_back(std::log(static_cast<double>(g.degree(u))));
        else s.values.emplace_back(std::nullopt);
    }
    return s;
}

/**
 * PageRank by power iteration: the fixed point of
 *     x = alpha * A^T D^-1 x + (1 - alpha) * 1/n.
 *
 * Snapshots are not strongly connected, so the walk matrix is made proper by
 * redistributing the mass of degree-0 nodes uniformly over all nodes. The
 * result is a probability vector (sums to 1) without renormalization.
 */
inline CentralityScores pagerank(const Snapshot& g, const PagerankOptions& opts = {}) {
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) {
        throw InputError("pagerank: alpha must lie in (0, 1)");
    }
    const int n = g.size();
    CentralityScores s{Measure::pagerank, {}};
    if (n == 0) return s;

    const double uniform = 1.0 / static_cast<double>(n);
    std::vector<double> x(static_cast<std::size_t>(n), uniform);
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        double dangling = 0.0;
        for (int u = 0; u < n; ++u) {
            if (g.degree(u) == 0) dangling += x[static_cast<std::size_t>(u)];
        }
        const double base = opts.alpha * dangling * uniform + (1.0 - opts.alpha) * uniform;
        for (int u = 0; u < n; ++u) {
            double acc = 0.0;
            for (int w : g.neighbors(u)) {
                acc += x[static_cast<std::size_t>(w)] / static_cast<double>(g.degree(w));
            }
            next[static_cast<std::size_t>(u)] = opts.alpha * acc + base;
        }
        double diff = 0.0;
        for (int u = 0; u < n; ++u) {
            diff += std::abs(next[static_cast<std::size_t>(u)] - x[static_cast<std::size_t>(u)]);
        }
        x.swap(next);
        if (diff < opts.tol) {
            s.values.assign(x.begin(), x.end());
            return s;
        }
    }
    double residual = 0.0;
    for (int u = 0; u < n; ++u) {
        residual += std::abs(x[static_cast<std::size_t>(u)] - next[static_cast<std::size_t>(u)]);
    }
    throw NumericError("pagerank did not converge after " + std::to_string(opts.max_iter) +
                       " iterations; L1 residual " + std::to_string(residual));
}

/**
 * Target entropy T_i.
 *
 * Every other node in i's component sends one unit of message to i along all
 * shortest paths, split evenly across paths at the source. m_ij tallies the
 * (possibly fractional) mass entering i through neighbor j; with
 * c_ij = m_ij / M_i,
 *     T_i = -sum_j c_ij ln c_ij.
 * Nodes with no senders (isolated, or alone in their component) get T_i = 0.
 */
inline CentralityScores target_entropy(const Snapshot& g) {
    const int n = g.size();
    CentralityScores s{Measure::target_entropy, {}};
    s.values.assign(static_cast<std::size_t>(n), 0.0);

    // All-pairs hop distances and shortest-path counts; O(n^2) memory is fine
    // at cohort scale.
    std::vector<std::vector<int>> dist;
    std::vector<std::vector<double>> sigma;
    detail::all_pairs_dist_sigma(g, dist, sigma);

    for (int i = 0; i < n; ++i) {
        if (g.degree(i) == 0) continue;
        const PathMessageTally tally = detail::tally_from_all_pairs(g, i, dist, sigma);
        if (tally.total <= 0.0) continue;
        double entropy = 0.0;
        for (double m : tally.neighbor_mass) {
            const double c = m / tally.total;
            if (c > 0.0) entropy -= c * std::log(c);
        }
        s.values[static_cast<std::size_t>(i)] = entropy;
    }
    return s;
}

/**
 * Search information S(i, j) in bits: the walk probability of following a
 * shortest path from i to j is prod(1/degree) over the path's hop sources,
 * summed over all shortest i->j paths; S = -log2 of that sum.
 */
inline double search_information(const Snapshot& g, int i, int j) {
    if (i == j) throw InputError("search information requires i != j");
    if (i < 0 || j < 0 || i >= g.size() || j >= g.size()) {
        throw InputError("search information: node index out of range");
    }
    const auto phi = detail::walk_probability_from(g, i);
    const double p = phi[static_cast<std::size_t>(j)];
    if (p <= 0.0) {
        throw InputError("no path from " + g.id_of(i) + " to " + g.id_of(j));
    }
    return -std::log2(p);
}

/**
 * Hide H_i: mean search information needed to find i from the other nodes of
 * its connected component. Nodes alone in their component get H_i = 0.
 */
inline CentralityScores hide(const Snapshot& g) {
    const int n = g.size();
    CentralityScores s{Measure::hide, {}};
    s.values.assign(static_cast<std::size_t>(n), 0.0);
    if (n == 0) return s;

    const auto comp = detail::components(g);
    std::vector<int> comp_size(static_cast<std::size_t>(n), 0);
    for (int u = 0; u < n; ++u) comp_size[static_cast<std::size_t>(comp[static_cast<std::size_t>(u)])]++;

    std::vector<double> sum_bits(static_cast<std::size_t>(n), 0.0);
    for (int src = 0; src < n; ++src) {
        if (g.degree(src) == 0) continue;
        const auto phi = detail::walk_probability_from(g, src);
        for (int t = 0; t < n; ++t) {
            if (t == src) continue;
            const double p = phi[static_cast<std::size_t>(t)];
            if (p > 0.0) sum_bits[static_cast<std::size_t>(t)] += -std::log2(p);
        }
    }
    for (int i = 0; i < n; ++i) {
        const int size = comp_size[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])];
        if (size > 1) {
            s.values[static_cast<std::size_t>(i)] = sum_bits[static_cast<std::size_t>(i)] /
                                                    static_cast<double>(size - 1);
        }
    }
    return s;
}

} // namespace collabnet
