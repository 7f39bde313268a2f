#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "collabnet/common.hpp"
#include "collabnet/graph.hpp"

namespace collabnet {

/// Personalized PageRank distribution for one focal node: the fixed point of
///     x = alpha * A^T D^-1 x + (1 - alpha) * 1_focal.
struct PprVector {
    int focal = -1;
    double alpha = 0.0;
    std::vector<double> weights; // probability per node index, sums to 1
};

struct PprOptions {
    double alpha = 0.85;
    double tol = 1e-12; // L1 change between iterations
    int max_iter = 2000;
};

/**
 * Power iteration for the personalized PageRank vector of `focal`.
 *
 * Mass at degree-0 nodes teleports back to the focal node, which keeps the
 * operator stochastic on disconnected snapshots. An isolated focal node
 * returns its indicator vector exactly.
 */
inline PprVector personalized_pagerank(const Snapshot& g, int focal, const PprOptions& opts = {}) {
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) {
        throw InputError("personalized pagerank: alpha must lie in (0, 1)");
    }
    const int n = g.size();
    if (focal < 0 || focal >= n) throw InputError("personalized pagerank: focal node out of range");

    PprVector result;
    result.focal = focal;
    result.alpha = opts.alpha;
    result.weights.assign(static_cast<std::size_t>(n), 0.0);
    if (g.degree(focal) == 0) {
        result.weights[static_cast<std::size_t>(focal)] = 1.0;
        return result;
    }

    std::vector<double> x(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        double dangling = 0.0;
        for (int u = 0; u < n; ++u) {
            if (g.degree(u) == 0) dangling += x[static_cast<std::size_t>(u)];
        }
        for (int u = 0; u < n; ++u) {
            double acc = 0.0;
            for (int w : g.neighbors(u)) {
                acc += x[static_cast<std::size_t>(w)] / static_cast<double>(g.degree(w));
            }
            next[static_cast<std::size_t>(u)] = opts.alpha * acc;
        }
        next[static_cast<std::size_t>(focal)] += opts.alpha * dangling + (1.0 - opts.alpha);
        double diff = 0.0;
        for (int u = 0; u < n; ++u) {
            diff += std::abs(next[static_cast<std::size_t>(u)] - x[static_cast<std::size_t>(u)]);
        }
        x.swap(next);
        if (diff < opts.tol) {
            result.weights.assign(x.begin(), x.end());
            return result;
        }
    }
    double residual = 0.0;
    for (int u = 0; u < n; ++u) {
        residual += std::abs(x[static_cast<std::size_t>(u)] - next[static_cast<std::size_t>(u)]);
    }
    throw NumericError("personalized pagerank did not converge after " +
                       std::to_string(opts.max_iter) + " iterations; L1 residual " +
                       std::to_string(residual));
}

/**
 * A hard partition of the nodes together with its two-level map-equation
 * terms. Description lengths are in bits:
 *     L = q H(Q) + sum_i p^i H(P^i)
 * with q the total module-switch rate, H(Q) the index-codebook entropy, p^i
 * the usage rate of module i's codebook (internal visits plus exits) and
 * H(P^i) its entropy.
 */
struct Partition {
    std::vector<int> labels; // node index -> community, compact 0..m-1
    int num_communities = 0;
    double switch_rate = 0.0;            // q
    double index_entropy = 0.0;          // H(Q)
    std::vector<double> module_weight;   // p^i per community
    std::vector<double> module_entropy;  // H(P^i) per community
    double codelength = 0.0;             // L, bits
};

namespace detail {

/// Relabels communities compactly, ordered by smallest member node index.
inline std::vector<int> canonical_labels(const std::vector<int>& labels) {
    std::vector<int> out(labels.size(), -1);
    std::vector<std::pair<int, int>> first; // (original label, new id)
    for (std::size_t u = 0; u < labels.size(); ++u) {
        int nl = -1;
        for (const auto& [orig, id] : first) {
            if (orig == labels[u]) {
                nl = id;
                break;
            }
        }
        if (nl < 0) {
            nl = static_cast<int>(first.size());
            first.emplace_back(labels[u], nl);
        }
        out[u] = nl;
    }
    return out;
}

} // namespace detail

/**
 * Evaluates the map equation for a given assignment.
 *
 * The random walk on an undirected snapshot has stationary visit rate
 * deg(u) / 2m per node, so all terms follow from per-module degree sums and
 * boundary edge counts; an edgeless snapshot has L = 0 by convention.
 * Isolated nodes carry zero visit rate and contribute nothing wherever they
 * are placed.
 */
inline Partition map_equation(const Snapshot& g, const std::vector<int>& assignment) {
    const int n = g.size();
    if (n > 0 && assignment.empty()) throw InputError("map equation: empty assignment");
    if (static_cast<int>(assignment.size()) != n) {
        throw InputError("map equation: assignment must cover every node");
    }

    Partition part;
    part.labels = detail::canonical_labels(assignment);
    part.num_communities = part.labels.empty()
                               ? 0
                               : 1 + *std::max_element(part.labels.begin(), part.labels.end());
    const int m_count = part.num_communities;
    part.module_weight.assign(static_cast<std::size_t>(m_count), 0.0);
    part.module_entropy.assign(static_cast<std::size_t>(m_count), 0.0);

    const double edges = static_cast<double>(g.edge_count());
    if (edges == 0.0 || m_count == 0) return part; // L = 0 convention

    const double inv_two_m = 1.0 / (2.0 * edges);
    std::vector<double> visit(static_cast<std::size_t>(n), 0.0);
    for (int u = 0; u < n; ++u) {
        visit[static_cast<std::size_t>(u)] = static_cast<double>(g.degree(u)) * inv_two_m;
    }

    std::vector<double> exit_rate(static_cast<std::size_t>(m_count), 0.0); // q_i
    std::vector<double> visit_sum(static_cast<std::size_t>(m_count), 0.0);
    for (int u = 0; u < n; ++u) {
        visit_sum[static_cast<std::size_t>(part.labels[static_cast<std::size_t>(u)])] +=
            visit[static_cast<std::size_t>(u)];
    }
    for (const auto& [u, v] : g.edges()) {
        const int cu = part.labels[static_cast<std::size_t>(u)];
        const int cv = part.labels[static_cast<std::size_t>(v)];
        if (cu != cv) {
            exit_rate[static_cast<std::size_t>(cu)] += inv_two_m;
            exit_rate[static_cast<std::size_t>(cv)] += inv_two_m;
        }
    }

    double q = 0.0;
    for (double qi : exit_rate) q += qi;
    part.switch_rate = q;
    if (q > 0.0) {
        double h = 0.0;
        for (double qi : exit_rate) {
            const double frac = qi / q;
            if (frac > 0.0) h -= frac * std::log2(frac);
        }
        part.index_entropy = h;
    }

    double codelength = part.switch_rate * part.index_entropy;
    for (int c = 0; c < m_count; ++c) {
        const double pw = exit_rate[static_cast<std::size_t>(c)] + visit_sum[static_cast<std::size_t>(c)];
        part.module_weight[static_cast<std::size_t>(c)] = pw;
        if (pw <= 0.0) continue;
        double h = 0.0;
        const double exit_frac = exit_rate[static_cast<std::size_t>(c)] / pw;
        if (exit_frac > 0.0) h -= exit_frac * std::log2(exit_frac);
        for (int u = 0; u < n; ++u) {
            if (part.labels[static_cast<std::size_t>(u)] != c) continue;
            const double frac = visit[static_cast<std::size_t>(u)] / pw;
            if (frac > 0.0) h -= frac * std::log2(frac);
        }
        part.module_entropy[static_cast<std::size_t>(c)] = h;
        codelength += pw * h;
    }
    part.codelength = codelength;
    return part;
}

struct InfomapOptions {
    int restarts = 10;
    std::uint64_t seed = 1;
};

namespace detail {

/**
 * Mutable greedy-optimizer state over module aggregates. The codelength uses
 * the expanded form
 *     L = plogp(q) - 2 sum_i plogp(q_i) + sum_i plogp(p^i) - sum_u plogp(p_u)
 * so a node move only touches the two affected modules. Boundary edge-ends
 * are tracked as integers; the probability terms are rebuilt from them on
 * every evaluation, which keeps drift out of the incremental updates.
 */
class MapState {
public:
    MapState(const Snapshot& g, double inv_two_m) : g_(&g), inv_two_m_(inv_two_m) {
        const int n = g.size();
        label_.resize(static_cast<std::size_t>(n));
        cut_.assign(static_cast<std::size_t>(n), 0);
        deg_sum_.assign(static_cast<std::size_t>(n), 0);
        size_.assign(static_cast<std::size_t>(n), 0);
        node_term_ = 0.0;
        for (int u = 0; u < n; ++u) {
            label_[static_cast<std::size_t>(u)] = u;
            cut_[static_cast<std::size_t>(u)] = g.degree(u);
            deg_sum_[static_cast<std::size_t>(u)] = g.degree(u);
            size_[static_cast<std::size_t>(u)] = 1;
            node_term_ += plogp2(static_cast<double>(g.degree(u)) * inv_two_m_);
        }
        rebuild_aggregates();
    }

    double codelength() const {
        return plogp2(q_total_) - 2.0 * sum_plogp_q_ + sum_plogp_p_ - node_term_;
    }

    int label(int u) const { return label_[static_cast<std::size_t>(u)]; }
    int community_size(int c) const { return size_[static_cast<std::size_t>(c)]; }
    const std::vector<int>& labels() const { return label_; }

    /// Codelength delta if node u moved to community `target` (may be an
    /// empty slot). Pure; does not mutate.
    double move_delta(int u, int target) const {
        const int from = label_[static_cast<std::size_t>(u)];
        if (from == target) return 0.0;
        const int deg_u = g_->degree(u);
        int links_from = 0, links_target = 0;
        for (int w : g_->neighbors(u)) {
            const int lw = label_[static_cast<std::size_t>(w)];
            if (lw == from) ++links_from;
            else if (lw == target) ++links_target;
        }
        const long long cut_from_new = cut_[static_cast<std::size_t>(from)] - deg_u + 2LL * links_from;
        const long long cut_target_new = cut_[static_cast<std::size_t>(target)] + deg_u - 2LL * links_target;
        const long long deg_from_new = deg_sum_[static_cast<std::size_t>(from)] - deg_u;
        const long long deg_target_new = deg_sum_[static_cast<std::size_t>(target)] + deg_u;

        const double q_from_old = rate(cut_[static_cast<std::size_t>(from)]);
        const double q_target_old = rate(cut_[static_cast<std::size_t>(target)]);
        const double q_from_new = rate(cut_from_new);
        const double q_target_new = rate(cut_target_new);
        const double p_from_old = q_from_old + rate(deg_sum_[static_cast<std::size_t>(from)]);
        const double p_target_old = q_target_old + rate(deg_sum_[static_cast<std::size_t>(target)]);
        const double p_from_new = q_from_new + rate(deg_from_new);
        const double p_target_new = q_target_new + rate(deg_target_new);

        const double q_new = q_total_ - q_from_old - q_target_old + q_from_new + q_target_new;
        const double d_plogp_q = plogp2(q_from_new) + plogp2(q_target_new) -
                                 plogp2(q_from_old) - plogp2(q_target_old);
        const double d_plogp_p = plogp2(p_from_new) + plogp2(p_target_new) -
                                 plogp2(p_from_old) - plogp2(p_target_old);
        return (plogp2(q_new) - plogp2(q_total_)) - 2.0 * d_plogp_q + d_plogp_p;
    }

    void apply_move(int u, int target) {
        const int from = label_[static_cast<std::size_t>(u)];
        if (from == target) return;
        const int deg_u = g_->degree(u);
        int links_from = 0, links_target = 0;
        for (int w : g_->neighbors(u)) {
            const int lw = label_[static_cast<std::size_t>(w)];
            if (lw == from) ++links_from;
            else if (lw == target) ++links_target;
        }
        remove_aggregate(from);
        remove_aggregate(target);
        cut_[static_cast<std::size_t>(from)] += -deg_u + 2LL * links_from;
        cut_[static_cast<std::size_t>(target)] += deg_u - 2LL * links_target;
        deg_sum_[static_cast<std::size_t>(from)] -= deg_u;
        deg_sum_[static_cast<std::size_t>(target)] += deg_u;
        size_[static_cast<std::size_t>(from)] -= 1;
        size_[static_cast<std::size_t>(target)] += 1;
        label_[static_cast<std::size_t>(u)] = target;
        add_aggregate(from);
        add_aggregate(target);
    }

    /// A community slot that is currently empty, for singleton moves.
    int empty_slot() const {
        for (std::size_t c = 0; c < size_.size(); ++c) {
            if (size_[c] == 0) return static_cast<int>(c);
        }
        return -1;
    }

private:
    double rate(long long ends) const { return static_cast<double>(ends) * inv_two_m_; }

    void remove_aggregate(int c) {
        const double qi = rate(cut_[static_cast<std::size_t>(c)]);
        q_total_ -= qi;
        sum_plogp_q_ -= plogp2(qi);
        sum_plogp_p_ -= plogp2(qi + rate(deg_sum_[static_cast<std::size_t>(c)]));
    }

    void add_aggregate(int c) {
        const double qi = rate(cut_[static_cast<std::size_t>(c)]);
        q_total_ += qi;
        sum_plogp_q_ += plogp2(qi);
        sum_plogp_p_ += plogp2(qi + rate(deg_sum_[static_cast<std::size_t>(c)]));
    }

    void rebuild_aggregates() {
        q_total_ = 0.0;
        sum_plogp_q_ = 0.0;
        sum_plogp_p_ = 0.0;
        for (std::size_t c = 0; c < size_.size(); ++c) {
            if (size_[c] == 0) continue;
            const double qi = rate(cut_[c]);
            q_total_ += qi;
            sum_plogp_q_ += plogp2(qi);
            sum_plogp_p_ += plogp2(qi + rate(deg_sum_[c]));
        }
    }

    const Snapshot* g_;
    double inv_two_m_;
    std::vector<int> label_;
    std::vector<long long> cut_;     // boundary edge-ends per community
    std::vector<long long> deg_sum_; // total degree per community
    std::vector<int> size_;
    double q_total_ = 0.0;
    double sum_plogp_q_ = 0.0;
    double sum_plogp_p_ = 0.0;
    double node_term_ = 0.0;
};

inline std::vector<int> one_module_labels(const Snapshot& g) {
    std::vector<int> labels(static_cast<std::size_t>(g.size()), 0);
    int next = 1;
    for (int u = 0; u < g.size(); ++u) {
        if (g.degree(u) == 0) labels[static_cast<std::size_t>(u)] = next++;
    }
    return labels;
}

inline std::vector<int> singleton_labels(int n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 0);
    return labels;
}

} // namespace detail

/**
 * Greedy map-equation minimization with restarts.
 *
 * Each restart starts from all-singleton communities and repeatedly sweeps
 * the nodes in seeded-random order, moving each node to the neighboring
 * community (or a fresh singleton) that most decreases L, until a full sweep
 * makes no move. The best partition across restarts is kept (ties go to the
 * earliest restart), and is never worse than the one-module or all-singleton
 * baselines. Deterministic given (seed, restarts).
 *
 * `accepted_codelengths`, when given, receives the running L after every
 * accepted move (testing hook for the monotonicity property).
 */
inline Partition infomap(const Snapshot& g, const InfomapOptions& opts = {},
                         std::vector<double>* accepted_codelengths = nullptr) {
    if (opts.restarts < 1) throw InputError("infomap: restarts must be >= 1");
    const int n = g.size();
    if (n == 0) return map_equation(g, {});
    if (g.edge_count() == 0) {
        return map_equation(g, detail::singleton_labels(n)); // L = 0, all singletons
    }

    const double inv_two_m = 1.0 / (2.0 * static_cast<double>(g.edge_count()));
    std::vector<int> moveable;
    for (int u = 0; u < n; ++u) {
        if (g.degree(u) > 0) moveable.push_back(u); // isolated nodes stay singletons
    }

    bool have_best = false;
    std::vector<int> best_labels;
    double best_codelength = 0.0;

    Rng root(opts.seed);
    for (int restart = 0; restart < opts.restarts; ++restart) {
        Rng rng = root.split("infomap-restart", static_cast<std::uint64_t>(restart));
        detail::MapState state(g, inv_two_m);
        std::vector<int> order = moveable;
        bool moved = true;
        while (moved) {
            moved = false;
            rng.shuffle(order);
            for (int u : order) {
                const int current = state.label(u);
                // Candidate targets: distinct neighbor communities plus a
                // fresh singleton when u is not alone already.
                std::vector<int> candidates;
                for (int w : g.neighbors(u)) {
                    const int lw = state.label(w);
                    if (lw != current) candidates.push_back(lw);
                }
                std::sort(candidates.begin(), candidates.end());
                candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
                if (state.community_size(current) > 1) {
                    const int slot = state.empty_slot();
                    if (slot >= 0) candidates.push_back(slot);
                }
                int best_target = -1;
                double best_delta = -1e-12; // strictly decreasing moves only
                for (int cand : candidates) {
                    const double delta = state.move_delta(u, cand);
                    if (delta < best_delta) {
                        best_delta = delta;
                        best_target = cand;
                    }
                }
                if (best_target >= 0) {
                    state.apply_move(u, best_target);
                    moved = true;
                    if (accepted_codelengths) accepted_codelengths->push_back(state.codelength());
                }
            }
        }
        const Partition candidate = map_equation(g, state.labels());
        if (!have_best || candidate.codelength < best_codelength) {
            have_best = true;
            best_labels = candidate.labels;
            best_codelength = candidate.codelength;
        }
    }

    for (const auto& baseline :
         {detail::one_module_labels(g), detail::singleton_labels(n)}) {
        const Partition candidate = map_equation(g, baseline);
        if (candidate.codelength < best_codelength) {
            best_labels = candidate.labels;
            best_codelength = candidate.codelength;
        }
    }
    return map_equation(g, best_labels);
}

/**
 * Global map-equation minimum by enumerating every set partition of the
 * non-isolated nodes (isolated nodes are fixed singletons). Testing oracle;
 * limited to 10 nodes.
 */
inline Partition exhaustive_partition_search(const Snapshot& g) {
    const int n = g.size();
    if (n > 10) throw InputError("exhaustive partition search: too many nodes (limit 10)");
    if (n == 0) return map_equation(g, {});

    std::vector<int> active;
    for (int u = 0; u < n; ++u) {
        if (g.degree(u) > 0) active.push_back(u);
    }

    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    std::vector<int> best_labels;
    double best_codelength = std::numeric_limits<double>::infinity();

    // Restricted growth strings over the active nodes.
    std::vector<int> rgs(active.size(), 0);
    std::function<void(std::size_t, int)> enumerate = [&](std::size_t pos, int max_used) {
        if (pos == active.size()) {
            int next = max_used;
            for (int u = 0; u < n; ++u) labels[static_cast<std::size_t>(u)] = -1;
            for (std::size_t i = 0; i < active.size(); ++i) {
                labels[static_cast<std::size_t>(active[i])] = rgs[i];
            }
            for (int u = 0; u < n; ++u) {
                if (labels[static_cast<std::size_t>(u)] < 0) labels[static_cast<std::size_t>(u)] = next++;
            }
            const Partition p = map_equation(g, labels);
            if (p.codelength < best_codelength) {
                best_codelength = p.codelength;
                best_labels = labels;
            }
            return;
        }
        for (int c = 0; c <= max_used; ++c) {
            rgs[pos] = c;
            enumerate(pos + 1, std::max(max_used, c + 1));
        }
    };
    enumerate(0, 0);
    return map_equation(g, best_labels);
}

} // namespace collabnet
