#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "collabnet/common.hpp"
#include "collabnet/graph.hpp"

namespace collabnet {

/**
 * Configuration for a synthetic cohort: a planted-partition collaboration
 * network plus attributes and outcomes driven by a latent per-student
 * ability, with a contagion term through the planted community.
 */
struct SynthConfig {
    int students = 100;
    int communities = 5;
    double p_in = 0.3;
    double p_out = 0.01;
    double beta_self = 0.5;
    double beta_comm = 1.0;
    double noise_sigma = 0.5;
    double attr_noise = 0.5;
    std::uint64_t seed = 1;
    int waves = 1; // pseudo-assignments the edges are spread over

    void validate() const {
        if (students < 1) throw InputError("synth: students must be >= 1");
        if (communities < 1 || communities > students) {
            throw InputError("synth: communities must lie in [1, students]");
        }
        if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) {
            throw InputError("synth: need 0 <= p_out < p_in <= 1");
        }
        if (noise_sigma < 0.0 || attr_noise < 0.0) {
            throw InputError("synth: noise scales must be >= 0");
        }
        if (waves < 1) throw InputError("synth: waves must be >= 1");
    }
};

struct SynthCohort {
    Roster roster;
    std::vector<CollaborationReport> reports;
    std::vector<std::pair<std::string, double>> outcomes; // sorted by id
    std::vector<int> planted_community;                   // per roster index
    std::vector<double> ability;                          // per roster index

    struct Diagnostics {
        long edge_count = 0;
        double expected_edges = 0.0;
        double edge_sd = 0.0;
        bool edge_count_flagged = false; // more than 5 sd from expectation
        // sanity check of the contagion design: correlation of the outcome
        // with own confidence vs the planted-community peer mean of it
        double own_attr_outcome_corr = 0.0;
        double peer_attr_outcome_corr = 0.0;
    } diagnostics;
};

namespace detail {

inline std::string synth_id(int index, int width) {
    std::string digits = std::to_string(index + 1);
    while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
    return "s" + digits;
}

inline double clip(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

} // namespace detail

/**
 * Generates a cohort deterministically from the seed.
 *
 * Nodes are split into near-equal contiguous planted communities; each
 * in-community pair gets an edge with p_in, each cross pair with p_out.
 * Latent ability is standard normal; observed confidence/interest are noisy
 * affine transforms clipped into the Likert range, SAT is mapped onto a
 * 200-800-style scale. Outcomes are
 *     beta_self * ability + beta_comm * mean(ability of planted peers) + noise.
 * Edges are emitted as single-wave collaboration reports, or spread uniformly
 * over `waves` pseudo-assignments to exercise cumulative snapshots.
 */
inline SynthCohort generate_cohort(const SynthConfig& config) {
    config.validate();
    const int n = config.students;
    const int k = config.communities;
    Rng rng(config.seed);
    Rng ability_rng = rng.split("ability");
    Rng attr_rng = rng.split("attributes");
    Rng edge_rng = rng.split("edges");
    Rng outcome_rng = rng.split("outcome");
    Rng wave_rng = rng.split("waves");

    SynthCohort cohort;
    const int width = static_cast<int>(std::to_string(n).size());

    cohort.planted_community.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        cohort.planted_community[static_cast<std::size_t>(i)] =
            static_cast<int>((static_cast<long long>(i) * k) / n);
    }

    cohort.ability.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cohort.ability[static_cast<std::size_t>(i)] = ability_rng.normal();

    cohort.roster.students.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        StudentRecord rec;
        rec.id = detail::synth_id(i, width);
        const double z = cohort.ability[static_cast<std::size_t>(i)];
        rec.confidence[1] = detail::clip(3.0 + 0.8 * z + config.attr_noise * attr_rng.normal(), 1.0, 5.0);
        rec.interest[1] = detail::clip(3.0 + 0.8 * z + config.attr_noise * attr_rng.normal(), 1.0, 5.0);
        rec.sat = detail::clip(500.0 + 100.0 * z + 100.0 * config.attr_noise * attr_rng.normal(),
                               200.0, 800.0);
        cohort.roster.students.push_back(std::move(rec));
    }
    // ids are generated in sorted order already (fixed width)

    std::vector<std::pair<int, int>> edges;
    double expected = 0.0;
    double variance = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool same = cohort.planted_community[static_cast<std::size_t>(i)] ==
                              cohort.planted_community[static_cast<std::size_t>(j)];
            const double p = same ? config.p_in : config.p_out;
            expected += p;
            variance += p * (1.0 - p);
            if (edge_rng.uniform01() < p) edges.emplace_back(i, j);
        }
    }
    cohort.diagnostics.edge_count = static_cast<long>(edges.size());
    cohort.diagnostics.expected_edges = expected;
    cohort.diagnostics.edge_sd = std::sqrt(variance);
    cohort.diagnostics.edge_count_flagged =
        variance > 0.0 &&
        std::abs(static_cast<double>(edges.size()) - expected) > 5.0 * cohort.diagnostics.edge_sd;

    // Reports: each edge reported once by its lower-id endpoint, grouped per
    // wave and reporter.
    std::map<std::pair<int, int>, std::vector<int>> grouped; // (wave, reporter) -> collaborators
    for (const auto& [i, j] : edges) {
        const int wave = config.waves == 1 ? 1 : static_cast<int>(wave_rng.below(config.waves)) + 1;
        grouped[{wave, i}].push_back(j);
    }
    for (auto& [key, collaborators] : grouped) {
        CollaborationReport rep;
        rep.assignment = key.first;
        rep.reporter = cohort.roster.students[static_cast<std::size_t>(key.second)].id;
        std::sort(collaborators.begin(), collaborators.end());
        for (int j : collaborators) {
            rep.collaborators.push_back(cohort.roster.students[static_cast<std::size_t>(j)].id);
        }
        cohort.reports.push_back(std::move(rep));
    }

    // Peer-mean ability per planted community, self excluded.
    std::vector<double> community_sum(static_cast<std::size_t>(k), 0.0);
    std::vector<int> community_size(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
        community_sum[static_cast<std::size_t>(cohort.planted_community[static_cast<std::size_t>(i)])] +=
            cohort.ability[static_cast<std::size_t>(i)];
        community_size[static_cast<std::size_t>(cohort.planted_community[static_cast<std::size_t>(i)])]++;
    }
    cohort.outcomes.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int c = cohort.planted_community[static_cast<std::size_t>(i)];
        const int peers = community_size[static_cast<std::size_t>(c)] - 1;
        const double peer_mean =
            peers > 0 ? (community_sum[static_cast<std::size_t>(c)] -
                         cohort.ability[static_cast<std::size_t>(i)]) / peers
                      : 0.0;
        const double score = config.beta_self * cohort.ability[static_cast<std::size_t>(i)] +
                             config.beta_comm * peer_mean +
                             config.noise_sigma * outcome_rng.normal();
        cohort.outcomes.emplace_back(cohort.roster.students[static_cast<std::size_t>(i)].id, score);
    }

    // Generation-time sanity diagnostic: with strong contagion and low noise,
    // the peer-mean attribute should out-correlate the own attribute.
    if (n > 2 && community_size[0] > 1) {
        auto correlation = [&](auto&& value_of) {
            double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (int i = 0; i < n; ++i) {
                const double x = value_of(i);
                const double y = cohort.outcomes[static_cast<std::size_t>(i)].second;
                sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
            }
            const double cov = sxy / n - sx / n * sy / n;
            const double vx = sxx / n - sx / n * sx / n;
            const double vy = syy / n - sy / n * sy / n;
            return vx > 0.0 && vy > 0.0 ? cov / std::sqrt(vx * vy) : 0.0;
        };
        auto confidence_of = [&](int i) {
            return cohort.roster.students[static_cast<std::size_t>(i)].confidence.at(1);
        };
        std::vector<double> conf_sum(static_cast<std::size_t>(k), 0.0);
        for (int i = 0; i < n; ++i) {
            conf_sum[static_cast<std::size_t>(cohort.planted_community[static_cast<std::size_t>(i)])] +=
                confidence_of(i);
        }
        cohort.diagnostics.own_attr_outcome_corr = correlation(confidence_of);
        cohort.diagnostics.peer_attr_outcome_corr = correlation([&](int i) {
            const int c = cohort.planted_community[static_cast<std::size_t>(i)];
            const int peers = community_size[static_cast<std::size_t>(c)] - 1;
            return peers > 0
                       ? (conf_sum[static_cast<std::size_t>(c)] - confidence_of(i)) / peers
                       : 0.0;
        });
    }
    return cohort;
}

} // namespace collabnet
