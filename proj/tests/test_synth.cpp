#include <doctest.h>

#include <cmath>
#include <sstream>

#include "collabnet/community.hpp"
#include "collabnet/io.hpp"
#include "collabnet/synth.hpp"

using namespace collabnet;

namespace {

std::string serialize(const SynthCohort& cohort) {
    std::ostringstream out;
    Metadata meta;
    write_roster(out, cohort.roster, meta);
    write_reports(out, cohort.reports, meta);
    write_outcomes(out, cohort.outcomes, meta);
    return out.str();
}

} // namespace

TEST_SUITE("synth") {

TEST_CASE("generation is deterministic under the seed") {
    SynthConfig config;
    config.students = 40;
    config.communities = 4;
    config.seed = 123;
    const std::string a = serialize(generate_cohort(config));
    const std::string b = serialize(generate_cohort(config));
    CHECK(a == b);
    config.seed = 124;
    CHECK(serialize(generate_cohort(config)) != a);
}

TEST_CASE("edge count concentrates near its expectation") {
    SynthConfig config;
    config.students = 80;
    config.communities = 4;
    config.p_in = 0.3;
    config.p_out = 0.02;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        config.seed = seed;
        const SynthCohort cohort = generate_cohort(config);
        CHECK_FALSE(cohort.diagnostics.edge_count_flagged);
        CHECK(std::abs(static_cast<double>(cohort.diagnostics.edge_count) -
                       cohort.diagnostics.expected_edges) <=
              5.0 * cohort.diagnostics.edge_sd);
    }
}

TEST_CASE("attributes stay inside their declared ranges") {
    SynthConfig config;
    config.students = 60;
    config.attr_noise = 2.0; // stress the clipping
    config.seed = 5;
    const SynthCohort cohort = generate_cohort(config);
    for (const auto& student : cohort.roster.students) {
        CHECK(student.confidence.at(1) >= 1.0);
        CHECK(student.confidence.at(1) <= 5.0);
        CHECK(student.interest.at(1) >= 1.0);
        CHECK(student.interest.at(1) <= 5.0);
        CHECK(*student.sat >= 200.0);
        CHECK(*student.sat <= 800.0);
    }
}

TEST_CASE("without contagion the outcome residual is uncorrelated with peers") {
    SynthConfig config;
    config.students = 200;
    config.communities = 5;
    config.beta_comm = 0.0;
    config.beta_self = 0.7;
    config.noise_sigma = 0.4;
    config.seed = 17;
    const SynthCohort cohort = generate_cohort(config);

    // peer-mean ability per student, self excluded
    std::vector<double> community_sum(static_cast<std::size_t>(config.communities), 0.0);
    std::vector<int> community_size(static_cast<std::size_t>(config.communities), 0);
    for (int i = 0; i < config.students; ++i) {
        community_sum[static_cast<std::size_t>(cohort.planted_community[static_cast<std::size_t>(i)])] +=
            cohort.ability[static_cast<std::size_t>(i)];
        community_size[static_cast<std::size_t>(cohort.planted_community[static_cast<std::size_t>(i)])]++;
    }
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const int n = config.students;
    for (int i = 0; i < n; ++i) {
        const int c = cohort.planted_community[static_cast<std::size_t>(i)];
        const double peer = (community_sum[static_cast<std::size_t>(c)] -
                             cohort.ability[static_cast<std::size_t>(i)]) /
                            (community_size[static_cast<std::size_t>(c)] - 1);
        const double resid = cohort.outcomes[static_cast<std::size_t>(i)].second -
                             config.beta_self * cohort.ability[static_cast<std::size_t>(i)];
        sx += peer;
        sy += resid;
        sxx += peer * peer;
        syy += resid * resid;
        sxy += peer * resid;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double corr = cov / std::sqrt((sxx / n - sx / n * sx / n) * (syy / n - sy / n * sy / n));
    CHECK(std::abs(corr) < 0.25); // pure sampling noise at n = 200
}

TEST_CASE("strong contagion makes peer attributes the better correlate") {
    SynthConfig config;
    config.students = 150;
    config.communities = 5;
    config.beta_self = 0.2;
    config.beta_comm = 2.0;
    config.noise_sigma = 0.1;
    config.attr_noise = 0.2;
    config.seed = 71;
    const SynthCohort cohort = generate_cohort(config);
    CHECK(cohort.diagnostics.peer_attr_outcome_corr > cohort.diagnostics.own_attr_outcome_corr);
    CHECK(cohort.diagnostics.peer_attr_outcome_corr > 0.5);
}

TEST_CASE("disconnected planted blocks are recovered by infomap") {
    SynthConfig config;
    config.students = 20;
    config.communities = 2;
    config.p_in = 0.8;
    config.p_out = 0.0;
    config.seed = 31;
    const SynthCohort cohort = generate_cohort(config);
    const auto snapshots = build_snapshots(cohort.reports, cohort.roster, {1});
    const Partition p = infomap(snapshots[0], {8, 3});
    // every within-block pair shares a label, cross-block pairs never do
    for (int i = 0; i < config.students; ++i) {
        for (int j = i + 1; j < config.students; ++j) {
            const bool same_block = cohort.planted_community[static_cast<std::size_t>(i)] ==
                                    cohort.planted_community[static_cast<std::size_t>(j)];
            const bool same_label = p.labels[static_cast<std::size_t>(i)] ==
                                    p.labels[static_cast<std::size_t>(j)];
            CHECK(same_block == same_label);
        }
    }
}

TEST_CASE("multi-wave emission reaches the same final network") {
    SynthConfig config;
    config.students = 30;
    config.communities = 3;
    config.seed = 77;
    config.waves = 1;
    const SynthCohort single = generate_cohort(config);
    config.waves = 6;
    const SynthCohort multi = generate_cohort(config);

    const auto snap_single = build_snapshots(single.reports, single.roster, {1});
    const auto snap_multi =
        build_snapshots(multi.reports, multi.roster, {1, 2, 3, 4, 5, 6});
    REQUIRE(snap_multi.size() == 6);
    CHECK(snap_multi[5].edges() == snap_single[0].edges());
    // cumulative: earlier waves are subsets
    for (int t = 1; t < 6; ++t) {
        const auto& prev = snap_multi[static_cast<std::size_t>(t - 1)].edges();
        const auto& curr = snap_multi[static_cast<std::size_t>(t)].edges();
        CHECK(std::includes(curr.begin(), curr.end(), prev.begin(), prev.end()));
    }
}

TEST_CASE("synthetic files round-trip through the ingest path") {
    SynthConfig config;
    config.students = 25;
    config.communities = 5;
    config.seed = 9;
    const SynthCohort cohort = generate_cohort(config);

    std::ostringstream roster_text, reports_text, outcomes_text;
    Metadata meta;
    write_roster(roster_text, cohort.roster, meta);
    write_reports(reports_text, cohort.reports, meta);
    write_outcomes(outcomes_text, cohort.outcomes, meta);

    std::istringstream roster_in(roster_text.str());
    const Roster roster = ingest_roster(roster_in);
    CHECK(roster.size() == 25);
    std::istringstream reports_in(reports_text.str());
    const auto reports = ingest_reports(reports_in, roster);
    const auto snapshots = build_snapshots(reports, roster, {1});
    const auto direct = build_snapshots(cohort.reports, cohort.roster, {1});
    CHECK(snapshots[0].edges() == direct[0].edges());
    std::istringstream outcomes_in(outcomes_text.str());
    CHECK(read_outcomes(outcomes_in).size() == 25);
}

TEST_CASE("config validation") {
    SynthConfig config;
    config.p_in = 0.1;
    config.p_out = 0.2;
    CHECK_THROWS_AS(generate_cohort(config), InputError);
    config.p_out = 0.05;
    config.communities = 0;
    CHECK_THROWS_AS(generate_cohort(config), InputError);
}

} // TEST_SUITE
