#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "collabnet/io.hpp"

namespace collabnet {

/// End-to-end run configuration. All randomness (infomap restarts) derives
/// from the single seed, so identical configs produce identical artifacts.
struct RunConfig {
    std::string roster_path;
    std::string collaborations_path;
    std::string outcomes_path;
    std::vector<int> assignment_order = {1, 2, 3, 4, 5, 6};
    int snapshot_position = 0; // 1-based; 0 means the last snapshot
    double alpha = 0.85;
    double ppr_tol = 1e-12;
    int ppr_max_iter = 2000;
    int infomap_restarts = 10;
    std::uint64_t seed = 42;
    bool use_aicc = false;
    double likert_min = 1.0;
    double likert_max = 5.0;
    std::string out_dir = "out";

    int resolved_position() const {
        return snapshot_position == 0 ? static_cast<int>(assignment_order.size())
                                      : snapshot_position;
    }

    Metadata metadata() const {
        Metadata meta;
        meta.set("seed", static_cast<long>(seed));
        meta.set("alpha", alpha);
        meta.set("ppr_tol", ppr_tol);
        meta.set("infomap_restarts", static_cast<long>(infomap_restarts));
        meta.set("aic_variant", use_aicc ? "aicc" : "aic");
        meta.set("target_entropy_log_base", "e");
        meta.set("information_log_base", "2");
        return meta;
    }
};

namespace detail {

template <class Fn>
auto run_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const InputError& e) {
        throw InputError(std::string("stage ") + stage + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(std::string("stage ") + stage + ": " + e.what());
    }
}

} // namespace detail

/// Artifacts produced by a full pipeline run.
struct PipelineResult {
    std::vector<Snapshot> snapshots;
    FamilyReport report;
    std::vector<std::string> files_written;
};

/**
 * Runs the full pipeline: ingest, snapshots, centrality, communities,
 * features, model selection, report. Artifacts land in config.out_dir; any
 * stage error aborts with a stage-labeled message.
 */
inline PipelineResult run_pipeline(const RunConfig& config) {
    namespace fs = std::filesystem;
    PipelineResult result;
    const Metadata meta = config.metadata();

    fs::create_directories(config.out_dir);
    auto artifact = [&](const std::string& name) {
        const std::string path = (fs::path(config.out_dir) / name).string();
        result.files_written.push_back(path);
        return path;
    };

    // ingest
    Roster roster;
    std::vector<CollaborationReport> reports;
    std::map<std::string, double> outcomes;
    detail::run_stage("ingest", [&] {
        auto roster_in = open_input(config.roster_path);
        roster = ingest_roster(roster_in, config.likert_min, config.likert_max);
        auto reports_in = open_input(config.collaborations_path);
        reports = ingest_reports(reports_in, roster);
        auto outcomes_in = open_input(config.outcomes_path);
        outcomes = read_outcomes(outcomes_in);
        return 0;
    });

    // snapshots
    detail::run_stage("snapshots", [&] {
        result.snapshots = build_snapshots(reports, roster, config.assignment_order);
        auto growth = open_output(artifact("edge_growth.csv"));
        write_edge_growth(growth, edge_growth_table(result.snapshots), meta);
        for (const auto& snapshot : result.snapshots) {
            auto out = open_output(artifact("edgelist_" + std::to_string(snapshot.assignment()) + ".csv"));
            write_edgelist_artifact(out, snapshot, meta);
        }
        return 0;
    });

    const int position = config.resolved_position();
    if (position < 1 || position > static_cast<int>(result.snapshots.size())) {
        throw InputError("stage snapshots: snapshot position out of range");
    }
    const Snapshot& snapshot = result.snapshots[static_cast<std::size_t>(position - 1)];

    // centrality
    detail::run_stage("centrality", [&] {
        PagerankOptions pr_opts{config.alpha, config.ppr_tol, config.ppr_max_iter};
        std::vector<CentralityScores> scores;
        scores.push_back(degree(snapshot));
        scores.push_back(log_degree(snapshot));
        scores.push_back(pagerank(snapshot, pr_opts));
        scores.push_back(target_entropy(snapshot));
        scores.push_back(hide(snapshot));
        auto out = open_output(artifact("centrality.csv"));
        write_centrality(out, snapshot, scores, meta);
        return 0;
    });

    // communities
    CommunityOutputs community;
    detail::run_stage("communities", [&] {
        PprOptions ppr_opts{config.alpha, config.ppr_tol, config.ppr_max_iter};
        InfomapOptions im_opts{config.infomap_restarts, Rng(config.seed).split("infomap").next_u64()};
        community = compute_community_outputs(snapshot, ppr_opts, im_opts);
        auto pout = open_output(artifact("partition.csv"));
        write_partition(pout, snapshot, community.partition, meta);
        auto wout = open_output(artifact("ppr.csv"));
        write_ppr_matrix(wout, snapshot, community.ppr, meta);
        return 0;
    });

    // features
    FeatureTable table;
    std::vector<int> rows;
    detail::run_stage("features", [&] {
        table = assemble_features(snapshot, roster, community, config.assignment_order, position);
        rows.clear();
        for (int u : complete_case_rows(snapshot, table)) {
            if (outcomes.count(snapshot.id_of(u))) rows.push_back(u);
        }
        if (rows.empty()) throw InputError("no student has complete predictors and an outcome");
        for (ModelFamily family : all_families()) {
            const PredictorMatrix matrix = build_predictor_matrix(snapshot, table, family, rows);
            auto out = open_output(artifact(std::string("predictor_matrix_") + family_name(family) + ".csv"));
            write_predictor_matrix(out, matrix, meta);
        }
        return 0;
    });

    // select
    detail::run_stage("select", [&] {
        std::vector<double> y;
        y.reserve(rows.size());
        for (int u : rows) y.push_back(outcomes.at(snapshot.id_of(u)));
        result.report = compare_families(snapshot, table, rows, y, config.use_aicc);
        auto fout = open_output(artifact("family_report.csv"));
        write_family_report(fout, result.report, meta);
        auto bout = open_output(artifact("best_model.csv"));
        write_best_model(bout, result.report, meta);
        return 0;
    });

    // report
    detail::run_stage("report", [&] {
        std::vector<FamilyReportRow> family_rows;
        for (const auto& row : result.report.rows) {
            family_rows.push_back({family_name(row.family), row.fit.r2, row.criterion,
                                   row.evidence_ratio, join_predictors(row.spec.predictors)});
        }
        std::vector<BestModelRow> best_rows;
        const auto& best = result.report.best();
        for (std::size_t j = 0; j < best.fit.terms.size(); ++j) {
            best_rows.push_back({best.fit.terms[j], best.fit.coefficients[j], best.fit.ci_lo[j],
                                 best.fit.ci_hi[j], best.fit.p_values[j]});
        }
        auto out = open_output(artifact("report.txt"));
        meta.write(out);
        render_report_text(out, family_rows, best_rows);
        return 0;
    });

    return result;
}

} // namespace collabnet
