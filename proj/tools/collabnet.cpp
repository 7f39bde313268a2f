// Command-line front end for the collabnet toolkit. Subcommands run the
// pipeline stages in isolation; `run` chains everything. Exit codes: 0 on
// success, 1 on input errors, 2 on numerical failures.

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "collabnet/pipeline.hpp"

namespace {

using namespace collabnet;
namespace fs = std::filesystem;

std::vector<int> parse_order(const std::string& text) {
    std::vector<int> order;
    for (const auto& field : split_fields(text, ',')) {
        if (field.empty()) continue;
        order.push_back(parse_int(field, "assignment order"));
    }
    if (order.empty()) throw InputError("assignment order is empty");
    return order;
}

struct CommonOpts {
    std::string roster;
    std::string collaborations;
    std::string outcomes;
    std::string order_text = "1,2,3,4,5,6";
    int snapshot = 0; // 0 = last
    double alpha = 0.85;
    double tol = 1e-12;
    int restarts = 10;
    std::uint64_t seed = 42;
    bool aicc = false;
    std::string outdir = "out";
    std::string config_path;

    /// Loads `key = value` lines ('#' comments allowed). Applied before flag
    /// parsing, so flags win over file values.
    void apply_config_file(const std::string& path) {
        auto in = open_input(path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string text = trim(line);
            if (text.empty() || text[0] == '#') continue;
            const auto eq = text.find('=');
            const std::string where = "config " + path + " line " + std::to_string(lineno);
            if (eq == std::string::npos) throw InputError(where + ": expected key=value");
            const std::string key = trim(text.substr(0, eq));
            const std::string value = trim(text.substr(eq + 1));
            if (key == "roster") roster = value;
            else if (key == "collaborations") collaborations = value;
            else if (key == "outcomes") outcomes = value;
            else if (key == "order") order_text = value;
            else if (key == "snapshot") snapshot = parse_int(value, where);
            else if (key == "alpha") alpha = parse_double(value, where);
            else if (key == "tol") tol = parse_double(value, where);
            else if (key == "restarts") restarts = parse_int(value, where);
            else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(value, where));
            else if (key == "aicc") aicc = value == "true" || value == "1";
            else if (key == "outdir") outdir = value;
            else throw InputError(where + ": unknown key '" + key + "'");
        }
    }

    RunConfig to_run_config() const {
        RunConfig config;
        config.roster_path = roster;
        config.collaborations_path = collaborations;
        config.outcomes_path = outcomes;
        config.assignment_order = parse_order(order_text);
        config.snapshot_position = snapshot;
        config.alpha = alpha;
        config.ppr_tol = tol;
        config.infomap_restarts = restarts;
        config.seed = seed;
        config.use_aicc = aicc;
        config.out_dir = outdir;
        return config;
    }
};

void add_common_options(CLI::App* sub, CommonOpts& opts, bool with_outcomes, bool with_model) {
    // Required inputs may come from a --config file instead of flags; the
    // check runs after both are merged.
    sub->add_option("--roster", opts.roster, "Roster file (id,sat,confidence_<k>,interest_<k>)");
    sub->add_option("--collaborations", opts.collaborations,
                    "Collaboration file (assignment,reporter,collaborators)");
    if (with_outcomes) {
        sub->add_option("--outcomes", opts.outcomes, "Outcome file (id,score)");
    }
    sub->add_option("--order", opts.order_text,
                    "Comma-separated assignment ordinals in chronological order");
    sub->add_option("--snapshot", opts.snapshot,
                    "1-based snapshot position within the order (default: last)");
    sub->add_option("--alpha", opts.alpha, "PageRank follow-edge probability");
    sub->add_option("--tol", opts.tol, "Power-iteration L1 tolerance");
    if (with_model) {
        sub->add_option("--restarts", opts.restarts, "Infomap restarts");
        sub->add_option("--seed", opts.seed, "Run seed; all stage randomness derives from it");
        sub->add_flag("--aicc", opts.aicc, "Select by small-sample corrected AIC");
    }
    sub->add_option("--outdir", opts.outdir, "Output directory");
    sub->add_option("--config", opts.config_path,
                    "Key=value configuration file; flags win over file values");
}

void require_inputs(const CommonOpts& opts, bool with_outcomes) {
    if (opts.roster.empty()) throw InputError("missing --roster (flag or config file)");
    if (opts.collaborations.empty()) throw InputError("missing --collaborations (flag or config file)");
    if (with_outcomes && opts.outcomes.empty()) {
        throw InputError("missing --outcomes (flag or config file)");
    }
}

/// Pre-scan for --config so file values are loaded before CLI11 assigns the
/// flag values on top of them.
std::string find_config_argument(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

struct LoadedInputs {
    Roster roster;
    std::vector<CollaborationReport> reports;
    std::vector<Snapshot> snapshots;
    int position = 1;
};

LoadedInputs load_inputs(const CommonOpts& opts) {
    LoadedInputs in;
    auto roster_in = open_input(opts.roster);
    in.roster = ingest_roster(roster_in);
    auto reports_in = open_input(opts.collaborations);
    in.reports = ingest_reports(reports_in, in.roster);
    const auto order = parse_order(opts.order_text);
    in.snapshots = build_snapshots(in.reports, in.roster, order);
    in.position = opts.snapshot == 0 ? static_cast<int>(order.size()) : opts.snapshot;
    if (in.position < 1 || in.position > static_cast<int>(in.snapshots.size())) {
        throw InputError("snapshot position out of range");
    }
    return in;
}

Metadata metadata_for(const CommonOpts& opts) {
    return opts.to_run_config().metadata();
}

int cmd_ingest(const CommonOpts& opts) {
    auto roster_in = open_input(opts.roster);
    const Roster roster = ingest_roster(roster_in);
    auto reports_in = open_input(opts.collaborations);
    const auto reports = ingest_reports(reports_in, roster);
    std::set<int> assignments;
    std::size_t pairs = 0;
    for (const auto& rep : reports) {
        assignments.insert(rep.assignment);
        pairs += rep.collaborators.size();
    }
    int with_sat = 0;
    for (const auto& s : roster.students) with_sat += s.sat.has_value();
    std::cout << "roster: " << roster.size() << " students (" << with_sat << " with sat)\n";
    std::cout << "reports: " << reports.size() << " rows, " << pairs << " collaborator listings, "
              << assignments.size() << " distinct assignments\n";
    if (!opts.outcomes.empty()) {
        auto outcomes_in = open_input(opts.outcomes);
        const auto outcomes = read_outcomes(outcomes_in);
        std::cout << "outcomes: " << outcomes.size() << " scores\n";
    }
    return 0;
}

int cmd_snapshots(const CommonOpts& opts) {
    const LoadedInputs in = load_inputs(opts);
    const Metadata meta = metadata_for(opts);
    fs::create_directories(opts.outdir);
    auto growth = open_output((fs::path(opts.outdir) / "edge_growth.csv").string());
    write_edge_growth(growth, edge_growth_table(in.snapshots), meta);
    for (const auto& snapshot : in.snapshots) {
        auto out = open_output(
            (fs::path(opts.outdir) / ("edgelist_" + std::to_string(snapshot.assignment()) + ".csv"))
                .string());
        write_edgelist_artifact(out, snapshot, meta);
    }
    std::cout << "wrote edge growth table and " << in.snapshots.size() << " edgelists to "
              << opts.outdir << "\n";
    return 0;
}

int cmd_centrality(const CommonOpts& opts) {
    const LoadedInputs in = load_inputs(opts);
    const Snapshot& snapshot = in.snapshots[static_cast<std::size_t>(in.position - 1)];
    PagerankOptions pr{opts.alpha, opts.tol, 2000};
    std::vector<CentralityScores> scores;
    scores.push_back(degree(snapshot));
    scores.push_back(log_degree(snapshot));
    scores.push_back(pagerank(snapshot, pr));
    scores.push_back(target_entropy(snapshot));
    scores.push_back(hide(snapshot));
    fs::create_directories(opts.outdir);
    auto out = open_output((fs::path(opts.outdir) / "centrality.csv").string());
    write_centrality(out, snapshot, scores, metadata_for(opts));
    std::cout << "wrote centrality.csv to " << opts.outdir << "\n";
    return 0;
}

CommunityOutputs communities_for(const CommonOpts& opts, const Snapshot& snapshot) {
    PprOptions ppr{opts.alpha, opts.tol, 2000};
    InfomapOptions im{opts.restarts, Rng(opts.seed).split("infomap").next_u64()};
    return compute_community_outputs(snapshot, ppr, im);
}

int cmd_communities(const CommonOpts& opts) {
    const LoadedInputs in = load_inputs(opts);
    const Snapshot& snapshot = in.snapshots[static_cast<std::size_t>(in.position - 1)];
    const CommunityOutputs community = communities_for(opts, snapshot);
    const Metadata meta = metadata_for(opts);
    fs::create_directories(opts.outdir);
    auto pout = open_output((fs::path(opts.outdir) / "partition.csv").string());
    write_partition(pout, snapshot, community.partition, meta);
    auto wout = open_output((fs::path(opts.outdir) / "ppr.csv").string());
    write_ppr_matrix(wout, snapshot, community.ppr, meta);
    std::cout << "infomap: " << community.partition.num_communities << " communities, codelength "
              << fmt12(community.partition.codelength) << " bits\n";
    return 0;
}

int cmd_features(const CommonOpts& opts) {
    const LoadedInputs in = load_inputs(opts);
    const Snapshot& snapshot = in.snapshots[static_cast<std::size_t>(in.position - 1)];
    const CommunityOutputs community = communities_for(opts, snapshot);
    const FeatureTable table =
        assemble_features(snapshot, in.roster, community, parse_order(opts.order_text), in.position);
    const std::vector<int> rows = complete_case_rows(snapshot, table);
    const Metadata meta = metadata_for(opts);
    fs::create_directories(opts.outdir);
    for (ModelFamily family : all_families()) {
        const PredictorMatrix matrix = build_predictor_matrix(snapshot, table, family, rows);
        auto out = open_output(
            (fs::path(opts.outdir) / (std::string("predictor_matrix_") + family_name(family) + ".csv"))
                .string());
        write_predictor_matrix(out, matrix, meta);
    }
    std::cout << "wrote 4 predictor matrices (" << rows.size() << " rows) to " << opts.outdir << "\n";
    return 0;
}

int cmd_select(const CommonOpts& opts) {
    const LoadedInputs in = load_inputs(opts);
    const Snapshot& snapshot = in.snapshots[static_cast<std::size_t>(in.position - 1)];
    auto outcomes_in = open_input(opts.outcomes);
    const auto outcomes = read_outcomes(outcomes_in);
    ComparisonConfig config;
    config.assignment_order = parse_order(opts.order_text);
    config.position = in.position;
    config.ppr = PprOptions{opts.alpha, opts.tol, 2000};
    config.infomap = InfomapOptions{opts.restarts, Rng(opts.seed).split("infomap").next_u64()};
    config.use_aicc = opts.aicc;
    const FamilyReport report = family_comparison(snapshot, in.roster, outcomes, config);
    const Metadata meta = metadata_for(opts);
    fs::create_directories(opts.outdir);
    auto fout = open_output((fs::path(opts.outdir) / "family_report.csv").string());
    write_family_report(fout, report, meta);
    auto bout = open_output((fs::path(opts.outdir) / "best_model.csv").string());
    write_best_model(bout, report, meta);
    std::cout << "optimal family: " << family_name(report.best().family) << "\n";
    return 0;
}

struct SynthOpts {
    SynthConfig config;
    std::string outdir = "synth";
};

int cmd_synth(const SynthOpts& opts) {
    const SynthCohort cohort = generate_cohort(opts.config);
    Metadata meta;
    meta.set("seed", static_cast<long>(opts.config.seed));
    meta.set("students", static_cast<long>(opts.config.students));
    meta.set("communities", static_cast<long>(opts.config.communities));
    meta.set("p_in", opts.config.p_in);
    meta.set("p_out", opts.config.p_out);
    meta.set("beta_self", opts.config.beta_self);
    meta.set("beta_comm", opts.config.beta_comm);
    meta.set("noise_sigma", opts.config.noise_sigma);
    meta.set("attr_noise", opts.config.attr_noise);
    meta.set("waves", static_cast<long>(opts.config.waves));
    fs::create_directories(opts.outdir);
    auto rout = open_output((fs::path(opts.outdir) / "roster.csv").string());
    write_roster(rout, cohort.roster, meta);
    auto cout_file = open_output((fs::path(opts.outdir) / "collaborations.csv").string());
    write_reports(cout_file, cohort.reports, meta);
    auto oout = open_output((fs::path(opts.outdir) / "outcomes.csv").string());
    write_outcomes(oout, cohort.outcomes, meta);
    std::cout << "cohort: " << opts.config.students << " students, "
              << cohort.diagnostics.edge_count << " edges (expected "
              << fmt12(cohort.diagnostics.expected_edges) << ")\n";
    if (cohort.diagnostics.edge_count_flagged) {
        std::cerr << "warning: edge count further than 5 sd from expectation\n";
    }
    return 0;
}

struct ReportOpts {
    std::string family_report;
    std::string best_model;
    std::string out;
};

int cmd_report(const ReportOpts& opts) {
    auto fin = open_input(opts.family_report);
    const auto families = read_family_report(fin);
    std::vector<BestModelRow> model_rows;
    if (!opts.best_model.empty()) {
        auto min = open_input(opts.best_model);
        model_rows = read_best_model(min);
    }
    if (opts.out.empty()) {
        render_report_text(std::cout, families, model_rows);
    } else {
        auto out = open_output(opts.out);
        render_report_text(out, families, model_rows);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"collabnet: collaboration-network predictors of academic outcomes"};
    app.require_subcommand(1);

    CommonOpts ingest_opts, snapshots_opts, centrality_opts, communities_opts, features_opts,
        select_opts, run_opts;
    SynthOpts synth_opts;
    ReportOpts report_opts;

    auto* ingest = app.add_subcommand("ingest", "Validate inputs and print a summary");
    ingest->add_option("--roster", ingest_opts.roster, "Roster file");
    ingest->add_option("--collaborations", ingest_opts.collaborations, "Collaboration file");
    ingest->add_option("--outcomes", ingest_opts.outcomes, "Outcome file (optional)");
    ingest->add_option("--config", ingest_opts.config_path,
                       "Key=value configuration file; flags win over file values");

    auto* snapshots = app.add_subcommand("snapshots", "Build cumulative snapshots and edge growth");
    add_common_options(snapshots, snapshots_opts, false, false);

    auto* centrality = app.add_subcommand("centrality", "Compute all centrality measures");
    add_common_options(centrality, centrality_opts, false, false);

    auto* communities = app.add_subcommand("communities", "Personalized PageRank and Infomap");
    add_common_options(communities, communities_opts, false, true);

    auto* features = app.add_subcommand("features", "Build the per-family predictor matrices");
    add_common_options(features, features_opts, false, true);

    auto* select = app.add_subcommand("select", "Best-subset selection and family comparison");
    add_common_options(select, select_opts, true, true);

    auto* run = app.add_subcommand("run", "Full pipeline: ingest through report");
    add_common_options(run, run_opts, true, true);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
    synth->add_option("--students", synth_opts.config.students, "Cohort size");
    synth->add_option("--communities", synth_opts.config.communities, "Planted community count");
    synth->add_option("--p-in", synth_opts.config.p_in, "In-community edge probability");
    synth->add_option("--p-out", synth_opts.config.p_out, "Cross-community edge probability");
    synth->add_option("--beta-self", synth_opts.config.beta_self, "Outcome weight on own ability");
    synth->add_option("--beta-comm", synth_opts.config.beta_comm,
                      "Outcome weight on community-mean ability");
    synth->add_option("--noise", synth_opts.config.noise_sigma, "Outcome noise scale");
    synth->add_option("--attr-noise", synth_opts.config.attr_noise, "Attribute noise scale");
    synth->add_option("--seed", synth_opts.config.seed, "Generator seed");
    synth->add_option("--waves", synth_opts.config.waves,
                      "Spread edges over this many pseudo-assignments");
    synth->add_option("--out", synth_opts.outdir, "Directory for roster/collaborations/outcomes");

    auto* report = app.add_subcommand("report", "Render a family report as text tables");
    report->add_option("--input", report_opts.family_report, "family_report.csv path")->required();
    report->add_option("--model", report_opts.best_model, "best_model.csv path (optional)");
    report->add_option("--out", report_opts.out, "Output file (default: stdout)");

    const std::string config_path = find_config_argument(argc, argv);
    if (!config_path.empty()) {
        try {
            for (CommonOpts* opts : {&ingest_opts, &snapshots_opts, &centrality_opts,
                                     &communities_opts, &features_opts, &select_opts, &run_opts}) {
                opts->apply_config_file(config_path);
            }
        } catch (const collabnet::InputError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) {
            require_inputs(ingest_opts, false);
            return cmd_ingest(ingest_opts);
        }
        if (snapshots->parsed()) {
            require_inputs(snapshots_opts, false);
            return cmd_snapshots(snapshots_opts);
        }
        if (centrality->parsed()) {
            require_inputs(centrality_opts, false);
            return cmd_centrality(centrality_opts);
        }
        if (communities->parsed()) {
            require_inputs(communities_opts, false);
            return cmd_communities(communities_opts);
        }
        if (features->parsed()) {
            require_inputs(features_opts, false);
            return cmd_features(features_opts);
        }
        if (select->parsed()) {
            require_inputs(select_opts, true);
            return cmd_select(select_opts);
        }
        if (synth->parsed()) return cmd_synth(synth_opts);
        if (report->parsed()) return cmd_report(report_opts);
        if (run->parsed()) {
            require_inputs(run_opts, true);
            const PipelineResult result = run_pipeline(run_opts.to_run_config());
            std::cout << "wrote " << result.files_written.size() << " artifacts to "
                      << run_opts.outdir << "\n";
            std::cout << "optimal family: " << family_name(result.report.best().family) << "\n";
            return 0;
        }
    } catch (const collabnet::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const collabnet::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
