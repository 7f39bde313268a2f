#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "collabnet/centrality.hpp"
#include "collabnet/common.hpp"
#include "collabnet/community.hpp"
#include "collabnet/features.hpp"
#include "collabnet/graph.hpp"
#include "collabnet/model.hpp"
#include "collabnet/synth.hpp"

namespace collabnet {

/// Shortest repeatable decimal form with up to 12 significant digits.
inline std::string fmt12(double x) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", x);
    return buffer;
}

/// Deterministic '#'-prefixed metadata block carried by every artifact.
/// Never includes timestamps: identical runs must produce identical bytes.
struct Metadata {
    std::vector<std::pair<std::string, std::string>> entries;

    Metadata& set(std::string key, std::string value) {
        entries.emplace_back(std::move(key), std::move(value));
        return *this;
    }
    Metadata& set(std::string key, double value) { return set(std::move(key), fmt12(value)); }
    Metadata& set(std::string key, long value) { return set(std::move(key), std::to_string(value)); }

    void write(std::ostream& out) const {
        out << "# " << kToolVersion << '\n';
        for (const auto& [key, value] : entries) {
            out << "# " << key << " = " << value << '\n';
        }
    }
};

inline void write_edge_growth(std::ostream& out, const std::vector<GrowthRow>& rows,
                              const Metadata& meta) {
    meta.write(out);
    out << "assignment,nodes,edges\n";
    for (const auto& row : rows) {
        out << row.assignment << ',' << row.nodes << ',' << row.edges << '\n';
    }
}

inline void write_edgelist_artifact(std::ostream& out, const Snapshot& snapshot, const Metadata& meta) {
    meta.write(out);
    export_edgelist(snapshot, out);
}

/// `id,measure,value` rows for a set of measures; undefined cells (log-degree
/// of isolated students) are omitted.
inline void write_centrality(std::ostream& out, const Snapshot& snapshot,
                             const std::vector<CentralityScores>& scores, const Metadata& meta) {
    meta.write(out);
    out << "id,measure,value\n";
    for (const auto& score : scores) {
        for (int u = 0; u < snapshot.size(); ++u) {
            const auto& cell = score.values[static_cast<std::size_t>(u)];
            if (!cell) continue;
            out << snapshot.id_of(u) << ',' << measure_name(score.measure) << ',' << fmt12(*cell)
                << '\n';
        }
    }
}

inline void write_partition(std::ostream& out, const Snapshot& snapshot, const Partition& partition,
                            Metadata meta) {
    meta.set("num_communities", static_cast<long>(partition.num_communities));
    meta.set("switch_rate_q", partition.switch_rate);
    meta.set("codelength_bits", partition.codelength);
    meta.write(out);
    out << "id,community_label\n";
    for (int u = 0; u < snapshot.size(); ++u) {
        out << snapshot.id_of(u) << ',' << partition.labels[static_cast<std::size_t>(u)] << '\n';
    }
}

/// `focal_id,node_id,weight` rows; weights below 1e-12 are omitted.
inline void write_ppr_matrix(std::ostream& out, const Snapshot& snapshot,
                             const std::vector<PprVector>& pprs, const Metadata& meta) {
    meta.write(out);
    out << "focal_id,node_id,weight\n";
    for (const auto& ppr : pprs) {
        for (int u = 0; u < snapshot.size(); ++u) {
            const double w = ppr.weights[static_cast<std::size_t>(u)];
            if (w < 1e-12) continue;
            out << snapshot.id_of(ppr.focal) << ',' << snapshot.id_of(u) << ',' << fmt12(w) << '\n';
        }
    }
}

inline void write_predictor_matrix(std::ostream& out, const PredictorMatrix& matrix,
                                   const Metadata& meta) {
    meta.write(out);
    out << "id";
    for (const auto& column : matrix.columns) out << ',' << column;
    out << '\n';
    for (int r = 0; r < matrix.rows(); ++r) {
        out << matrix.row_ids[static_cast<std::size_t>(r)];
        for (int c = 0; c < matrix.cols(); ++c) out << ',' << fmt12(matrix.at(r, c));
        out << '\n';
    }
}

inline std::string join_predictors(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& name : names) {
        if (!out.empty()) out += ';';
        out += name;
    }
    return out.empty() ? "(intercept only)" : out;
}

inline void write_family_report(std::ostream& out, const FamilyReport& report, const Metadata& meta) {
    meta.write(out);
    out << "family,r2,aic,evidence_ratio,selected_predictors\n";
    for (const auto& row : report.rows) {
        out << family_name(row.family) << ',' << fmt12(row.fit.r2) << ',' << fmt12(row.criterion)
            << ',' << fmt12(row.evidence_ratio) << ',' << join_predictors(row.spec.predictors)
            << '\n';
    }
}

/// Per-term rows of the overall optimal model.
inline void write_best_model(std::ostream& out, const FamilyReport& report, const Metadata& meta) {
    meta.write(out);
    const FamilyResult& best = report.best();
    out << "term,coefficient,ci95_lo,ci95_hi,p_value\n";
    for (std::size_t j = 0; j < best.fit.terms.size(); ++j) {
        out << best.fit.terms[j] << ',' << fmt12(best.fit.coefficients[j]) << ','
            << fmt12(best.fit.ci_lo[j]) << ',' << fmt12(best.fit.ci_hi[j]) << ','
            << fmt12(best.fit.p_values[j]) << '\n';
    }
}

inline void write_outcomes(std::ostream& out, const std::vector<std::pair<std::string, double>>& outcomes,
                           const Metadata& meta) {
    meta.write(out);
    out << "id,score\n";
    for (const auto& [id, score] : outcomes) {
        out << id << ',' << fmt12(score) << '\n';
    }
}

/// Roster writer used by the synth stage; emits wave-1 attribute columns.
inline void write_roster(std::ostream& out, const Roster& roster, const Metadata& meta) {
    meta.write(out);
    out << "id,sat,confidence_1,interest_1\n";
    for (const auto& student : roster.students) {
        out << student.id << ',';
        if (student.sat) out << fmt12(*student.sat);
        out << ',';
        if (auto it = student.confidence.find(1); it != student.confidence.end()) out << fmt12(it->second);
        out << ',';
        if (auto it = student.interest.find(1); it != student.interest.end()) out << fmt12(it->second);
        out << '\n';
    }
}

inline void write_reports(std::ostream& out, const std::vector<CollaborationReport>& reports,
                          const Metadata& meta) {
    meta.write(out);
    out << "assignment,reporter,collaborators\n";
    for (const auto& rep : reports) {
        out << rep.assignment << ',' << rep.reporter << ',';
        for (std::size_t i = 0; i < rep.collaborators.size(); ++i) {
            if (i) out << ';';
            out << rep.collaborators[i];
        }
        out << '\n';
    }
}

inline std::map<std::string, double> read_outcomes(std::istream& in) {
    auto lines = detail::read_csv_lines(in);
    if (lines.empty()) throw InputError("outcomes: empty file");
    const auto header = split_fields(lines[0].second, ',');
    if (header.size() != 2 || header[0] != "id" || header[1] != "score") {
        throw InputError("outcomes: header must be 'id,score'");
    }
    std::map<std::string, double> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [lineno, line] = lines[r];
        const std::string where = "outcomes row " + std::to_string(lineno);
        const auto fields = split_fields(line, ',');
        if (fields.size() != 2) throw InputError(where + ": expected 'id,score'");
        if (!out.emplace(fields[0], parse_double(fields[1], where)).second) {
            throw InputError(where + ": duplicate id " + fields[0]);
        }
    }
    return out;
}

/// Rows of a machine-readable family report, for the text renderer.
struct FamilyReportRow {
    std::string family;
    double r2 = 0.0;
    double aic = 0.0;
    double evidence_ratio = 0.0;
    std::string selected_predictors;
};

inline std::vector<FamilyReportRow> read_family_report(std::istream& in) {
    auto lines = detail::read_csv_lines(in);
    if (lines.empty()) throw InputError("family report: empty file");
    const auto header = split_fields(lines[0].second, ',');
    if (header.size() != 5 || header[0] != "family") {
        throw InputError("family report: unexpected header");
    }
    std::vector<FamilyReportRow> rows;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [lineno, line] = lines[r];
        const std::string where = "family report row " + std::to_string(lineno);
        const auto fields = split_fields(line, ',');
        if (fields.size() != 5) throw InputError(where + ": expected 5 fields");
        rows.push_back({fields[0], parse_double(fields[1], where), parse_double(fields[2], where),
                        parse_double(fields[3], where), fields[4]});
    }
    return rows;
}

struct BestModelRow {
    std::string term;
    double coefficient = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double p_value = 0.0;
};

inline std::vector<BestModelRow> read_best_model(std::istream& in) {
    auto lines = detail::read_csv_lines(in);
    if (lines.empty()) throw InputError("best model: empty file");
    std::vector<BestModelRow> rows;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [lineno, line] = lines[r];
        const std::string where = "best model row " + std::to_string(lineno);
        const auto fields = split_fields(line, ',');
        if (fields.size() != 5) throw InputError(where + ": expected 5 fields");
        rows.push_back({fields[0], parse_double(fields[1], where), parse_double(fields[2], where),
                        parse_double(fields[3], where), parse_double(fields[4], where)});
    }
    return rows;
}

namespace detail {

inline std::string pad_right(std::string s, std::size_t width) {
    while (s.size() < width) s += ' ';
    return s;
}

inline std::string round_to(double x, int digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", digits, x);
    return buffer;
}

} // namespace detail

/// Human-readable rendering of the family comparison plus the optimal model's
/// coefficient table.
inline void render_report_text(std::ostream& out, const std::vector<FamilyReportRow>& families,
                               const std::vector<BestModelRow>& best_model) {
    out << "Model family comparison\n";
    out << "-----------------------\n";
    out << detail::pad_right("Family", 22) << detail::pad_right("R^2", 9)
        << detail::pad_right("Evidence Ratio", 16) << "Selected predictors\n";
    for (const auto& row : families) {
        out << detail::pad_right(row.family, 22) << detail::pad_right(detail::round_to(row.r2, 3), 9)
            << detail::pad_right(detail::round_to(row.evidence_ratio, 2), 16)
            << row.selected_predictors << '\n';
    }
    out << '\n';
    out << "Overall optimal model\n";
    out << "---------------------\n";
    out << detail::pad_right("Term", 22) << detail::pad_right("Coefficient", 13)
        << detail::pad_right("95% CI", 22) << "p-value\n";
    for (const auto& row : best_model) {
        out << detail::pad_right(row.term, 22)
            << detail::pad_right(detail::round_to(row.coefficient, 2), 13)
            << detail::pad_right("(" + detail::round_to(row.ci_lo, 2) + ", " +
                                     detail::round_to(row.ci_hi, 2) + ")",
                                 22)
            << detail::round_to(row.p_value, 4) << '\n';
    }
}

/// Opens a file for writing, throwing InputError on failure.
inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open output file: " + path);
    return out;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open input file: " + path);
    return in;
}

} // namespace collabnet
