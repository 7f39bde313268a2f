#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "collabnet/centrality.hpp"
#include "collabnet/common.hpp"
#include "collabnet/community.hpp"
#include "collabnet/graph.hpp"

namespace collabnet {

enum class Attribute { confidence, interest, sat };

inline const char* attribute_name(Attribute a) {
    switch (a) {
    case Attribute::confidence: return "confidence";
    case Attribute::interest: return "interest";
    case Attribute::sat: return "sat";
    }
    return "?";
}

/// Per-node attribute values aligned with roster/snapshot node indices.
struct AttributeVector {
    Attribute attribute;
    std::vector<std::optional<double>> values;
};

/**
 * Attribute values as of snapshot position `position` (1-based index into
 * `assignment_order`). Confidence and interest use the latest report at or
 * before that position; students with no report keep the attribute missing.
 * SAT is static.
 */
inline AttributeVector attribute_values(const Roster& roster, Attribute attr,
                                        const std::vector<int>& assignment_order, int position) {
    if (position < 1 || position > static_cast<int>(assignment_order.size())) {
        throw InputError("attribute values: snapshot position out of range");
    }
    AttributeVector out{attr, {}};
    out.values.reserve(roster.students.size());
    for (const auto& student : roster.students) {
        if (attr == Attribute::sat) {
            out.values.push_back(student.sat);
            continue;
        }
        const auto& series = attr == Attribute::confidence ? student.confidence : student.interest;
        std::optional<double> value;
        for (int t = position - 1; t >= 0; --t) { // last observation carried forward
            auto it = series.find(assignment_order[static_cast<std::size_t>(t)]);
            if (it != series.end()) {
                value = it->second;
                break;
            }
        }
        out.values.push_back(value);
    }
    return out;
}

/**
 * PPR-weighted community average of an attribute for the vector's focal
 * student: the focal node is excluded and the remaining positive weights are
 * renormalized over peers with a value present.
 */
inline double ppr_weighted_average(const PprVector& ppr, const AttributeVector& attr) {
    if (ppr.weights.size() != attr.values.size()) {
        throw InputError("ppr weighted average: size mismatch");
    }
    double weight_sum = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < ppr.weights.size(); ++j) {
        if (static_cast<int>(j) == ppr.focal) continue;
        if (!attr.values[j]) continue;
        const double w = ppr.weights[j];
        if (w <= 0.0) continue;
        weight_sum += w;
        weighted += w * *attr.values[j];
    }
    if (weight_sum <= 0.0) {
        throw NumericError(std::string("undefined community average: no usable peer for ") +
                           attribute_name(attr.attribute));
    }
    return weighted / weight_sum;
}

/// Plain mean of the attribute over the focal student's community, excluding
/// the student and peers with missing values.
inline double infomap_community_average(const Partition& partition, int focal,
                                        const AttributeVector& attr) {
    if (partition.labels.size() != attr.values.size()) {
        throw InputError("infomap community average: size mismatch");
    }
    if (focal < 0 || focal >= static_cast<int>(partition.labels.size())) {
        throw InputError("infomap community average: focal node out of range");
    }
    const int community = partition.labels[static_cast<std::size_t>(focal)];
    double sum = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < partition.labels.size(); ++j) {
        if (static_cast<int>(j) == focal) continue;
        if (partition.labels[j] != community) continue;
        if (!attr.values[j]) continue;
        sum += *attr.values[j];
        ++count;
    }
    if (count == 0) {
        throw NumericError(std::string("undefined community average: ") +
                           "singleton community or all peers missing for " +
                           attribute_name(attr.attribute));
    }
    return sum / static_cast<double>(count);
}

/// Model families, in report order.
enum class ModelFamily { baseline, centrality, infomap_community, ppr_community };

inline const char* family_name(ModelFamily f) {
    switch (f) {
    case ModelFamily::baseline: return "baseline";
    case ModelFamily::centrality: return "centrality";
    case ModelFamily::infomap_community: return "infomap";
    case ModelFamily::ppr_community: return "pagerank";
    }
    return "?";
}

inline const std::vector<ModelFamily>& all_families() {
    static const std::vector<ModelFamily> families = {
        ModelFamily::baseline, ModelFamily::centrality,
        ModelFamily::infomap_community, ModelFamily::ppr_community};
    return families;
}

/// Predictor columns allowed in each family.
inline std::vector<std::string> family_columns(ModelFamily f) {
    std::vector<std::string> cols = {"confidence", "interest", "sat"};
    if (f == ModelFamily::baseline) return cols;
    cols.insert(cols.end(), {"log_degree", "target_entropy", "hide"});
    if (f == ModelFamily::centrality) return cols;
    if (f == ModelFamily::ppr_community) {
        cols.insert(cols.end(), {"pagerank_confidence", "pagerank_interest", "pagerank_sat"});
    } else {
        cols.insert(cols.end(), {"infomap_confidence", "infomap_interest", "infomap_sat"});
    }
    return cols;
}

/// Community structure inputs shared by the feature builders: one PPR vector
/// per node plus the Infomap partition.
struct CommunityOutputs {
    std::vector<PprVector> ppr;
    Partition partition;
};

inline CommunityOutputs compute_community_outputs(const Snapshot& g, const PprOptions& ppr_opts = {},
                                                  const InfomapOptions& infomap_opts = {}) {
    CommunityOutputs out;
    out.ppr.reserve(static_cast<std::size_t>(g.size()));
    for (int u = 0; u < g.size(); ++u) {
        out.ppr.push_back(personalized_pagerank(g, u, ppr_opts));
    }
    out.partition = infomap(g, infomap_opts);
    return out;
}

/// Every candidate predictor for every student, with holes where a value is
/// undefined. Columns are in the canonical order of the full predictor set.
struct FeatureTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> values; // [column][node]
};

inline FeatureTable assemble_features(const Snapshot& g, const Roster& roster,
                                      const CommunityOutputs& community,
                                      const std::vector<int>& assignment_order, int position) {
    if (roster.size() != g.size()) {
        throw InputError("assemble features: roster and snapshot node sets differ");
    }
    const int n = g.size();
    FeatureTable table;
    table.columns = family_columns(ModelFamily::centrality);
    for (const auto& c : {std::string("pagerank_confidence"), std::string("pagerank_interest"),
                          std::string("pagerank_sat"), std::string("infomap_confidence"),
                          std::string("infomap_interest"), std::string("infomap_sat")}) {
        table.columns.push_back(c);
    }
    table.values.assign(table.columns.size(), std::vector<std::optional<double>>(static_cast<std::size_t>(n)));

    const AttributeVector attrs[3] = {
        attribute_values(roster, Attribute::confidence, assignment_order, position),
        attribute_values(roster, Attribute::interest, assignment_order, position),
        attribute_values(roster, Attribute::sat, assignment_order, position)};

    const CentralityScores ld = log_degree(g);
    const CentralityScores te = target_entropy(g);
    const CentralityScores hd = hide(g);

    auto col = [&](const std::string& name) -> std::vector<std::optional<double>>& {
        auto it = std::find(table.columns.begin(), table.columns.end(), name);
        return table.values[static_cast<std::size_t>(it - table.columns.begin())];
    };

    for (int a = 0; a < 3; ++a) col(attribute_name(attrs[a].attribute)) = attrs[a].values;
    col("log_degree") = ld.values;
    col("target_entropy") = te.values;
    col("hide") = hd.values;

    for (int a = 0; a < 3; ++a) {
        auto& ppr_col = col(std::string("pagerank_") + attribute_name(attrs[a].attribute));
        auto& im_col = col(std::string("infomap_") + attribute_name(attrs[a].attribute));
        for (int u = 0; u < n; ++u) {
            try {
                ppr_col[static_cast<std::size_t>(u)] =
                    ppr_weighted_average(community.ppr[static_cast<std::size_t>(u)], attrs[a]);
            } catch (const NumericError&) {
                // undefined community average: leave the cell missing
            }
            try {
                im_col[static_cast<std::size_t>(u)] =
                    infomap_community_average(community.partition, u, attrs[a]);
            } catch (const NumericError&) {
            }
        }
    }
    return table;
}

/// Students usable in every family's model: degree >= 1 and every candidate
/// predictor defined. The shared set keeps AIC comparisons on one likelihood
/// support.
inline std::vector<int> complete_case_rows(const Snapshot& g, const FeatureTable& table) {
    std::vector<int> rows;
    for (int u = 0; u < g.size(); ++u) {
        if (g.degree(u) == 0) continue;
        bool complete = true;
        for (const auto& column : table.values) {
            if (!column[static_cast<std::size_t>(u)]) {
                complete = false;
                break;
            }
        }
        if (complete) rows.push_back(u);
    }
    return rows;
}

/// Design data for one family: rows are shared across families.
struct PredictorMatrix {
    std::vector<std::string> row_ids;
    std::vector<int> row_nodes; // node indices behind row_ids
    std::vector<std::string> columns;
    std::vector<double> data; // row-major

    int rows() const { return static_cast<int>(row_ids.size()); }
    int cols() const { return static_cast<int>(columns.size()); }
    double at(int r, int c) const {
        return data.at(static_cast<std::size_t>(r) * columns.size() + static_cast<std::size_t>(c));
    }
    int column_index(const std::string& name) const {
        auto it = std::find(columns.begin(), columns.end(), name);
        return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
    }
};

/// Builds one family's matrix from an assembled feature table, restricted to
/// the given rows (normally the shared complete-case set).
inline PredictorMatrix build_predictor_matrix(const Snapshot& g, const FeatureTable& table,
                                              ModelFamily family, const std::vector<int>& rows) {
    if (rows.empty()) throw InputError("predictor matrix: empty row set");
    PredictorMatrix m;
    m.columns = family_columns(family);
    m.row_nodes = rows;
    m.row_ids.reserve(rows.size());
    for (int u : rows) m.row_ids.push_back(g.id_of(u));
    m.data.reserve(rows.size() * m.columns.size());
    for (int u : rows) {
        for (const auto& name : m.columns) {
            auto it = std::find(table.columns.begin(), table.columns.end(), name);
            const auto& cell = table.values[static_cast<std::size_t>(it - table.columns.begin())]
                                           [static_cast<std::size_t>(u)];
            if (!cell) throw InputError("predictor matrix: row set is not complete-case");
            m.data.push_back(*cell);
        }
    }
    return m;
}

/// Convenience form matching the pipeline call site: assembles features and
/// uses the shared complete-case rows.
inline PredictorMatrix build_predictor_matrix(const Snapshot& g, const Roster& roster,
                                              ModelFamily family, const CommunityOutputs& community,
                                              const std::vector<int>& assignment_order, int position) {
    const FeatureTable table = assemble_features(g, roster, community, assignment_order, position);
    return build_predictor_matrix(g, table, family, complete_case_rows(g, table));
}

} // namespace collabnet
