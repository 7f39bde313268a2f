#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "collabnet/common.hpp"

namespace collabnet {

/// One student row from the roster file. Attribute values are optional;
/// confidence/interest are keyed by assignment ordinal.
struct StudentRecord {
    std::string id;
    std::optional<double> sat;
    std::map<int, double> confidence;
    std::map<int, double> interest;
};

/// The full study population, sorted by id. Node indices everywhere in the
/// toolkit are positions in this sorted order.
struct Roster {
    std::vector<StudentRecord> students;
    double likert_min = 1.0;
    double likert_max = 5.0;

    int size() const { return static_cast<int>(students.size()); }

    int index_of(const std::string& id) const {
        auto it = std::lower_bound(students.begin(), students.end(), id,
                                   [](const StudentRecord& r, const std::string& key) { return r.id < key; });
        if (it == students.end() || it->id != id) return -1;
        return static_cast<int>(it - students.begin());
    }

    const StudentRecord& at(int index) const { return students.at(static_cast<std::size_t>(index)); }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        out.reserve(students.size());
        for (const auto& s : students) out.push_back(s.id);
        return out;
    }
};

/// One questionnaire row: `reporter` worked with each id in `collaborators`
/// on the given assignment.
struct CollaborationReport {
    int assignment = 0;
    std::string reporter;
    std::vector<std::string> collaborators;
};

/**
 * Immutable cumulative collaboration network at one assignment.
 *
 * Simple undirected graph over the full roster: no self-loops, no duplicate
 * edges, isolated students retained. Safe for unsynchronized concurrent reads.
 */
class Snapshot {
public:
    /// Validates the simple-graph invariants and builds adjacency.
    /// Throws InputError on out-of-range endpoints, self-loops or duplicates.
    static Snapshot make(int assignment, std::vector<std::string> ids,
                         std::vector<std::pair<int, int>> edges) {
        Snapshot s;
        s.assignment_ = assignment;
        s.ids_ = std::move(ids);
        const int n = static_cast<int>(s.ids_.size());
        for (auto& e : edges) {
            if (e.first > e.second) std::swap(e.first, e.second);
            if (e.first < 0 || e.second >= n) {
                throw InputError("snapshot edge endpoint out of range");
            }
            if (e.first == e.second) {
                throw InputError("snapshot contains a self-loop");
            }
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
            throw InputError("snapshot contains a duplicate edge");
        }
        s.edges_ = std::move(edges);
        s.adj_.assign(static_cast<std::size_t>(n), {});
        for (const auto& [u, v] : s.edges_) {
            s.adj_[static_cast<std::size_t>(u)].push_back(v);
            s.adj_[static_cast<std::size_t>(v)].push_back(u);
        }
        for (auto& nbrs : s.adj_) std::sort(nbrs.begin(), nbrs.end());
        return s;
    }

    int assignment() const { return assignment_; }
    int size() const { return static_cast<int>(ids_.size()); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id_of(int node) const { return ids_.at(static_cast<std::size_t>(node)); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    long edge_count() const { return static_cast<long>(edges_.size()); }
    const std::vector<int>& neighbors(int node) const { return adj_.at(static_cast<std::size_t>(node)); }
    int degree(int node) const { return static_cast<int>(adj_.at(static_cast<std::size_t>(node)).size()); }

    int index_of(const std::string& id) const {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id) return -1;
        return static_cast<int>(it - ids_.begin());
    }

private:
    int assignment_ = 0;
    std::vector<std::string> ids_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
};

namespace detail {

/// Reads non-empty lines, stripping trailing '\r'; '#' lines are skipped so
/// artifact metadata headers can be re-ingested.
inline std::vector<std::pair<int, std::string>> read_csv_lines(std::istream& in) {
    std::vector<std::pair<int, std::string>> lines;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (!line.empty() && line[0] == '#') continue;
        lines.emplace_back(lineno, line);
    }
    return lines;
}

} // namespace detail

/**
 * Parses a roster file.
 *
 * Header: `id,sat,confidence_<k>,interest_<k>` -- `id` is required, the
 * attribute columns are optional and may appear for any set of assignment
 * ordinals k. Empty cells mean missing. Likert columns are range-checked
 * against [likert_min, likert_max].
 */
inline Roster ingest_roster(std::istream& in, double likert_min = 1.0, double likert_max = 5.0) {
    auto lines = detail::read_csv_lines(in);
    if (lines.empty()) throw InputError("roster: empty file");

    enum class Kind { Id, Sat, Confidence, Interest };
    struct Column {
        Kind kind;
        int assignment = 0;
    };

    const auto header = split_fields(lines[0].second, ',');
    std::vector<Column> columns;
    int id_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (name == "id") {
            if (id_col >= 0) throw InputError("roster: duplicate id column");
            id_col = static_cast<int>(c);
            columns.push_back({Kind::Id});
        } else if (name == "sat") {
            columns.push_back({Kind::Sat});
        } else if (name.rfind("confidence_", 0) == 0) {
            columns.push_back({Kind::Confidence, parse_int(name.substr(11), "roster header '" + name + "'")});
        } else if (name.rfind("interest_", 0) == 0) {
            columns.push_back({Kind::Interest, parse_int(name.substr(9), "roster header '" + name + "'")});
        } else {
            throw InputError("roster: unknown column '" + name + "'");
        }
    }
    if (id_col < 0) throw InputError("roster: missing id column");

    Roster roster;
    roster.likert_min = likert_min;
    roster.likert_max = likert_max;
    std::set<std::string> seen;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [lineno, line] = lines[r];
        const std::string where = "roster row " + std::to_string(lineno);
        const auto fields = split_fields(line, ',');
        if (fields.size() != columns.size()) {
            throw InputError(where + ": expected " + std::to_string(columns.size()) +
                             " fields, got " + std::to_string(fields.size()));
        }
        StudentRecord rec;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string& field = fields[c];
            const Column& col = columns[c];
            if (col.kind == Kind::Id) {
                if (field.empty()) throw InputError(where + ": empty id");
                rec.id = field;
                continue;
            }
            if (field.empty()) continue; // missing, not zero
            const double value = parse_double(field, where + ", column '" + header[c] + "'");
            switch (col.kind) {
            case Kind::Sat:
                rec.sat = value;
                break;
            case Kind::Confidence:
            case Kind::Interest:
                if (value < likert_min || value > likert_max) {
                    throw InputError(where + ": " + header[c] + " value " + field +
                                     " outside Likert range");
                }
                if (col.kind == Kind::Confidence) rec.confidence[col.assignment] = value;
                else rec.interest[col.assignment] = value;
                break;
            default:
                break;
            }
        }
        if (!seen.insert(rec.id).second) {
            throw InputError("duplicate id " + rec.id);
        }
        roster.students.push_back(std::move(rec));
    }
    std::sort(roster.students.begin(), roster.students.end(),
              [](const StudentRecord& a, const StudentRecord& b) { return a.id < b.id; });
    return roster;
}

/**
 * Parses a collaboration file with header `assignment,reporter,collaborators`
 * (collaborators are semicolon-separated ids). Every id must resolve against
 * the roster; self-reports are rejected.
 */
inline std::vector<CollaborationReport> ingest_reports(std::istream& in, const Roster& roster) {
    auto lines = detail::read_csv_lines(in);
    if (lines.empty()) throw InputError("collaborations: empty file");

    const auto header = split_fields(lines[0].second, ',');
    int assignment_col = -1, reporter_col = -1, collaborators_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "assignment") assignment_col = static_cast<int>(c);
        else if (header[c] == "reporter") reporter_col = static_cast<int>(c);
        else if (header[c] == "collaborators") collaborators_col = static_cast<int>(c);
        else throw InputError("collaborations: unknown column '" + header[c] + "'");
    }
    if (assignment_col < 0 || reporter_col < 0 || collaborators_col < 0) {
        throw InputError("collaborations: header must declare assignment, reporter, collaborators");
    }

    std::vector<CollaborationReport> reports;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [lineno, line] = lines[r];
        const std::string where = "collaboration row " + std::to_string(lineno);
        const auto fields = split_fields(line, ',');
        if (fields.size() != header.size()) {
            throw InputError(where + ": expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(fields.size()));
        }
        CollaborationReport rep;
        rep.assignment = parse_int(fields[static_cast<std::size_t>(assignment_col)], where);
        if (rep.assignment < 1) throw InputError(where + ": assignment must be a positive ordinal");
        rep.reporter = fields[static_cast<std::size_t>(reporter_col)];
        if (roster.index_of(rep.reporter) < 0) {
            throw InputError(where + ": unknown id '" + rep.reporter + "'");
        }
        std::set<std::string> collaborators;
        for (const auto& raw : split_fields(fields[static_cast<std::size_t>(collaborators_col)], ';')) {
            if (raw.empty()) continue;
            if (raw == rep.reporter) {
                throw InputError(where + ": reporter '" + raw + "' lists themself as collaborator");
            }
            if (roster.index_of(raw) < 0) {
                throw InputError(where + ": unknown id '" + raw + "'");
            }
            collaborators.insert(raw);
        }
        rep.collaborators.assign(collaborators.begin(), collaborators.end());
        reports.push_back(std::move(rep));
    }
    return reports;
}

/**
 * Builds the sequence of cumulative snapshots.
 *
 * Snapshot at position t contains edge {x,y} iff some report with assignment
 * among the first t entries of `assignment_order` has x naming y or y naming
 * x. Reports are symmetrized and multiplicity is discarded. Every snapshot
 * keeps the full roster as its node set.
 */
inline std::vector<Snapshot> build_snapshots(const std::vector<CollaborationReport>& reports,
                                             const Roster& roster,
                                             const std::vector<int>& assignment_order) {
    if (assignment_order.empty()) throw InputError("assignment order is empty");
    std::map<int, std::size_t> position;
    for (std::size_t i = 0; i < assignment_order.size(); ++i) {
        if (!position.emplace(assignment_order[i], i).second) {
            throw InputError("assignment order repeats assignment " + std::to_string(assignment_order[i]));
        }
    }

    // Edge additions grouped by position in the declared order.
    std::vector<std::vector<std::pair<int, int>>> additions(assignment_order.size());
    for (const auto& rep : reports) {
        auto it = position.find(rep.assignment);
        if (it == position.end()) {
            throw InputError("report assignment " + std::to_string(rep.assignment) +
                             " not in the assignment order");
        }
        const int u = roster.index_of(rep.reporter);
        if (u < 0) throw InputError("report names unknown id '" + rep.reporter + "'");
        for (const auto& cid : rep.collaborators) {
            const int v = roster.index_of(cid);
            if (v < 0) throw InputError("report names unknown id '" + cid + "'");
            additions[it->second].emplace_back(std::min(u, v), std::max(u, v));
        }
    }

    std::vector<Snapshot> snapshots;
    snapshots.reserve(assignment_order.size());
    std::set<std::pair<int, int>> cumulative;
    auto ids = roster.ids();
    for (std::size_t t = 0; t < assignment_order.size(); ++t) {
        cumulative.insert(additions[t].begin(), additions[t].end());
        snapshots.push_back(Snapshot::make(
            assignment_order[t], ids,
            std::vector<std::pair<int, int>>(cumulative.begin(), cumulative.end())));
    }
    return snapshots;
}

struct GrowthRow {
    int assignment = 0;
    int nodes = 0;
    long edges = 0;
};

/// Per-snapshot (assignment, node count, edge count) rows, in order.
inline std::vector<GrowthRow> edge_growth_table(const std::vector<Snapshot>& snapshots) {
    if (snapshots.empty()) throw InputError("edge growth table: no snapshots");
    std::vector<GrowthRow> rows;
    rows.reserve(snapshots.size());
    for (const auto& s : snapshots) {
        rows.push_back({s.assignment(), s.size(), s.edge_count()});
    }
    return rows;
}

/// Writes one `idA,idB` line per edge with idA < idB, lexicographically sorted.
inline void export_edgelist(const Snapshot& snapshot, std::ostream& out) {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(snapshot.edges().size());
    for (const auto& [u, v] : snapshot.edges()) {
        std::string a = snapshot.id_of(u);
        std::string b = snapshot.id_of(v);
        if (b < a) std::swap(a, b);
        pairs.emplace_back(std::move(a), std::move(b));
    }
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [a, b] : pairs) {
        out << a << ',' << b << '\n';
    }
    if (!out) throw InputError("edgelist export: write failure");
}

/// Rebuilds a snapshot from an exported edgelist over the same roster.
/// '#' metadata lines are skipped; duplicate lines collapse silently.
inline Snapshot snapshot_from_edgelist(std::istream& in, const Roster& roster, int assignment = 1) {
    std::set<std::pair<int, int>> edges;
    for (const auto& [lineno, line] : detail::read_csv_lines(in)) {
        const auto fields = split_fields(line, ',');
        if (fields.size() != 2) {
            throw InputError("edgelist row " + std::to_string(lineno) + ": expected 'idA,idB'");
        }
        const int u = roster.index_of(fields[0]);
        const int v = roster.index_of(fields[1]);
        if (u < 0 || v < 0) {
            throw InputError("edgelist row " + std::to_string(lineno) + ": unknown id");
        }
        if (u == v) throw InputError("edgelist row " + std::to_string(lineno) + ": self-loop");
        edges.emplace(std::min(u, v), std::max(u, v));
    }
    return Snapshot::make(assignment, roster.ids(),
                          std::vector<std::pair<int, int>>(edges.begin(), edges.end()));
}

} // namespace collabnet
