#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "collabnet/common.hpp"
#include "collabnet/features.hpp"
#include "collabnet/stats.hpp"

namespace collabnet {

/// One candidate model: a predictor subset within a family. The intercept is
/// always included and is not listed.
struct ModelSpec {
    ModelFamily family = ModelFamily::baseline;
    std::vector<std::string> predictors;
};

/// OLS fit summary. Coefficient order is intercept first, then the spec's
/// predictors.
struct FitResult {
    std::vector<std::string> terms; // "(intercept)" + predictors
    std::vector<double> coefficients;
    std::vector<double> ci_lo;
    std::vector<double> ci_hi;
    std::vector<double> p_values;
    double r2 = 0.0;
    double rss = 0.0;
    int n = 0;
    int k = 0; // columns including intercept
    double aic = std::numeric_limits<double>::quiet_NaN();
    bool exact_fit = false;

    double coefficient(const std::string& term) const {
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (terms[i] == term) return coefficients[i];
        }
        throw InputError("fit result: no term '" + term + "'");
    }
};

/// AIC = n ln(RSS/n) + 2 (k + 1); k counts intercept plus slopes and the +1
/// counts the error variance. The additive constant n (ln 2 pi + 1) is
/// dropped since only differences are ever used.
inline double aic_value(int n, double rss, int k) {
    if (!(rss > 0.0)) throw NumericError("aic: degenerate exact fit (rss = 0)");
    return static_cast<double>(n) * std::log(rss / static_cast<double>(n)) + 2.0 * (k + 1);
}

/// Small-sample corrected AIC; optional sensitivity variant.
inline double aicc_value(int n, double rss, int k) {
    const int p = k + 1; // parameters including the error variance
    if (n - p - 1 <= 0) throw NumericError("aicc: too few rows for the correction term");
    return aic_value(n, rss, k) + 2.0 * p * (p + 1) / static_cast<double>(n - p - 1);
}

inline double aic(const FitResult& fit) {
    if (fit.exact_fit) throw NumericError("aic: degenerate exact fit (rss = 0)");
    return fit.aic;
}

/**
 * Ordinary least squares of `outcome` on the spec's predictors plus an
 * intercept, over the matrix rows.
 *
 * Coefficients come from a column-pivoted Householder QR; standard errors use
 * the unbiased residual variance, and p-values / 95% intervals use the
 * Student-t distribution with n - k degrees of freedom. Throws NumericError
 * on rank deficiency (naming the collinear columns) and when n <= k.
 */
inline FitResult ols_fit(const PredictorMatrix& matrix, const std::vector<double>& outcome,
                         const ModelSpec& spec) {
    const auto allowed = family_columns(spec.family);
    for (const auto& p : spec.predictors) {
        if (std::find(allowed.begin(), allowed.end(), p) == allowed.end()) {
            throw InputError("model spec: predictor '" + p + "' not allowed in family " +
                             family_name(spec.family));
        }
    }
    const int n = matrix.rows();
    if (static_cast<int>(outcome.size()) != n) {
        throw InputError("ols: outcome length does not match matrix rows");
    }
    const int k = static_cast<int>(spec.predictors.size()) + 1;
    if (n <= k) {
        throw NumericError("ols: need more rows than parameters (n = " + std::to_string(n) +
                           ", k = " + std::to_string(k) + ")");
    }

    FitResult fit;
    fit.terms.push_back("(intercept)");
    for (const auto& p : spec.predictors) fit.terms.push_back(p);
    fit.n = n;
    fit.k = k;

    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd y(n);
    for (int r = 0; r < n; ++r) {
        X(r, 0) = 1.0;
        y(r) = outcome[static_cast<std::size_t>(r)];
        for (int j = 1; j < k; ++j) {
            const int c = matrix.column_index(spec.predictors[static_cast<std::size_t>(j - 1)]);
            if (c < 0) throw InputError("ols: matrix lacks column '" + spec.predictors[j - 1] + "'");
            X(r, j) = matrix.at(r, c);
        }
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) {
        const auto perm = qr.colsPermutation().indices();
        std::string names;
        for (int j = qr.rank(); j < k; ++j) {
            if (!names.empty()) names += ", ";
            names += fit.terms[static_cast<std::size_t>(perm(j))];
        }
        throw NumericError("ols: rank deficient design matrix; collinear column(s): " + names);
    }

    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd residual = y - X * beta;
    const double rss = residual.squaredNorm();
    const double mean_y = y.mean();
    const double tss = (y.array() - mean_y).matrix().squaredNorm();

    fit.coefficients.assign(beta.data(), beta.data() + k);
    fit.rss = rss;
    // Exact fits leave no residual scale; flagged so AIC can refuse them.
    const double rss_floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(tss, y.squaredNorm());
    fit.exact_fit = rss <= rss_floor;
    fit.r2 = tss > 0.0 ? 1.0 - rss / tss : (fit.exact_fit ? 1.0 : 0.0);
    fit.r2 = std::min(1.0, std::max(0.0, fit.r2));
    if (!fit.exact_fit) fit.aic = aic_value(n, rss, k);

    const double df = static_cast<double>(n - k);
    const double sigma2 = fit.exact_fit ? 0.0 : rss / df;
    const Eigen::MatrixXd gram_inverse =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    const double t975 = student_t_quantile(0.975, df);
    for (int j = 0; j < k; ++j) {
        const double se = std::sqrt(std::max(0.0, sigma2 * gram_inverse(j, j)));
        const double b = fit.coefficients[static_cast<std::size_t>(j)];
        fit.ci_lo.push_back(b - t975 * se);
        fit.ci_hi.push_back(b + t975 * se);
        if (se > 0.0) {
            fit.p_values.push_back(student_t_two_sided_p(b / se, df));
        } else {
            fit.p_values.push_back(b == 0.0 ? 1.0 : 0.0);
        }
    }
    return fit;
}

/// Likelihood ratio implied by an AIC gap: exp((aic_model - aic_best) / 2).
inline double evidence_ratio(double aic_model, double aic_best) {
    if (aic_model < aic_best) {
        throw InputError("evidence ratio: aic_model must not be below aic_best (arguments swapped?)");
    }
    return std::exp((aic_model - aic_best) / 2.0);
}

struct SubsetSelection {
    ModelSpec spec;
    FitResult fit;
    double criterion = 0.0; // AIC, or AICc when requested
};

/**
 * Exhaustive best-subset search over a family's predictors (intercept-only
 * included). Minimum AIC wins; ties break toward fewer predictors, then
 * lexicographic predictor names, so the result is independent of evaluation
 * order. Subsets whose fit fails (rank deficiency, exact fit) are skipped.
 */
inline SubsetSelection best_subset(const PredictorMatrix& matrix, const std::vector<double>& outcome,
                                   ModelFamily family, bool use_aicc = false) {
    const auto& allowed = matrix.columns;
    if (allowed.size() > 15) {
        throw InputError("best subset: more than 15 predictors; exhaustive search refused");
    }
    const std::uint32_t subsets = 1u << allowed.size();

    bool have_best = false;
    SubsetSelection best;
    std::vector<std::string> best_sorted;
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
        ModelSpec spec;
        spec.family = family;
        for (std::size_t j = 0; j < allowed.size(); ++j) {
            if (mask & (1u << j)) spec.predictors.push_back(allowed[j]);
        }
        FitResult fit;
        double criterion;
        try {
            fit = ols_fit(matrix, outcome, spec);
            criterion = use_aicc ? aicc_value(fit.n, fit.rss, fit.k) : aic(fit);
        } catch (const NumericError&) {
            continue;
        }
        std::vector<std::string> sorted_names = spec.predictors;
        std::sort(sorted_names.begin(), sorted_names.end());
        const bool better =
            !have_best || criterion < best.criterion ||
            (criterion == best.criterion &&
             (spec.predictors.size() < best.spec.predictors.size() ||
              (spec.predictors.size() == best.spec.predictors.size() && sorted_names < best_sorted)));
        if (better) {
            have_best = true;
            best = {std::move(spec), std::move(fit), criterion};
            best_sorted = std::move(sorted_names);
        }
    }
    if (!have_best) throw NumericError("best subset: every candidate fit failed");
    return best;
}

/// One family row of the comparison report.
struct FamilyResult {
    ModelFamily family = ModelFamily::baseline;
    ModelSpec spec;
    FitResult fit;
    double criterion = 0.0;
    double evidence_ratio = 1.0;
    bool optimal = false;
};

struct FamilyReport {
    std::vector<FamilyResult> rows; // baseline, centrality, infomap, pagerank
    int winner = 0;                 // index into rows

    const FamilyResult& best() const { return rows.at(static_cast<std::size_t>(winner)); }
};

struct ComparisonConfig {
    std::vector<int> assignment_order;
    int position = 1; // 1-based snapshot position within the order
    PprOptions ppr;
    PagerankOptions pagerank; // exported alongside, not a model predictor
    InfomapOptions infomap;
    bool use_aicc = false;
};

/**
 * Best subset per family over one shared row set, with evidence ratios
 * against the overall optimum. The winner is the family with the lowest
 * criterion; exact ties go to the earlier row in report order (baseline,
 * centrality, infomap, pagerank), so a community family is only credited
 * when it strictly improves.
 */
inline FamilyReport compare_families(const Snapshot& g, const FeatureTable& table,
                                     const std::vector<int>& rows, const std::vector<double>& y,
                                     bool use_aicc = false) {
    FamilyReport report;
    for (ModelFamily family : all_families()) {
        const PredictorMatrix matrix = build_predictor_matrix(g, table, family, rows);
        SubsetSelection selection = best_subset(matrix, y, family, use_aicc);
        FamilyResult row;
        row.family = family;
        row.spec = std::move(selection.spec);
        row.fit = std::move(selection.fit);
        row.criterion = selection.criterion;
        report.rows.push_back(std::move(row));
    }

    report.winner = 0;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        if (report.rows[i].criterion < report.rows[static_cast<std::size_t>(report.winner)].criterion) {
            report.winner = static_cast<int>(i);
        }
    }
    const double best_criterion = report.rows[static_cast<std::size_t>(report.winner)].criterion;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        auto& row = report.rows[i];
        row.optimal = static_cast<int>(i) == report.winner;
        row.evidence_ratio = row.optimal ? 1.0 : evidence_ratio(row.criterion, best_criterion);
    }
    return report;
}

/// End-to-end comparison from raw inputs: computes communities and features,
/// restricts to students with complete predictors and an outcome, then runs
/// compare_families.
inline FamilyReport family_comparison(const Snapshot& g, const Roster& roster,
                                      const std::map<std::string, double>& outcomes,
                                      const ComparisonConfig& config) {
    const CommunityOutputs community = compute_community_outputs(g, config.ppr, config.infomap);
    const FeatureTable table =
        assemble_features(g, roster, community, config.assignment_order, config.position);

    std::vector<int> rows;
    for (int u : complete_case_rows(g, table)) {
        if (outcomes.count(g.id_of(u))) rows.push_back(u);
    }
    if (rows.empty()) {
        throw InputError("family comparison: no student has complete predictors and an outcome");
    }
    std::vector<double> y;
    y.reserve(rows.size());
    for (int u : rows) y.push_back(outcomes.at(g.id_of(u)));
    return compare_families(g, table, rows, y, config.use_aicc);
}

} // namespace collabnet
