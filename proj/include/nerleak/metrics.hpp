#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace nerleak::metrics {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

/// Threshold sweep over every distinct score, descending. Starts at (0,0),
/// ends at (1,1); both rates are non-decreasing along the curve.
struct RocCurve {
    std::vector<RocPoint> points;

    /// Trapezoidal area under the curve.
    double area() const;
};

/// Minimum number of single-character insertions, deletions and
/// substitutions transforming a into b. Operates on Unicode scalar values.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Rank-statistic AUC: fraction of (pos, neg) pairs with pos > neg plus
/// half the tied pairs. Equals the trapezoidal area under roc_curve.
double auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

RocCurve roc_curve(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

/// Sort, drop floor(fraction * n) values from each tail, average the rest.
double trimmed_mean(const std::vector<double>& values, double fraction);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nerleak::metrics
