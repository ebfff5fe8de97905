#include "nerleak/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nerleak/utf8.hpp"

namespace nerleak::metrics {

std::size_t levenshtein(std::string_view a, std::string_view b) {
    const auto ca = utf8::decode(a);
    const auto cb = utf8::decode(b);
    const std::size_t n = ca.size(), m = cb.size();
    if (n == 0) return m;
    if (m == 0) return n;

    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (ca[i - 1] == cb[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
    if (pos_scores.empty() || neg_scores.empty())
        throw std::invalid_argument("auc: both score lists must be non-empty");

    // Count wins and ties by merging against the sorted negative scores.
    std::vector<double> neg = neg_scores;
    std::sort(neg.begin(), neg.end());
    double wins = 0.0, ties = 0.0;
    for (double p : pos_scores) {
        const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
        const auto hi = std::upper_bound(lo, neg.end(), p);
        wins += static_cast<double>(lo - neg.begin());
        ties += static_cast<double>(hi - lo);
    }
    const double pairs = static_cast<double>(pos_scores.size()) * static_cast<double>(neg.size());
    return (wins + 0.5 * ties) / pairs;
}

RocCurve roc_curve(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
    if (pos_scores.empty() || neg_scores.empty())
        throw std::invalid_argument("roc_curve: both score lists must be non-empty");

    std::vector<double> thresholds;
    thresholds.reserve(pos_scores.size() + neg_scores.size());
    thresholds.insert(thresholds.end(), pos_scores.begin(), pos_scores.end());
    thresholds.insert(thresholds.end(), neg_scores.begin(), neg_scores.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const double np = static_cast<double>(pos_scores.size());
    const double nn = static_cast<double>(neg_scores.size());

    RocCurve curve;
    curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    // a sample is predicted positive when score >= threshold
    for (double t : thresholds) {
        std::size_t tp = 0, fp = 0;
        for (double p : pos_scores) tp += (p >= t) ? 1 : 0;
        for (double q : neg_scores) fp += (q >= t) ? 1 : 0;
        curve.points.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / np, t});
    }
    return curve;
}

double RocCurve::area() const {
    double a = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double dx = points[i].fpr - points[i - 1].fpr;
        a += dx * 0.5 * (points[i].tpr + points[i - 1].tpr);
    }
    return a;
}

double trimmed_mean(const std::vector<double>& values, double fraction) {
    if (fraction < 0.0 || fraction >= 0.5)
        throw std::invalid_argument("trimmed_mean: fraction must be in [0, 0.5)");
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    const std::size_t drop = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(v.size())));
    if (v.size() <= 2 * drop)
        throw std::invalid_argument("trimmed_mean: no values survive trimming");
    double sum = 0.0;
    for (std::size_t i = drop; i < v.size() - drop; ++i) sum += v[i];
    return sum / static_cast<double>(v.size() - 2 * drop);
}

namespace {

// average ranks, 1-based, ties share the mean of their positions
std::vector<double> fractional_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman: need two equal-length lists of size >= 2");
    const auto rx = fractional_ranks(x);
    const auto ry = fractional_ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("spearman: constant input has no defined correlation");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace nerleak::metrics
