#pragma once

#include "metasel/classifier.hpp"
#include "metasel/error.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace metasel {

struct ClassMetrics {
    std::size_t support = 0;       ///< true instances (confusion row sum)
    std::size_t predicted = 0;     ///< predicted instances (confusion column sum)
    std::optional<double> recall;  ///< absent when support is 0
    double precision = 0.0;        ///< 0 when nothing was predicted as this class
};

/// Confusion rows are true categories, columns predicted, both alphabetical.
struct EvalReport {
    std::size_t total = 0;
    double accuracy = 0.0;
    std::vector<std::string> categories;
    std::map<std::string, ClassMetrics> per_class;
    double weighted_recall = 0.0;
    double weighted_precision = 0.0;
    std::vector<std::vector<std::size_t>> confusion;
};

/// Support-weighted mean of per-class values; classes with zero support and
/// absent values carry no weight.
inline double weighted_average(const std::vector<std::optional<double>>& values, const std::vector<std::size_t>& supports) {
    if (values.size() != supports.size()) throw InvalidInputError("weighted_average: size mismatch");
    double sum = 0.0;
    std::size_t weight = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i] || supports[i] == 0) continue;
        sum += *values[i] * static_cast<double>(supports[i]);
        weight += supports[i];
    }
    return weight == 0 ? 0.0 : sum / static_cast<double>(weight);
}

/// Builds the report from an explicit confusion matrix.
inline EvalReport report_from_confusion(std::vector<std::string> categories,
                                        std::vector<std::vector<std::size_t>> confusion) {
    const std::size_t k = categories.size();
    if (confusion.size() != k) throw InvalidInputError("confusion matrix has the wrong number of rows");
    EvalReport r;
    std::vector<std::size_t> col_sum(k, 0);
    std::size_t diag = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (confusion[i].size() != k) throw InvalidInputError("confusion matrix is not square");
        for (std::size_t j = 0; j < k; ++j) {
            r.total += confusion[i][j];
            col_sum[j] += confusion[i][j];
        }
        diag += confusion[i][i];
    }
    if (r.total == 0) throw EmptyEvaluationError("no predictions to evaluate");
    r.accuracy = static_cast<double>(diag) / static_cast<double>(r.total);

    std::vector<std::optional<double>> recalls;
    std::vector<std::optional<double>> precisions;
    std::vector<std::size_t> supports;
    for (std::size_t i = 0; i < k; ++i) {
        ClassMetrics m;
        for (std::size_t j = 0; j < k; ++j) m.support += confusion[i][j];
        m.predicted = col_sum[i];
        const auto hits = static_cast<double>(confusion[i][i]);
        if (m.support > 0) m.recall = hits / static_cast<double>(m.support);
        m.precision = m.predicted > 0 ? hits / static_cast<double>(m.predicted) : 0.0;
        recalls.push_back(m.recall);
        precisions.push_back(m.precision);
        supports.push_back(m.support);
        r.per_class[categories[i]] = m;
    }
    r.weighted_recall = weighted_average(recalls, supports);
    r.weighted_precision = weighted_average(precisions, supports);
    r.categories = std::move(categories);
    r.confusion = std::move(confusion);
    return r;
}

/// The category universe is every true or predicted category plus `extra`
/// (e.g. train categories that never occur in the test set).
inline EvalReport evaluate(const std::vector<Prediction>& predictions, const std::set<std::string>& extra = {}) {
    if (predictions.empty()) throw EmptyEvaluationError("no predictions to evaluate");
    std::set<std::string> universe = extra;
    for (const auto& p : predictions) {
        universe.insert(p.true_category);
        universe.insert(p.predicted_category);
    }
    std::vector<std::string> categories(universe.begin(), universe.end());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < categories.size(); ++i) index[categories[i]] = i;

    std::vector<std::vector<std::size_t>> confusion(categories.size(), std::vector<std::size_t>(categories.size(), 0));
    for (const auto& p : predictions) ++confusion[index.at(p.true_category)][index.at(p.predicted_category)];
    return report_from_confusion(std::move(categories), std::move(confusion));
}

} // namespace metasel
