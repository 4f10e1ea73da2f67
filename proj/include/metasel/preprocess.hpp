#pragma once

#include "metasel/error.hpp"
#include "metasel/rng.hpp"
#include "metasel/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace metasel {

inline constexpr int kPartCount = 3;
inline constexpr int kDefaultPointCount = 1024;

/// Keeps models with exactly three distinct labels, mapping them onto 1, 2, 3
/// in ascending order of the original values.
inline std::vector<RawModel> filter_three_part(const std::vector<RawModel>& models) {
    std::vector<RawModel> kept;
    for (const auto& m : models) {
        std::set<int> distinct(m.labels.begin(), m.labels.end());
        if (distinct.size() != static_cast<std::size_t>(kPartCount)) continue;
        std::map<int, int> rank;
        int next = 1;
        for (int l : distinct) rank[l] = next++;
        RawModel out = m;
        for (int& l : out.labels) l = rank[l];
        kept.push_back(std::move(out));
    }
    return kept;
}

namespace detail {

/// Per-label target counts: largest-remainder share of n proportional to the
/// label's frequency, then raised to at least one by taking from the largest.
inline std::map<int, int> stratified_targets(const std::map<int, std::vector<Eigen::Index>>& by_label,
                                             Eigen::Index total, int n) {
    std::map<int, int> target;
    std::vector<std::pair<double, int>> remainders;
    int assigned = 0;
    for (const auto& [label, rows] : by_label) {
        const double exact = static_cast<double>(n) * static_cast<double>(rows.size()) / static_cast<double>(total);
        const int whole = static_cast<int>(std::floor(exact));
        target[label] = whole;
        assigned += whole;
        remainders.emplace_back(-(exact - whole), label);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) target[remainders[i].second] += 1;

    for (auto& [label, count] : target) {
        if (count > 0) continue;
        auto largest = std::max_element(target.begin(), target.end(),
                                        [](const auto& a, const auto& b) { return a.second < b.second; });
        largest->second -= 1;
        count = 1;
    }
    return target;
}

} // namespace detail

/// Resamples to exactly n points, stratified by label so every label keeps at
/// least one point. Draws without replacement when a label has enough points,
/// otherwise keeps all of them and tops up with replacement. Surviving points
/// keep their original relative order.
inline RawModel resample(const RawModel& model, int n, std::uint64_t seed) {
    if (n < kPartCount) throw InvalidArgument("resample: point count " + std::to_string(n) + " is below 3");
    if (model.size() == 0) throw InvalidArgument("resample: " + model.model_id + " has no points");

    std::map<int, std::vector<Eigen::Index>> by_label;
    for (std::size_t i = 0; i < model.labels.size(); ++i) by_label[model.labels[i]].push_back(static_cast<Eigen::Index>(i));
    if (static_cast<int>(by_label.size()) > n) {
        throw InvalidArgument("resample: " + std::to_string(n) + " points cannot cover " +
                              std::to_string(by_label.size()) + " labels");
    }

    const auto target = detail::stratified_targets(by_label, model.size(), n);
    Rng rng(seed);
    std::vector<Eigen::Index> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (auto& [label, pool] : by_label) {
        const auto want = static_cast<std::size_t>(target.at(label));
        if (want <= pool.size()) {
            // Partial Fisher-Yates over a copy.
            std::vector<Eigen::Index> p = pool;
            for (std::size_t i = 0; i < want; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, p.size() - 1);
                std::swap(p[i], p[pick(rng)]);
            }
            rows.insert(rows.end(), p.begin(), p.begin() + static_cast<std::ptrdiff_t>(want));
        } else {
            rows.insert(rows.end(), pool.begin(), pool.end());
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            for (std::size_t i = pool.size(); i < want; ++i) rows.push_back(pool[pick(rng)]);
        }
    }
    std::sort(rows.begin(), rows.end());
    return take_rows(model, rows);
}

/// Stable ordering of rows by label.
template <class Model>
std::vector<Eigen::Index> label_order(const Model& m, bool descending = false) {
    std::vector<Eigen::Index> rows(m.labels.size());
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    std::stable_sort(rows.begin(), rows.end(), [&](Eigen::Index a, Eigen::Index b) {
        const int la = m.labels[static_cast<std::size_t>(a)];
        const int lb = m.labels[static_cast<std::size_t>(b)];
        return descending ? la > lb : la < lb;
    });
    return rows;
}

template <class Model>
void check_part_labels(const Model& m) {
    for (int l : m.labels) {
        if (l < 1 || l > kPartCount) {
            throw InvalidLabelError(m.model_id + ": label " + std::to_string(l) + " outside {1,2,3}");
        }
    }
}

/// Stable ascending sort of points by part label.
template <class Model>
PointCloudModel sort_by_label(const Model& model) {
    check_part_labels(model);
    auto sorted = take_rows(model, label_order(model));
    return PointCloudModel{std::move(sorted.model_id), std::move(sorted.category), std::move(sorted.points),
                           std::move(sorted.labels)};
}

/// Centers on the centroid and scales so the farthest point has radius 1.
inline PointCloudModel normalize_unit_sphere(const PointCloudModel& model) {
    if (model.size() == 0) throw DegenerateModelError(model.model_id + ": no points");
    const Eigen::RowVector3d centroid = model.points.colwise().mean();
    PointMatrix centered = model.points.rowwise() - centroid;
    const double radius = centered.rowwise().norm().maxCoeff();
    const double scale = model.points.cwiseAbs().maxCoeff();
    if (!(radius > 1e-12 * (1.0 + scale))) {
        throw DegenerateModelError(model.model_id + ": all points coincide");
    }
    PointCloudModel out{model.model_id, model.category, centered / radius, model.labels};
    return out;
}

/// Checks the invariants of a preprocessed model.
inline void validate_point_cloud(const PointCloudModel& m, int expected_points) {
    if (m.size() != expected_points || m.labels.size() != static_cast<std::size_t>(m.size())) {
        throw InvalidInputError(m.model_id + ": expected " + std::to_string(expected_points) + " points");
    }
    check_part_labels(m);
    std::set<int> present(m.labels.begin(), m.labels.end());
    if (present.size() != static_cast<std::size_t>(kPartCount)) {
        throw DegenerateSemanticsError(m.model_id + ": not every part label is present");
    }
}

/// resample then sort: the canonical preprocessing of one filtered model.
inline PointCloudModel preprocess_model(const RawModel& model, int n, std::uint64_t master_seed) {
    return sort_by_label(resample(model, n, derive_seed(master_seed, model.model_id, "resample")));
}

} // namespace metasel
