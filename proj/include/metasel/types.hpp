#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace metasel {

/// Rows are points, columns are x, y, z.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// A model as read from disk: arbitrary positive part labels, any point count.
struct RawModel {
    std::string model_id;
    std::string category;
    PointMatrix points;
    std::vector<int> labels;

    Eigen::Index size() const { return points.rows(); }
};

/// A preprocessed model: fixed point count, labels over {1,2,3}, each present.
struct PointCloudModel {
    std::string model_id;
    std::string category;
    PointMatrix points;
    std::vector<int> labels;

    Eigen::Index size() const { return points.rows(); }
};

template <class Model>
Model take_rows(const Model& m, const std::vector<Eigen::Index>& rows) {
    Model out{m.model_id, m.category, PointMatrix(static_cast<Eigen::Index>(rows.size()), 3), {}};
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.points.row(static_cast<Eigen::Index>(i)) = m.points.row(rows[i]);
        out.labels.push_back(m.labels[static_cast<std::size_t>(rows[i])]);
    }
    return out;
}

} // namespace metasel
