#pragma once

#include "metasel/error.hpp"
#include "metasel/preprocess.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>

namespace metasel {

/// Per-model semantic space: column j is the one-hot vector of point j's part.
struct SemanticMatrix {
    Eigen::Matrix3Xd data;

    /// S * S^T, which is diag(n1, n2, n3) for a one-hot S.
    Eigen::Matrix3d gram() const { return data * data.transpose(); }
};

inline SemanticMatrix build_semantics(std::span<const int> labels) {
    SemanticMatrix s{Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(labels.size()))};
    std::array<std::size_t, kPartCount> counts{};
    for (std::size_t j = 0; j < labels.size(); ++j) {
        const int l = labels[j];
        if (l < 1 || l > kPartCount) throw InvalidLabelError("label " + std::to_string(l) + " outside {1,2,3}");
        s.data(l - 1, static_cast<Eigen::Index>(j)) = 1.0;
        ++counts[static_cast<std::size_t>(l - 1)];
    }
    for (int l = 0; l < kPartCount; ++l) {
        if (counts[static_cast<std::size_t>(l)] == 0) {
            throw DegenerateSemanticsError("part label " + std::to_string(l + 1) + " has no points");
        }
    }
    return s;
}

} // namespace metasel
