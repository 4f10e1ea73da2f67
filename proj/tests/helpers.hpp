#pragma once

#include "metasel/metasel.hpp"
#include "oracle.hpp"

#include <array>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing_helpers {

inline metasel::PointMatrix to_matrix(const std::vector<std::array<double, 3>>& pts) {
    metasel::PointMatrix m(static_cast<Eigen::Index>(pts.size()), 3);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (int k = 0; k < 3; ++k) m(static_cast<Eigen::Index>(i), k) = pts[i][static_cast<std::size_t>(k)];
    }
    return m;
}

inline metasel::PointCloudModel cloud(const std::vector<std::array<double, 3>>& pts, std::vector<int> labels,
                                      std::string id = "m", std::string category = "c") {
    return {std::move(id), std::move(category), to_matrix(pts), std::move(labels)};
}

inline metasel::RawModel raw(const std::vector<std::array<double, 3>>& pts, std::vector<int> labels,
                             std::string id = "m", std::string category = "c") {
    return {std::move(id), std::move(category), to_matrix(pts), std::move(labels)};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("metasel_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testing_helpers
