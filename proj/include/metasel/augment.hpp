#pragma once

// Dataset variants: point-order changes and rigid/noisy perturbations of a
// preprocessed model. Every transform keeps the point count and keeps each
// point paired with its label.

#include "metasel/error.hpp"
#include "metasel/preprocess.hpp"
#include "metasel/rng.hpp"
#include "metasel/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace metasel {

enum class Axis { x, y, z };

inline const char* axis_name(Axis a) {
    switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
    }
    return "?";
}

struct AugmentConfig {
    double translation_range = 0.1; ///< per-axis half-width of the uniform offset
    double jitter_sigma = 0.01;
    double jitter_clip = 0.05;
};

inline void validate(const AugmentConfig& c) {
    if (!(c.translation_range >= 0.0) || !(c.jitter_sigma >= 0.0) || !(c.jitter_clip >= 0.0)) {
        throw InvalidArgument("augment: translation_range, jitter_sigma and jitter_clip must be nonnegative");
    }
}

/// Applies one random permutation to points and labels together.
inline PointCloudModel shuffle_points(const PointCloudModel& model, std::uint64_t seed) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(model.size()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    Rng rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    return take_rows(model, rows);
}

/// Stable descending sort by label.
inline PointCloudModel sort_descending(const PointCloudModel& model) {
    check_part_labels(model);
    return take_rows(model, label_order(model, true));
}

/// Right-handed rotation about a coordinate axis.
inline Eigen::Matrix3d rotation_matrix(Axis axis, double angle) {
    switch (axis) {
    case Axis::x: return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitX()).toRotationMatrix();
    case Axis::y: return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitY()).toRotationMatrix();
    case Axis::z: return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    }
    return Eigen::Matrix3d::Identity();
}

inline PointCloudModel rotate(const PointCloudModel& model, Axis axis, double angle) {
    PointCloudModel out = model;
    out.points = model.points * rotation_matrix(axis, angle).transpose();
    return out;
}

inline double random_angle(Rng& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    return angle(rng);
}

inline PointCloudModel rotate_random(const PointCloudModel& model, Axis axis, std::uint64_t seed) {
    Rng rng(seed);
    return rotate(model, axis, random_angle(rng));
}

/// Rotates about x, then y, then z, each by an independent uniform angle.
inline PointCloudModel rotate_random_all(const PointCloudModel& model, std::uint64_t seed) {
    Rng rng(seed);
    const double ax = random_angle(rng);
    const double ay = random_angle(rng);
    const double az = random_angle(rng);
    return rotate(rotate(rotate(model, Axis::x, ax), Axis::y, ay), Axis::z, az);
}

/// Adds one offset drawn uniformly from [-range, range]^3 to every point.
inline PointCloudModel translate(const PointCloudModel& model, double range, std::uint64_t seed) {
    if (!(range >= 0.0)) throw InvalidArgument("translate: range must be nonnegative");
    if (range == 0.0) return model;
    Rng rng(seed);
    std::uniform_real_distribution<double> d(-range, range);
    Eigen::RowVector3d offset;
    for (int k = 0; k < 3; ++k) offset[k] = d(rng);
    PointCloudModel out = model;
    out.points.rowwise() += offset;
    return out;
}

/// Per-coordinate Gaussian noise, clipped to [-clip, clip].
inline PointCloudModel jitter(const PointCloudModel& model, double sigma, double clip, std::uint64_t seed) {
    if (!(sigma >= 0.0) || !(clip >= 0.0)) throw InvalidArgument("jitter: sigma and clip must be nonnegative");
    if (sigma == 0.0) return model;
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    PointCloudModel out = model;
    for (Eigen::Index i = 0; i < out.points.rows(); ++i) {
        for (Eigen::Index k = 0; k < 3; ++k) out.points(i, k) += std::clamp(noise(rng), -clip, clip);
    }
    return out;
}

} // namespace metasel
