#pragma once

// Desk-scale stand-in for ShapeNet-part: every category is a family of
// three-part objects assembled from boxes, ellipsoids and cylinders, with
// per-model jitter on part proportions and placement. Points are sampled on
// part surfaces and emitted in random order with labels 1, 2, 3.

#include "metasel/dataset_io.hpp"
#include "metasel/error.hpp"
#include "metasel/rng.hpp"
#include "metasel/types.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace metasel {

struct SyntheticSpec {
    int categories = 10;
    int models_per_category = 60;
    int points_per_model = 1024;
    std::uint64_t seed = 0;
    double test_fraction = 0.2;
};

inline void validate(const SyntheticSpec& spec) {
    if (spec.categories <= 0 || spec.models_per_category <= 0) {
        throw InvalidArgument("synthetic spec: category and model counts must be positive");
    }
    if (spec.points_per_model < 3) throw InvalidArgument("synthetic spec: points per model must be at least 3");
    if (!(spec.test_fraction >= 0.0 && spec.test_fraction < 1.0)) {
        throw InvalidArgument("synthetic spec: test_fraction must be in [0, 1)");
    }
}

inline nlohmann::json to_json(const SyntheticSpec& s) {
    return {{"categories", s.categories},
            {"models_per_category", s.models_per_category},
            {"points_per_model", s.points_per_model},
            {"seed", s.seed},
            {"test_fraction", s.test_fraction}};
}

/// Missing keys keep their defaults; a missing seed falls back to `default_seed`.
inline SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j, std::uint64_t default_seed) {
    SyntheticSpec s;
    s.seed = default_seed;
    try {
        s.categories = j.value("categories", s.categories);
        s.models_per_category = j.value("models_per_category", s.models_per_category);
        s.points_per_model = j.value("points_per_model", s.points_per_model);
        s.seed = j.value("seed", s.seed);
        s.test_fraction = j.value("test_fraction", s.test_fraction);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("synthetic spec: ") + e.what());
    }
    validate(s);
    return s;
}

namespace synth {

enum class Shape { box, ellipsoid, cylinder };

struct Part {
    Shape shape;
    Eigen::Vector3d center;
    Eigen::Vector3d half; ///< half extents; cylinders run along y with radii (x, z)
    double weight;
};

struct Family {
    const char* name;
    std::array<Part, 3> parts;
};

inline const std::array<Family, 10>& base_families() {
    using S = Shape;
    using V = Eigen::Vector3d;
    static const std::array<Family, 10> families{{
        {"jet", {{{S::ellipsoid, V(0, 0, 0), V(0.9, 0.12, 0.12), 0.40},
                  {S::box, V(0.05, 0, 0), V(0.2, 0.02, 0.8), 0.45},
                  {S::box, V(-0.8, 0.2, 0), V(0.1, 0.2, 0.02), 0.15}}}},
        {"stool", {{{S::box, V(0, 0.5, -0.35), V(0.35, 0.35, 0.04), 0.35},
                    {S::box, V(0, 0, 0), V(0.35, 0.04, 0.35), 0.30},
                    {S::cylinder, V(0, -0.45, 0), V(0.3, 0.42, 0.3), 0.35}}}},
        {"desk", {{{S::box, V(0, 0.35, 0), V(0.8, 0.03, 0.5), 0.50},
                   {S::box, V(0, -0.1, 0), V(0.7, 0.42, 0.42), 0.40},
                   {S::box, V(0.5, 0.2, 0), V(0.2, 0.1, 0.4), 0.10}}}},
        {"lamp", {{{S::cylinder, V(0, -0.8, 0), V(0.3, 0.05, 0.3), 0.25},
                   {S::cylinder, V(0, -0.1, 0), V(0.04, 0.65, 0.04), 0.30},
                   {S::cylinder, V(0, 0.65, 0), V(0.35, 0.2, 0.35), 0.45}}}},
        {"guitar", {{{S::ellipsoid, V(0, -0.4, 0), V(0.4, 0.5, 0.1), 0.55},
                     {S::box, V(0, 0.4, 0), V(0.05, 0.4, 0.03), 0.30},
                     {S::box, V(0, 0.9, 0), V(0.08, 0.1, 0.03), 0.15}}}},
        {"pistol", {{{S::box, V(0.2, 0.2, 0), V(0.5, 0.08, 0.06), 0.45},
                     {S::box, V(-0.2, -0.25, 0), V(0.1, 0.35, 0.06), 0.40},
                     {S::ellipsoid, V(0.05, -0.05, 0), V(0.08, 0.08, 0.02), 0.15}}}},
        {"rocket", {{{S::cylinder, V(0, 0, 0), V(0.15, 0.7, 0.15), 0.60},
                     {S::ellipsoid, V(0, 0.85, 0), V(0.15, 0.2, 0.15), 0.15},
                     {S::box, V(0, -0.7, 0), V(0.4, 0.12, 0.02), 0.25}}}},
        {"board", {{{S::box, V(0, 0, 0), V(0.9, 0.02, 0.25), 0.60},
                    {S::box, V(0, -0.08, 0), V(0.6, 0.04, 0.15), 0.15},
                    {S::ellipsoid, V(0, -0.14, 0), V(0.65, 0.05, 0.22), 0.25}}}},
        {"car", {{{S::box, V(0, 0, 0), V(0.9, 0.2, 0.4), 0.50},
                  {S::box, V(-0.1, 0.35, 0), V(0.45, 0.15, 0.35), 0.25},
                  {S::ellipsoid, V(0, -0.25, 0), V(0.75, 0.12, 0.42), 0.25}}}},
        {"headset", {{{S::ellipsoid, V(0, 0.5, 0), V(0.5, 0.15, 0.05), 0.35},
                      {S::cylinder, V(-0.5, 0, 0), V(0.1, 0.2, 0.2), 0.325},
                      {S::cylinder, V(0.5, 0, 0), V(0.1, 0.2, 0.2), 0.325}}}},
    }};
    return families;
}

/// Category c reuses base family c % 10, stretched per axis for c >= 10 so
/// every category index gets its own proportions.
inline std::pair<std::string, std::array<Part, 3>> family_for(int c) {
    const auto& base = base_families()[static_cast<std::size_t>(c % 10)];
    auto parts = base.parts;
    const int round = c / 10;
    std::string name = base.name;
    if (round > 0) {
        const Eigen::Vector3d stretch(1.0 + 0.3 * round, 1.0 / (1.0 + 0.2 * round), 1.0 + 0.15 * (round % 3));
        for (auto& p : parts) {
            p.center = p.center.cwiseProduct(stretch);
            p.half = p.half.cwiseProduct(stretch);
        }
        name += "_v" + std::to_string(round);
    }
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "%02d_", c);
    return {prefix + name, parts};
}

/// Three draws in x, y, z order (argument evaluation order is unspecified).
template <class Dist>
Eigen::Vector3d draw3(Dist& dist, Rng& rng) {
    Eigen::Vector3d v;
    v.x() = dist(rng);
    v.y() = dist(rng);
    v.z() = dist(rng);
    return v;
}

inline Eigen::Vector3d sample_surface(const Part& part, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Eigen::Vector3d& h = part.half;
    Eigen::Vector3d local;
    switch (part.shape) {
    case Shape::box: {
        // Face pairs normal to x, y, z, chosen by area.
        const std::array<double, 3> area{h.y() * h.z(), h.x() * h.z(), h.x() * h.y()};
        const double r = u01(rng) * (area[0] + area[1] + area[2]);
        const int axis = r < area[0] ? 0 : (r < area[0] + area[1] ? 1 : 2);
        local = draw3(u, rng);
        local[axis] = u01(rng) < 0.5 ? -1.0 : 1.0;
        local = local.cwiseProduct(h);
        break;
    }
    case Shape::ellipsoid: {
        std::normal_distribution<double> g(0.0, 1.0);
        Eigen::Vector3d d = draw3(g, rng);
        while (d.norm() < 1e-12) d = draw3(g, rng);
        local = d.normalized().cwiseProduct(h);
        break;
    }
    case Shape::cylinder: {
        const double mean_r = 0.5 * (h.x() + h.z());
        const double side = 2.0 * std::numbers::pi * mean_r * 2.0 * h.y();
        const double caps = 2.0 * std::numbers::pi * mean_r * mean_r;
        const double theta = 2.0 * std::numbers::pi * u01(rng);
        if (u01(rng) * (side + caps) < side) {
            const double y = h.y() * u(rng);
            local = Eigen::Vector3d(h.x() * std::cos(theta), y, h.z() * std::sin(theta));
        } else {
            const double rho = std::sqrt(u01(rng));
            const double y = u01(rng) < 0.5 ? -h.y() : h.y();
            local = Eigen::Vector3d(h.x() * rho * std::cos(theta), y, h.z() * rho * std::sin(theta));
        }
        break;
    }
    }
    return part.center + local;
}

/// Largest-remainder apportionment of `total` over `weights` with at least one
/// unit per entry. Requires total >= weights.size().
inline std::vector<int> apportion(const std::vector<double>& weights, int total) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    const int k = static_cast<int>(weights.size());
    std::vector<int> counts(weights.size(), 1);
    const int free = total - k;
    std::vector<std::pair<double, int>> rem;
    int used = 0;
    for (int i = 0; i < k; ++i) {
        const double exact = free * weights[static_cast<std::size_t>(i)] / sum;
        const int whole = static_cast<int>(std::floor(exact));
        counts[static_cast<std::size_t>(i)] += whole;
        used += whole;
        rem.emplace_back(-(exact - whole), i);
    }
    std::sort(rem.begin(), rem.end());
    for (int i = 0; used < free; ++i, ++used) counts[static_cast<std::size_t>(rem[static_cast<std::size_t>(i)].second)] += 1;
    return counts;
}

inline std::string model_id(const std::string& category, int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%04d", index);
    return category + buf;
}

inline std::string category_token(int c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "9%07d", c);
    return buf;
}

} // namespace synth

inline RawModel generate_synthetic_model(const SyntheticSpec& spec, int category, int index) {
    auto [name, parts] = synth::family_for(category);
    const std::string id = synth::model_id(name, index);
    Rng rng = make_rng(spec.seed, id, "synthetic");
    std::uniform_real_distribution<double> scale(0.8, 1.2);
    std::uniform_real_distribution<double> global(0.85, 1.15);
    std::normal_distribution<double> shift(0.0, 0.04);
    std::normal_distribution<double> noise(0.0, 0.005);

    const double g = global(rng);
    std::vector<double> weights;
    for (auto& p : parts) {
        p.half = p.half.cwiseProduct(synth::draw3(scale, rng)) * g;
        p.center = (p.center + synth::draw3(shift, rng)) * g;
        p.weight *= scale(rng);
        weights.push_back(p.weight);
    }
    const auto counts = synth::apportion(weights, spec.points_per_model);

    std::vector<Eigen::Vector3d> points;
    std::vector<int> labels;
    points.reserve(static_cast<std::size_t>(spec.points_per_model));
    for (std::size_t k = 0; k < parts.size(); ++k) {
        for (int i = 0; i < counts[k]; ++i) {
            const Eigen::Vector3d p = synth::sample_surface(parts[k], rng);
            points.push_back(p + synth::draw3(noise, rng));
            labels.push_back(static_cast<int>(k) + 1);
        }
    }
    // Raw files carry no particular order.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Eigen::Vector3d> shuffled_points;
    std::vector<int> shuffled_labels;
    shuffled_points.reserve(points.size());
    shuffled_labels.reserve(points.size());
    for (auto i : order) {
        shuffled_points.push_back(points[i]);
        shuffled_labels.push_back(labels[i]);
    }
    return make_raw_model(id, name, shuffled_points, std::move(shuffled_labels));
}

/// Models in category-major order. Pure function of the spec.
inline std::vector<RawModel> generate_synthetic(const SyntheticSpec& spec) {
    validate(spec);
    std::vector<RawModel> models;
    models.reserve(static_cast<std::size_t>(spec.categories) * static_cast<std::size_t>(spec.models_per_category));
    for (int c = 0; c < spec.categories; ++c) {
        for (int m = 0; m < spec.models_per_category; ++m) models.push_back(generate_synthetic_model(spec, c, m));
    }
    return models;
}

inline int synthetic_test_count(const SyntheticSpec& spec) {
    int t = static_cast<int>(std::lround(spec.test_fraction * spec.models_per_category));
    if (spec.test_fraction > 0.0 && spec.models_per_category >= 2) t = std::clamp(t, 1, spec.models_per_category - 1);
    return std::min(t, spec.models_per_category);
}

/// The last round(test_fraction * models) models of each category are test.
inline DatasetManifest synthetic_manifest(const SyntheticSpec& spec) {
    validate(spec);
    DatasetManifest m;
    const int test = synthetic_test_count(spec);
    for (int c = 0; c < spec.categories; ++c) {
        const std::string name = synth::family_for(c).first;
        m.category_map[synth::category_token(c)] = name;
        for (int i = 0; i < spec.models_per_category; ++i) {
            (i < spec.models_per_category - test ? m.train_ids : m.test_ids).push_back(synth::model_id(name, i));
        }
    }
    return m;
}

} // namespace metasel
