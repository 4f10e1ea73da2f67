#pragma once

// Per-model projection: the encoder half of a semantic auto-encoder. For
// points X (3 x N) and semantics S (3 x N) the projection W (3 x 3) solves
//
//     (S S^T) W + W (lambda X X^T) = (1 + lambda) S X^T.
//
// S S^T is positive definite when every part is present and X X^T is positive
// semidefinite, so the solution is unique for every lambda >= 0.

#include "metasel/error.hpp"
#include "metasel/parallel.hpp"
#include "metasel/preprocess.hpp"
#include "metasel/semantics.hpp"
#include "metasel/sylvester.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace metasel {

enum class SylvesterSolver { direct_kronecker, bartels_stewart };

inline const char* solver_name(SylvesterSolver s) {
    return s == SylvesterSolver::direct_kronecker ? "direct_kronecker" : "bartels_stewart";
}

inline SylvesterSolver parse_solver(std::string_view name) {
    if (name == "direct_kronecker") return SylvesterSolver::direct_kronecker;
    if (name == "bartels_stewart") return SylvesterSolver::bartels_stewart;
    throw InvalidArgument("unknown solver '" + std::string(name) + "'");
}

struct EncoderConfig {
    double lambda = 0.2;
    SylvesterSolver solver = SylvesterSolver::direct_kronecker;
};

using FlatProjection = std::array<double, 9>;

/// Row-major: flat[3*i + j] = w(i, j).
inline FlatProjection flatten_row_major(const Eigen::Matrix3d& w) {
    FlatProjection flat{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) flat[static_cast<std::size_t>(3 * i + j)] = w(i, j);
    }
    return flat;
}

struct ProjectionModel {
    std::string model_id;
    std::string category;
    Eigen::Matrix3d w;
    FlatProjection w_flat;
};

struct CategoryPrototype {
    std::string category;
    FlatProjection w_prime;
    std::size_t support;
};

struct SylvesterSystem {
    Eigen::Matrix3d a;
    Eigen::Matrix3d b;
    Eigen::Matrix3d c;
};

inline SylvesterSystem projection_system(const Eigen::Matrix3Xd& x, const Eigen::Matrix3Xd& s, double lambda) {
    return {s * s.transpose(), lambda * (x * x.transpose()), (1.0 + lambda) * (s * x.transpose())};
}

/// Solves for W with a general 3 x N semantic matrix. Rejects a singular
/// S S^T, non-finite input and negative lambda, and verifies the residual
///   ||A W + W B - C||_F <= 1e-8 (||A||_F + ||B||_F) max(||W||_F, 1).
inline Eigen::Matrix3d solve_projection_matrix(const Eigen::Matrix3Xd& x, const Eigen::Matrix3Xd& s,
                                               const EncoderConfig& config) {
    if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
        throw InvalidInputError("lambda must be finite and nonnegative");
    }
    if (x.cols() != s.cols()) throw InvalidInputError("points and semantics have different column counts");
    if (!x.allFinite() || !s.allFinite()) throw InvalidInputError("non-finite points or semantics");

    const SylvesterSystem sys = projection_system(x, s, config.lambda);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sys.a, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff()))) {
        throw DegenerateSemanticsError("S S^T is singular (a semantic direction is empty)");
    }

    Eigen::Matrix3d w;
    switch (config.solver) {
    case SylvesterSolver::direct_kronecker: w = solve_sylvester_kronecker(sys.a, sys.b, sys.c); break;
    case SylvesterSolver::bartels_stewart: w = solve_sylvester_bartels_stewart(sys.a, sys.b, sys.c); break;
    }

    if (!w.allFinite()) throw NumericalError("projection is not finite");
    const double residual = sylvester_residual(sys.a, sys.b, sys.c, w);
    const double bound = 1e-8 * (sys.a.norm() + sys.b.norm()) * std::max(w.norm(), 1.0);
    if (!(residual <= bound)) {
        throw NumericalError("Sylvester residual " + std::to_string(residual) + " exceeds " + std::to_string(bound));
    }
    return w;
}

inline ProjectionModel solve_projection(const Eigen::Matrix3Xd& x, const SemanticMatrix& s, const EncoderConfig& config,
                                        std::string model_id = {}, std::string category = {}) {
    Eigen::Matrix3d w = solve_projection_matrix(x, s.data, config);
    return ProjectionModel{std::move(model_id), std::move(category), w, flatten_row_major(w)};
}

inline ProjectionModel encode_model(const PointCloudModel& model, const EncoderConfig& config) {
    try {
        const SemanticMatrix s = build_semantics(model.labels);
        return solve_projection(model.points.transpose(), s, config, model.model_id, model.category);
    } catch (Error& e) {
        e.add_context(model.model_id);
        throw;
    }
}

/// One projection per model, in input order for any thread count.
inline std::vector<ProjectionModel> encode_dataset(const std::vector<PointCloudModel>& models,
                                                   const EncoderConfig& config, unsigned threads = 1) {
    std::vector<ProjectionModel> out(models.size());
    parallel_for(models.size(), threads, [&](std::size_t i) { out[i] = encode_model(models[i], config); });
    return out;
}

/// Mean flattened projection per category, categories in alphabetical order.
/// Each mean is accumulated in model-id order.
inline std::vector<CategoryPrototype> category_averages(const std::vector<ProjectionModel>& projections) {
    if (projections.empty()) throw EmptyInputError("category_averages: no projections");
    std::map<std::string, std::vector<const ProjectionModel*>> groups;
    for (const auto& p : projections) groups[p.category].push_back(&p);

    std::vector<CategoryPrototype> out;
    for (auto& [category, members] : groups) {
        std::stable_sort(members.begin(), members.end(),
                         [](const ProjectionModel* a, const ProjectionModel* b) { return a->model_id < b->model_id; });
        FlatProjection sum{};
        for (const auto* m : members) {
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += m->w_flat[k];
        }
        for (double& v : sum) v /= static_cast<double>(members.size());
        out.push_back({category, sum, members.size()});
    }
    return out;
}

} // namespace metasel
