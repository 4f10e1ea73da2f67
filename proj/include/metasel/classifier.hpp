#pragma once

#include "metasel/encoder.hpp"
#include "metasel/error.hpp"
#include "metasel/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace metasel {

/// Rows follow the test order, columns the train order.
struct SimilarityMatrix {
    Eigen::MatrixXd values;
};

struct Prediction {
    std::string model_id;
    std::string true_category;
    std::string predicted_category;
    std::string best_train_id;
    double similarity = 0.0;
};

/// sum(u_i v_i) / (sqrt(sum u_i^2) sqrt(sum v_i^2)), clamped to [-1, 1].
inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw InvalidInputError("cosine_similarity: length mismatch");
    double dot = 0.0;
    double uu = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (!(uu > 0.0) || !(vv > 0.0)) throw ZeroVectorError("cosine_similarity: zero-norm vector");
    return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

namespace detail {

inline void require_nonzero(const std::vector<ProjectionModel>& models, const char* role) {
    for (const auto& m : models) {
        const bool zero = std::all_of(m.w_flat.begin(), m.w_flat.end(), [](double v) { return v == 0.0; });
        if (zero) throw ZeroVectorError(std::string(role) + " projection " + m.model_id + " has zero norm");
    }
}

} // namespace detail

inline SimilarityMatrix similarity_matrix(const std::vector<ProjectionModel>& test,
                                          const std::vector<ProjectionModel>& train, unsigned threads = 1) {
    if (test.empty() || train.empty()) throw EmptyInputError("similarity_matrix: empty test or train set");
    detail::require_nonzero(test, "test");
    detail::require_nonzero(train, "train");
    SimilarityMatrix s{Eigen::MatrixXd(static_cast<Eigen::Index>(test.size()), static_cast<Eigen::Index>(train.size()))};
    parallel_for(test.size(), threads, [&](std::size_t t) {
        for (std::size_t m = 0; m < train.size(); ++m) {
            s.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(m)) =
                cosine_similarity(test[t].w_flat, train[m].w_flat);
        }
    });
    return s;
}

/// Index of the row maximum; the lowest index wins ties.
inline Eigen::Index argmax_row(const SimilarityMatrix& s, Eigen::Index row) {
    if (s.values.cols() == 0) throw EmptyInputError("argmax_row: no columns");
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < s.values.cols(); ++c) {
        if (s.values(row, c) > s.values(row, best)) best = c;
    }
    return best;
}

/// Category of the best column per row.
inline std::vector<std::string> predict_categories(const SimilarityMatrix& s, const std::vector<std::string>& train_labels) {
    if (static_cast<std::size_t>(s.values.cols()) != train_labels.size()) {
        throw InvalidInputError("predict: label count does not match the matrix columns");
    }
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(s.values.rows()));
    for (Eigen::Index t = 0; t < s.values.rows(); ++t) out.push_back(train_labels[static_cast<std::size_t>(argmax_row(s, t))]);
    return out;
}

inline std::vector<Prediction> predict(const SimilarityMatrix& s, const std::vector<ProjectionModel>& test,
                                       const std::vector<ProjectionModel>& train) {
    if (static_cast<std::size_t>(s.values.rows()) != test.size() ||
        static_cast<std::size_t>(s.values.cols()) != train.size()) {
        throw InvalidInputError("predict: matrix shape does not match the projections");
    }
    std::vector<Prediction> out;
    out.reserve(test.size());
    for (std::size_t t = 0; t < test.size(); ++t) {
        const auto best = static_cast<std::size_t>(argmax_row(s, static_cast<Eigen::Index>(t)));
        out.push_back({test[t].model_id, test[t].category, train[best].category, train[best].model_id,
                       s.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(best))});
    }
    return out;
}

/// Prototypes as pseudo train models whose id is the category name.
inline std::vector<ProjectionModel> prototypes_as_models(const std::vector<CategoryPrototype>& prototypes) {
    std::vector<ProjectionModel> out;
    for (const auto& p : prototypes) {
        Eigen::Matrix3d w;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) w(i, j) = p.w_prime[static_cast<std::size_t>(3 * i + j)];
        }
        out.push_back({p.category, p.category, w, p.w_prime});
    }
    return out;
}

enum class KnnMode { model, prototype };

/// 1-NN cosine classification against every train projection, or against the
/// per-category prototypes.
inline std::vector<Prediction> classify(const std::vector<ProjectionModel>& test, const std::vector<ProjectionModel>& train,
                                        KnnMode mode = KnnMode::model, unsigned threads = 1) {
    if (mode == KnnMode::model) return predict(similarity_matrix(test, train, threads), test, train);
    const auto references = prototypes_as_models(category_averages(train));
    return predict(similarity_matrix(test, references, threads), test, references);
}

} // namespace metasel
