#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace metasel;

namespace {

ProjectionModel proj(std::string id, std::string cat, FlatProjection flat) {
    Eigen::Matrix3d w;
    for (int k = 0; k < 9; ++k) w(k / 3, k % 3) = flat[static_cast<std::size_t>(k)];
    return {std::move(id), std::move(cat), w, flat};
}

FlatProjection unit(int k, double scale = 1.0) {
    FlatProjection f{};
    f[static_cast<std::size_t>(k)] = scale;
    return f;
}

double scalar_cosine(const FlatProjection& u, const FlatProjection& v) {
    long double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < 9; ++i) {
        dot += static_cast<long double>(u[i]) * v[i];
        nu += static_cast<long double>(u[i]) * u[i];
        nv += static_cast<long double>(v[i]) * v[i];
    }
    return static_cast<double>(dot / (std::sqrt(nu) * std::sqrt(nv)));
}

FlatProjection random_flat(std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    FlatProjection f;
    for (auto& x : f) x = d(rng);
    return f;
}

} // namespace

TEST(Cosine, Examples) {
    EXPECT_DOUBLE_EQ(cosine_similarity(unit(0), unit(0)), 1.0);
    EXPECT_DOUBLE_EQ(cosine_similarity(unit(0), unit(1)), 0.0);
    FlatProjection half = unit(0);
    half[1] = 1.0;
    EXPECT_NEAR(cosine_similarity(unit(0), half), std::sqrt(2.0) / 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(cosine_similarity(unit(0), unit(0, -3.0)), -1.0);
    EXPECT_THROW(cosine_similarity(unit(0), FlatProjection{}), ZeroVectorError);
}

TEST(Cosine, ScaleInvariantAndBounded) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const auto u = random_flat(rng);
        const auto v = random_flat(rng);
        FlatProjection scaled = u;
        for (auto& x : scaled) x *= 123.5;
        const double c = cosine_similarity(u, v);
        EXPECT_NEAR(cosine_similarity(scaled, v), c, 1e-14);
        EXPECT_LE(std::fabs(c), 1.0);
        EXPECT_NEAR(c, scalar_cosine(u, v), 1e-14);
        EXPECT_NEAR(cosine_similarity(v, u), c, 1e-15);
    }
}

TEST(SimilarityMatrix, ExampleAndPrediction) {
    const std::vector<ProjectionModel> train = {proj("a", "A", unit(0)), proj("b", "B", unit(1))};
    const std::vector<ProjectionModel> test = {proj("t1", "A", unit(0, 2.0)), proj("t2", "B", unit(1, 0.5))};
    const auto s = similarity_matrix(test, train);
    Eigen::MatrixXd expected(2, 2);
    expected << 1, 0, 0, 1;
    EXPECT_EQ(s.values, expected);
    const auto p = predict(s, test, train);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0].predicted_category, "A");
    EXPECT_EQ(p[0].best_train_id, "a");
    EXPECT_EQ(p[1].predicted_category, "B");
    EXPECT_DOUBLE_EQ(p[1].similarity, 1.0);
    EXPECT_EQ(predict_categories(s, {"A", "B"}), (std::vector<std::string>{"A", "B"}));
}

TEST(SimilarityMatrix, TieGoesToLowestTrainIndex) {
    FlatProjection diag = unit(0);
    diag[1] = 1.0;
    const std::vector<ProjectionModel> train = {proj("x", "X", unit(0)), proj("y", "Y", unit(1))};
    const auto p = classify({proj("t", "Y", diag)}, train);
    EXPECT_EQ(p[0].best_train_id, "x");
    EXPECT_EQ(p[0].predicted_category, "X");
}

TEST(SimilarityMatrix, AgreesWithScalarRecomputation) {
    std::mt19937_64 rng(7);
    std::vector<ProjectionModel> train, test;
    for (int i = 0; i < 40; ++i) train.push_back(proj("r" + std::to_string(i), "C" + std::to_string(i % 4), random_flat(rng)));
    for (int i = 0; i < 15; ++i) test.push_back(proj("t" + std::to_string(i), "C" + std::to_string(i % 4), random_flat(rng)));
    const auto s = similarity_matrix(test, train, 3);
    ASSERT_EQ(s.values.rows(), 15);
    ASSERT_EQ(s.values.cols(), 40);
    const auto p = predict(s, test, train);
    for (std::size_t t = 0; t < test.size(); ++t) {
        double best = -2.0;
        std::size_t arg = 0;
        for (std::size_t r = 0; r < train.size(); ++r) {
            const double c = scalar_cosine(test[t].w_flat, train[r].w_flat);
            EXPECT_NEAR(s.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(r)), c, 1e-14);
            if (c > best) {
                best = c;
                arg = r;
            }
        }
        EXPECT_EQ(p[t].best_train_id, train[arg].model_id);
        EXPECT_EQ(p[t].predicted_category, train[arg].category);
        EXPECT_EQ(p[t].true_category, test[t].category);
    }
    const auto single = similarity_matrix(test, train, 1);
    EXPECT_EQ(single.values, s.values);
}

TEST(SimilarityMatrix, Errors) {
    const std::vector<ProjectionModel> train = {proj("a", "A", unit(0))};
    EXPECT_THROW(similarity_matrix({}, train), EmptyInputError);
    EXPECT_THROW(similarity_matrix(train, {}), EmptyInputError);
    try {
        similarity_matrix({proj("zero_model", "A", FlatProjection{})}, train);
        FAIL();
    } catch (const ZeroVectorError& e) {
        EXPECT_NE(std::string(e.what()).find("zero_model"), std::string::npos);
    }
}

TEST(Classify, PrototypeMode) {
    const std::vector<ProjectionModel> train = {proj("a1", "A", unit(0)), proj("a2", "A", unit(0, 3.0)),
                                                proj("b1", "B", unit(1))};
    const auto p = classify({proj("t", "A", unit(0, 0.1))}, train, KnnMode::prototype);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0].predicted_category, "A");
    EXPECT_EQ(p[0].best_train_id, "A");
}
