#include "helpers.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace metasel;
using testing_helpers::cloud;
using testing_helpers::raw;

namespace {

std::multiset<std::pair<std::vector<double>, int>> pairs_of(const PointMatrix& p, const std::vector<int>& labels) {
    std::multiset<std::pair<std::vector<double>, int>> out;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        out.insert({{p(i, 0), p(i, 1), p(i, 2)}, labels[static_cast<std::size_t>(i)]});
    }
    return out;
}

RawModel random_raw(std::size_t n, std::mt19937_64& rng, const std::string& id = "m") {
    return raw(oracle::random_points(n, rng), oracle::random_labels(n, rng), id);
}

} // namespace

TEST(FilterThreePart, KeepsExactlyThreeDistinctLabels) {
    const std::vector<std::array<double, 3>> p4 = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const std::vector<RawModel> in = {
        raw(p4, {1, 2, 3, 1}, "keep"),
        raw(p4, {1, 2, 1, 2}, "two"),
        raw(p4, {1, 2, 3, 4}, "four"),
        raw(p4, {12, 7, 30, 7}, "relabel"),
    };
    const auto out = filter_three_part(in);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].model_id, "keep");
    EXPECT_EQ(out[0].labels, (std::vector<int>{1, 2, 3, 1}));
    EXPECT_EQ(out[1].model_id, "relabel");
    EXPECT_EQ(out[1].labels, (std::vector<int>{2, 1, 3, 1}));
    EXPECT_TRUE(filter_three_part({}).empty());
}

TEST(FilterThreePart, Idempotent) {
    std::mt19937_64 rng(1);
    std::vector<RawModel> in;
    for (int i = 0; i < 20; ++i) {
        auto m = random_raw(12, rng, "m" + std::to_string(i));
        for (auto& l : m.labels) l = l * 5 + (i % 3);
        if (i % 4 == 0) m.labels[0] = 99;
        in.push_back(m);
    }
    const auto once = filter_three_part(in);
    const auto twice = filter_three_part(once);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(once[i].labels, twice[i].labels);
}

TEST(Resample, DownsamplesKeepingEveryLabel) {
    std::mt19937_64 rng(2);
    const auto m = random_raw(2048, rng);
    const auto r = resample(m, 1024, 5);
    EXPECT_EQ(r.size(), 1024);
    EXPECT_EQ(std::set<int>(r.labels.begin(), r.labels.end()), (std::set<int>{1, 2, 3}));
    // Every output pair is an input pair.
    const auto input = pairs_of(m.points, m.labels);
    for (const auto& pr : pairs_of(r.points, r.labels)) EXPECT_TRUE(input.count(pr));
}

TEST(Resample, SameCountIsAPermutation) {
    std::mt19937_64 rng(3);
    const auto m = random_raw(300, rng);
    const auto r = resample(m, 300, 11);
    EXPECT_EQ(pairs_of(m.points, m.labels), pairs_of(r.points, r.labels));
}

TEST(Resample, UpsamplesWithReplacement) {
    std::mt19937_64 rng(4);
    const auto m = random_raw(500, rng);
    const auto r = resample(m, 1024, 1);
    EXPECT_EQ(r.size(), 1024);
    EXPECT_EQ(std::set<int>(r.labels.begin(), r.labels.end()), (std::set<int>{1, 2, 3}));
    const auto input = pairs_of(m.points, m.labels);
    const auto output = pairs_of(r.points, r.labels);
    for (const auto& pr : output) EXPECT_TRUE(input.count(pr));
    // Every original point survives when upsampling.
    for (const auto& pr : input) EXPECT_GE(output.count(pr), 1u);
}

TEST(Resample, RareLabelKeepsOnePoint) {
    std::vector<std::array<double, 3>> pts;
    std::vector<int> labels;
    for (int i = 0; i < 1000; ++i) {
        pts.push_back({double(i), 0.0, 0.0});
        labels.push_back(i == 0 ? 3 : (i == 1 ? 2 : 1));
    }
    const auto r = resample(raw(pts, labels), 16, 3);
    EXPECT_EQ(r.size(), 16);
    std::map<int, int> counts;
    for (int l : r.labels) ++counts[l];
    EXPECT_EQ(counts[2], 1);
    EXPECT_EQ(counts[3], 1);
    EXPECT_EQ(counts[1], 14);
}

TEST(Resample, DeterministicAndValidated) {
    std::mt19937_64 rng(5);
    const auto m = random_raw(400, rng);
    const auto a = resample(m, 100, 9);
    const auto b = resample(m, 100, 9);
    EXPECT_EQ(a.points, b.points);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_THROW(resample(m, 2, 9), InvalidArgument);
}

TEST(SortByLabel, Examples) {
    const std::vector<std::array<double, 3>> pqr = {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    const auto s = sort_by_label(raw(pqr, {3, 1, 2}));
    EXPECT_EQ(s.labels, (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(s.points(0, 0), 2.0);
    EXPECT_EQ(s.points(1, 0), 3.0);
    EXPECT_EQ(s.points(2, 0), 1.0);

    const auto stable = sort_by_label(raw(pqr, {2, 1, 1}));
    EXPECT_EQ(stable.points(0, 0), 2.0);
    EXPECT_EQ(stable.points(1, 0), 3.0);
    EXPECT_EQ(stable.points(2, 0), 1.0);

    const auto sorted = sort_by_label(raw(pqr, {1, 2, 3}));
    EXPECT_EQ(sorted.points, testing_helpers::to_matrix(pqr));

    EXPECT_THROW(sort_by_label(raw(pqr, {1, 2, 4})), InvalidLabelError);
}

TEST(SortByLabel, IdempotentAndPairPreserving) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_raw(50, rng);
        const auto once = sort_by_label(m);
        const auto twice = sort_by_label(once);
        EXPECT_TRUE(std::is_sorted(once.labels.begin(), once.labels.end()));
        EXPECT_EQ(once.points, twice.points);
        EXPECT_EQ(pairs_of(m.points, m.labels), pairs_of(once.points, once.labels));
    }
}

TEST(Normalize, Examples) {
    const auto a = normalize_unit_sphere(cloud({{2, 0, 0}, {0, 0, 0}}, {1, 2}));
    EXPECT_NEAR(a.points(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(a.points(1, 0), -1.0, 1e-15);

    const auto b = normalize_unit_sphere(cloud({{0, 4, 0}, {0, 0, 0}}, {1, 2}));
    EXPECT_NEAR(b.points(0, 1), 1.0, 1e-15);
    EXPECT_NEAR(b.points(1, 1), -1.0, 1e-15);

    const auto fixed = cloud({{1, 0, 0}, {-1, 0, 0}, {0, 0.5, 0}, {0, -0.5, 0}}, {1, 2, 3, 1});
    EXPECT_LT((normalize_unit_sphere(fixed).points - fixed.points).cwiseAbs().maxCoeff(), 1e-15);

    EXPECT_THROW(normalize_unit_sphere(cloud({{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}}, {1, 2, 3})),
                 DegenerateModelError);
}

TEST(Normalize, ContractAndIdempotence) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> shift(-50.0, 50.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto m = cloud(oracle::random_points(200, rng, 0.1 + trial), oracle::random_labels(200, rng));
        m.points.rowwise() += Eigen::RowVector3d(shift(rng), shift(rng), shift(rng));
        const auto n = normalize_unit_sphere(m);
        EXPECT_LE(n.points.colwise().mean().norm(), 1e-9);
        EXPECT_NEAR(n.points.rowwise().norm().maxCoeff(), 1.0, 1e-9);
        EXPECT_LE(n.points.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
        EXPECT_EQ(n.labels, m.labels);
        const auto again = normalize_unit_sphere(n);
        EXPECT_LE((again.points - n.points).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Preprocess, ValidatePointCloud) {
    std::mt19937_64 rng(8);
    const auto m = preprocess_model(random_raw(300, rng), 128, 1);
    EXPECT_NO_THROW(validate_point_cloud(m, 128));
    EXPECT_THROW(validate_point_cloud(m, 64), InvalidInputError);
    auto missing = m;
    for (auto& l : missing.labels) l = l == 3 ? 1 : l;
    EXPECT_THROW(validate_point_cloud(missing, 128), DegenerateSemanticsError);
}
