// Acceptance suite: one PASS/FAIL line per criterion.
//
// The reference-accuracy check needs the real ShapeNet-part subset. Point
// METASEL_SHAPENET_ROOT at a prepared root (with manifest.json) to run it;
// otherwise it is reported as FAIL (not run) and excluded from the exit status.
#include "helpers.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>

using namespace metasel;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int g_failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++g_failures;
    std::printf("%s  %s  (%s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
}

Eigen::Matrix3Xd transpose_points(const std::vector<std::array<double, 3>>& pts) {
    return testing_helpers::to_matrix(pts).transpose();
}

double relative_gap(const Eigen::Matrix3d& w, const oracle::Mat3& ref) {
    double diff = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            diff = std::max(diff, std::fabs(w(i, j) - ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
        }
    }
    return diff / std::max(oracle::max_abs(ref), 1e-300);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

RunConfig desk_config(Variant v) {
    RunConfig c;
    c.synthetic = SyntheticSpec{10, 60, 1024, 0, 0.2};
    c.points = 1024;
    c.variant = v;
    return c;
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> size(4, 64);
    const std::array<double, 4> lambdas{0.0, 0.2, 1.0, 10.0};
    double worst = 0.0;
    const int instances = 1200;
    for (int t = 0; t < instances; ++t) {
        const std::size_t n = size(rng);
        const double lambda = lambdas[static_cast<std::size_t>(t) % 4];
        const auto pts = oracle::random_points(n, rng, t % 3 == 0 ? 10.0 : 1.0);
        const auto labels = oracle::random_labels(n, rng);
        const auto ref = oracle::projection(pts, labels, lambda);
        for (auto solver : {SylvesterSolver::direct_kronecker, SylvesterSolver::bartels_stewart}) {
            const auto p = solve_projection(transpose_points(pts), build_semantics(labels), EncoderConfig{lambda, solver});
            worst = std::max(worst, relative_gap(p.w, ref));
        }
    }
    return {worst <= 1e-8, std::to_string(instances) + " instances x 2 solvers, worst relative gap " + fmt("%.3g", worst)};
}

Outcome identity_fixed_point() {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (double lambda : {0.0, 0.2, 1.0, 10.0}) {
        for (int t = 0; t < 25; ++t) {
            const Eigen::Matrix3Xd x = transpose_points(oracle::random_points(8 + static_cast<std::size_t>(t), rng));
            for (auto solver : {SylvesterSolver::direct_kronecker, SylvesterSolver::bartels_stewart}) {
                const Eigen::Matrix3d w = solve_projection_matrix(x, x, EncoderConfig{lambda, solver});
                worst = std::max(worst, (w - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
            }
        }
    }
    return {worst <= 1e-8, "max |W - I| " + fmt("%.3g", worst)};
}

Outcome zero_lambda_centroids() {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        const auto pts = oracle::random_points(4 + static_cast<std::size_t>(t % 61), rng, 5.0);
        const auto labels = oracle::random_labels(pts.size(), rng);
        const auto centroids = oracle::label_centroids(pts, labels);
        const auto p = solve_projection(transpose_points(pts), build_semantics(labels), EncoderConfig{0.0});
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) worst = std::max(worst, std::fabs(p.w(i, j) - centroids[i][j]));
        }
    }
    return {worst <= 1e-10, "500 instances, max deviation " + fmt("%.3g", worst)};
}

Outcome shuffle_invariance(const PreparedData& data) {
    double worst = 0.0;
    std::vector<PointCloudModel> all = data.train;
    all.insert(all.end(), data.test.begin(), data.test.end());
    const EncoderConfig enc;
    for (const auto& m : all) {
        const auto before = encode_model(m, enc);
        const auto after = encode_model(shuffle_points(m, derive_seed(99, m.model_id, "acceptance")), enc);
        worst = std::max(worst, (before.w - after.w).cwiseAbs().maxCoeff());
    }
    std::string accs;
    std::set<double> distinct;
    for (Variant v : {Variant::base, Variant::rs, Variant::sort_asc, Variant::sort_desc}) {
        const double a = run_prepared(data, desk_config(v)).report.accuracy;
        distinct.insert(a);
        accs += std::string(accs.empty() ? "" : " ") + variant_info(v).name + "=" + fmt("%.4f", a);
    }
    return {worst <= 1e-10 && distinct.size() == 1,
            std::to_string(all.size()) + " models, max |dW| " + fmt("%.3g", worst) + "; " + accs};
}

Outcome determinism() {
    const auto root = fs::temp_directory_path() / "metasel_acceptance_det";
    fs::remove_all(root);
    const unsigned many = std::max(4u, std::thread::hardware_concurrency());
    std::vector<std::string> mismatched;
    for (Variant v : {Variant::base, Variant::n_rr_t, Variant::n_j_t}) {
        std::vector<fs::path> dirs;
        for (unsigned threads : {1u, 1u, many, many}) {
            auto c = desk_config(v);
            c.synthetic->models_per_category = 20;
            c.threads = threads;
            c.out = root / (std::string(variant_info(v).name) + "_" + std::to_string(dirs.size()));
            run(c);
            dirs.push_back(c.out);
        }
        for (const char* f : {"predictions.csv", "report.json"}) {
            const auto ref = detail::read_file(dirs[0] / f);
            for (std::size_t i = 1; i < dirs.size(); ++i) {
                if (detail::read_file(dirs[i] / f) != ref) mismatched.push_back(dirs[i].filename().string() + "/" + f);
            }
        }
    }
    fs::remove_all(root);
    return {mismatched.empty(), mismatched.empty() ? "byte-identical at 1 and " + std::to_string(many) + " threads"
                                                   : "differs: " + mismatched.front()};
}

Outcome normalization_contract(const PreparedData& data) {
    double centroid = 0.0, radius = 0.0, idem = 0.0;
    std::vector<PointCloudModel> all = data.train;
    all.insert(all.end(), data.test.begin(), data.test.end());
    for (const auto& m : all) {
        const auto n = normalize_unit_sphere(m);
        centroid = std::max(centroid, n.points.colwise().mean().norm());
        radius = std::max(radius, std::fabs(n.points.rowwise().norm().maxCoeff() - 1.0));
        idem = std::max(idem, (normalize_unit_sphere(n).points - n.points).cwiseAbs().maxCoeff());
    }
    return {centroid <= 1e-9 && radius <= 1e-9 && idem <= 1e-12,
            std::to_string(all.size()) + " models, centroid " + fmt("%.3g", centroid) + ", |r-1| " + fmt("%.3g", radius) +
                ", idempotence " + fmt("%.3g", idem)};
}

Outcome synthetic_end_to_end() {
    std::vector<RunConfig> configs;
    for (const auto& info : kVariants) configs.push_back(desk_config(info.variant));
    const auto start = std::chrono::steady_clock::now();
    const auto rows = run_sweep(configs);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto base = rows.front().accuracy;
    std::string errors;
    for (const auto& r : rows) {
        if (!r.error.empty()) errors += std::string(" ") + variant_info(r.variant).name;
    }
    const bool ok = base && *base >= 0.90 && seconds < 60.0 && errors.empty();
    return {ok, "base accuracy " + (base ? fmt("%.4f", *base) : std::string("n/a")) + ", 13-variant sweep " +
                    fmt("%.1f", seconds) + " s" + (errors.empty() ? "" : ", failed:" + errors)};
}

Outcome shapenet_reproduction(const char* root) {
    // Best result per target over the lambda grid, within 2 points absolute.
    const std::array<double, 4> grid{0.05, 0.2, 1.0, 5.0};
    struct Target {
        const char* what;
        Variant variant;
        double expected;
        double best_gap = 1e9;
        double best_value = 0.0;
    };
    std::vector<Target> targets = {{"base", Variant::base, 93.19}, {"n", Variant::n, 95.59}, {"n_t", Variant::n_t, 95.99},
                                   {"w_recall", Variant::n, 95.99}, {"w_precision", Variant::n, 96.12}};
    RunConfig c;
    c.dataset = fs::path(root);
    const auto data = prepare_data(c);
    for (double lambda : grid) {
        for (Variant v : {Variant::base, Variant::n, Variant::n_t}) {
            auto cv = c;
            cv.variant = v;
            cv.encoder.lambda = lambda;
            const auto r = run_prepared(data, cv).report;
            for (auto& t : targets) {
                if (t.variant != v) continue;
                const std::string what = t.what;
                const double value = 100.0 * (what == "w_recall"      ? r.weighted_recall
                                              : what == "w_precision" ? r.weighted_precision
                                                                      : r.accuracy);
                if (std::fabs(value - t.expected) < t.best_gap) {
                    t.best_gap = std::fabs(value - t.expected);
                    t.best_value = value;
                }
            }
        }
    }
    bool ok = true;
    std::string detail;
    for (const auto& t : targets) {
        ok = ok && t.best_gap <= 2.0;
        detail += std::string(detail.empty() ? "" : ", ") + t.what + " " + fmt("%.2f", t.best_value) + " vs " +
                  fmt("%.2f", t.expected);
    }
    return {ok, detail};
}

} // namespace

int main() {
    report("sylvester oracle equivalence", oracle_equivalence);
    report("identity fixed point", identity_fixed_point);
    report("lambda=0 closed form", zero_lambda_centroids);

    PreparedData desk;
    try {
        desk = prepare_data(desk_config(Variant::base));
    } catch (const std::exception& e) {
        std::printf("FAIL  synthetic data preparation (%s)\n", e.what());
        return 1;
    }
    report("shuffle invariance", [&] { return shuffle_invariance(desk); });
    report("determinism across thread counts", determinism);
    report("normalization contract", [&] { return normalization_contract(desk); });
    report("synthetic end-to-end", synthetic_end_to_end);

    const int desk_failures = g_failures;
    if (const char* root = std::getenv("METASEL_SHAPENET_ROOT"); root && *root) {
        report("ShapeNet-part reference accuracies", [&] { return shapenet_reproduction(root); });
        return g_failures == 0 ? 0 : 1;
    }
    std::printf("FAIL  ShapeNet-part reference accuracies (not run: dataset unavailable; set METASEL_SHAPENET_ROOT)\n");
    return desk_failures == 0 ? 0 : 1;
}
