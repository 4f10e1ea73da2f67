#pragma once

// End-to-end run: load or generate -> keep three-part models -> resample ->
// sort by label -> variant transforms -> encode train and test -> 1-NN cosine
// classification -> evaluation, with every intermediate written under `out`.

#include "metasel/artifacts.hpp"
#include "metasel/augment.hpp"
#include "metasel/classifier.hpp"
#include "metasel/dataset_io.hpp"
#include "metasel/encoder.hpp"
#include "metasel/evaluate.hpp"
#include "metasel/parallel.hpp"
#include "metasel/preprocess.hpp"
#include "metasel/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace metasel {

enum class Variant { base, rs, sort_asc, sort_desc, n, n_rr_x, n_rr_y, n_rr_z, n_rr_xyz, n_t, n_rr_t, n_j, n_j_t };

struct VariantInfo {
    Variant variant;
    const char* name;
    const char* label;
};

inline constexpr std::array<VariantInfo, 13> kVariants{{
    {Variant::base, "base", "Base"},
    {Variant::rs, "rs", "Random Shuffle (RS)"},
    {Variant::sort_asc, "sort_asc", "Sorted (Ascending)"},
    {Variant::sort_desc, "sort_desc", "Sorted (Descending)"},
    {Variant::n, "n", "Normalization (N)"},
    {Variant::n_rr_x, "n_rr_x", "N + RR (x-axis)"},
    {Variant::n_rr_y, "n_rr_y", "N + RR (y-axis)"},
    {Variant::n_rr_z, "n_rr_z", "N + RR (z-axis)"},
    {Variant::n_rr_xyz, "n_rr_xyz", "N + RR (x, y, z)"},
    {Variant::n_t, "n_t", "N + T"},
    {Variant::n_rr_t, "n_rr_t", "N + RR + T"},
    {Variant::n_j, "n_j", "N + J"},
    {Variant::n_j_t, "n_j_t", "N + J + T"},
}};

inline const VariantInfo& variant_info(Variant v) {
    for (const auto& info : kVariants) {
        if (info.variant == v) return info;
    }
    throw InvalidArgument("unknown variant");
}

inline Variant parse_variant(std::string_view name) {
    for (const auto& info : kVariants) {
        if (name == info.name) return info.variant;
    }
    throw InvalidArgument("unknown variant '" + std::string(name) + "'");
}

inline const char* knn_name(KnnMode m) { return m == KnnMode::model ? "model" : "prototype"; }

inline KnnMode parse_knn(std::string_view name) {
    if (name == "model") return KnnMode::model;
    if (name == "prototype") return KnnMode::prototype;
    throw InvalidArgument("unknown knn mode '" + std::string(name) + "'");
}

struct RunConfig {
    std::optional<fs::path> dataset;    ///< ShapeNet-part style root
    std::optional<fs::path> manifest;   ///< defaults to <dataset>/manifest.json
    std::optional<SyntheticSpec> synthetic;
    int points = kDefaultPointCount;
    Variant variant = Variant::base;
    EncoderConfig encoder;
    AugmentConfig augment;
    std::uint64_t seed = 0;
    KnnMode knn = KnnMode::model;
    unsigned threads = 0;               ///< 0 = all hardware threads; never affects results
    fs::path out;                       ///< empty = write nothing
};

inline void validate(const RunConfig& c) {
    if (c.dataset.has_value() == c.synthetic.has_value()) {
        throw InvalidArgument("exactly one of a dataset root or a synthetic spec is required");
    }
    if (c.points < kPartCount) throw InvalidArgument("point count must be at least 3");
    if (!(c.encoder.lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
    validate(c.augment);
    if (c.synthetic) validate(*c.synthetic);
}

/// Everything that influences results. The thread count and output directory
/// are deliberately absent so that report.json does not depend on them.
inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    if (c.dataset) {
        j["dataset"] = c.dataset->string();
        j["manifest"] = c.manifest ? c.manifest->string() : (*c.dataset / "manifest.json").string();
    }
    if (c.synthetic) j["synthetic"] = to_json(*c.synthetic);
    j["points"] = c.points;
    j["variant"] = variant_info(c.variant).name;
    j["lambda"] = c.encoder.lambda;
    j["solver"] = solver_name(c.encoder.solver);
    j["seed"] = c.seed;
    j["knn"] = knn_name(c.knn);
    j["augment"] = {{"translation_range", c.augment.translation_range},
                    {"jitter_sigma", c.augment.jitter_sigma},
                    {"jitter_clip", c.augment.jitter_clip},
                    {"angle_distribution", "uniform[0, 2pi)"}};
    return j;
}

/// Overlays keys present in `j` onto `base`.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {}) {
    try {
        if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("dataset")) base.dataset = fs::path(j.at("dataset").get<std::string>());
        if (j.contains("manifest")) base.manifest = fs::path(j.at("manifest").get<std::string>());
        if (j.contains("synthetic")) {
            const auto& s = j.at("synthetic");
            base.synthetic = s.is_string() && s.get<std::string>() == "default"
                                 ? synthetic_spec_from_json(nlohmann::json::object(), base.seed)
                                 : synthetic_spec_from_json(s, base.seed);
        }
        if (j.contains("points")) base.points = j.at("points").get<int>();
        if (j.contains("variant")) base.variant = parse_variant(j.at("variant").get<std::string>());
        if (j.contains("lambda")) base.encoder.lambda = j.at("lambda").get<double>();
        if (j.contains("solver")) base.encoder.solver = parse_solver(j.at("solver").get<std::string>());
        if (j.contains("knn")) base.knn = parse_knn(j.at("knn").get<std::string>());
        if (j.contains("threads")) base.threads = j.at("threads").get<unsigned>();
        if (j.contains("out")) base.out = fs::path(j.at("out").get<std::string>());
        if (j.contains("augment")) {
            const auto& a = j.at("augment");
            base.augment.translation_range = a.value("translation_range", base.augment.translation_range);
            base.augment.jitter_sigma = a.value("jitter_sigma", base.augment.jitter_sigma);
            base.augment.jitter_clip = a.value("jitter_clip", base.augment.jitter_clip);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    return base;
}

/// Preprocessed train and test models, each in manifest order.
struct PreparedData {
    std::vector<PointCloudModel> train;
    std::vector<PointCloudModel> test;
    std::size_t raw_count = 0;
    std::size_t filtered_count = 0;
};

namespace detail {

inline std::string bare_id(const std::string& id) {
    auto slash = id.rfind('/');
    return slash == std::string::npos ? id : id.substr(slash + 1);
}

} // namespace detail

inline PreparedData prepare_data(const RunConfig& config) {
    validate(config);
    std::vector<RawModel> raw;
    DatasetManifest manifest;
    if (config.synthetic) {
        raw = generate_synthetic(*config.synthetic);
        manifest = synthetic_manifest(*config.synthetic);
    } else {
        manifest = read_manifest(config.manifest ? *config.manifest : *config.dataset / "manifest.json");
        raw = load_dataset(*config.dataset, manifest, config.threads);
    }

    PreparedData data;
    data.raw_count = raw.size();
    std::vector<RawModel> kept = filter_three_part(raw);
    data.filtered_count = kept.size();
    raw.clear();

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < kept.size(); ++i) index.emplace(kept[i].model_id, i);
    auto select = [&](const std::vector<std::string>& ids) {
        std::vector<const RawModel*> picked;
        for (const auto& id : ids) {
            auto it = index.find(detail::bare_id(id));
            if (it != index.end()) picked.push_back(&kept[it->second]);
        }
        std::vector<PointCloudModel> out(picked.size());
        parallel_for(picked.size(), config.threads, [&](std::size_t i) {
            try {
                out[i] = preprocess_model(*picked[i], config.points, config.seed);
            } catch (Error& e) {
                e.add_context("preprocess " + picked[i]->model_id);
                throw;
            }
        });
        return out;
    };
    data.train = select(manifest.train_ids);
    data.test = select(manifest.test_ids);
    if (data.train.empty() || data.test.empty()) {
        throw EmptyEvaluationError("no three-part models left in the train or test split");
    }
    return data;
}

/// Variant transforms for one preprocessed model. Normalization comes first
/// for every N variant and is not repeated after translation or jitter.
inline PointCloudModel apply_variant(const PointCloudModel& model, Variant variant, const AugmentConfig& augment,
                                     std::uint64_t master_seed) {
    auto seed = [&](std::string_view stage) { return derive_seed(master_seed, model.model_id, stage); };
    switch (variant) {
    case Variant::base: return model;
    case Variant::rs: return shuffle_points(model, seed("shuffle"));
    case Variant::sort_asc: return sort_by_label(shuffle_points(model, seed("shuffle")));
    case Variant::sort_desc: return sort_descending(shuffle_points(model, seed("shuffle")));
    default: break;
    }
    PointCloudModel m = normalize_unit_sphere(model);
    switch (variant) {
    case Variant::n: break;
    case Variant::n_rr_x: m = rotate_random(m, Axis::x, seed("rotate")); break;
    case Variant::n_rr_y: m = rotate_random(m, Axis::y, seed("rotate")); break;
    case Variant::n_rr_z: m = rotate_random(m, Axis::z, seed("rotate")); break;
    case Variant::n_rr_xyz: m = rotate_random_all(m, seed("rotate")); break;
    case Variant::n_t: m = translate(m, augment.translation_range, seed("translate")); break;
    case Variant::n_rr_t:
        m = translate(rotate_random_all(m, seed("rotate")), augment.translation_range, seed("translate"));
        break;
    case Variant::n_j: m = jitter(m, augment.jitter_sigma, augment.jitter_clip, seed("jitter")); break;
    case Variant::n_j_t:
        m = translate(jitter(m, augment.jitter_sigma, augment.jitter_clip, seed("jitter")), augment.translation_range,
                      seed("translate"));
        break;
    default: break;
    }
    return m;
}

struct RunResult {
    EvalReport report;
    std::vector<Prediction> predictions;
    std::vector<ProjectionModel> train_projections;
    std::vector<ProjectionModel> test_projections;
    std::vector<CategoryPrototype> prototypes;
};

inline std::vector<PointCloudModel> apply_variant_all(const std::vector<PointCloudModel>& models, const RunConfig& config) {
    std::vector<PointCloudModel> out(models.size());
    parallel_for(models.size(), config.threads, [&](std::size_t i) {
        try {
            out[i] = apply_variant(models[i], config.variant, config.augment, config.seed);
        } catch (Error& e) {
            e.add_context(std::string("augment ") + models[i].model_id);
            throw;
        }
    });
    return out;
}

inline RunResult run_prepared(const PreparedData& data, const RunConfig& config) {
    validate(config);
    RunResult r;
    auto stage = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (Error& e) {
            e.add_context(name);
            throw;
        }
    };
    r.train_projections = stage("encode train", [&] {
        return encode_dataset(apply_variant_all(data.train, config), config.encoder, config.threads);
    });
    r.test_projections = stage("encode test", [&] {
        return encode_dataset(apply_variant_all(data.test, config), config.encoder, config.threads);
    });
    r.prototypes = stage("prototypes", [&] { return category_averages(r.train_projections); });
    r.predictions = stage("classify", [&] {
        return classify(r.test_projections, r.train_projections, config.knn, config.threads);
    });
    std::set<std::string> train_categories;
    for (const auto& p : r.train_projections) train_categories.insert(p.category);
    r.report = stage("evaluate", [&] { return evaluate(r.predictions, train_categories); });
    return r;
}

inline nlohmann::json run_report_json(const RunResult& r, const RunConfig& config) {
    nlohmann::json j = report_to_json(r.report);
    j["variant"] = variant_info(config.variant).name;
    j["variant_label"] = variant_info(config.variant).label;
    j["train_models"] = r.train_projections.size();
    j["test_models"] = r.test_projections.size();
    nlohmann::json supports = nlohmann::json::object();
    for (const auto& p : r.prototypes) supports[p.category] = p.support;
    j["train_support"] = supports;
    j["config"] = config_to_json(config);
    return j;
}

inline void write_artifacts(const RunResult& r, const RunConfig& config, const fs::path& out) {
    fs::create_directories(out);
    detail::write_file(out / "report.json", run_report_json(r, config).dump(2) + "\n");
    detail::write_file(out / "confusion.csv", confusion_csv(r.report));
    detail::write_file(out / "predictions.csv", predictions_csv(r.predictions));
    detail::write_file(out / "projections_train.csv", projections_csv(r.train_projections));
    detail::write_file(out / "projections_test.csv", projections_csv(r.test_projections));
    detail::write_file(out / "prototypes.csv", prototypes_csv(r.prototypes));
}

inline RunResult run(const RunConfig& config) {
    RunResult r = run_prepared(prepare_data(config), config);
    if (!config.out.empty()) write_artifacts(r, config, config.out);
    return r;
}

struct SweepRow {
    Variant variant;
    std::optional<double> accuracy;
    double runtime_seconds = 0.0;
    std::string error;
};

namespace detail {

inline bool same_source(const RunConfig& a, const RunConfig& b) {
    return config_to_json(a).value("synthetic", nlohmann::json()) == config_to_json(b).value("synthetic", nlohmann::json()) &&
           a.dataset == b.dataset && a.manifest == b.manifest && a.points == b.points && a.seed == b.seed;
}

} // namespace detail

/// Runs every config against data prepared once from the first config. A
/// failing variant is recorded and the sweep moves on. Each config with an
/// output directory gets its own artifacts there.
inline std::vector<SweepRow> run_sweep(const std::vector<RunConfig>& configs) {
    std::vector<SweepRow> rows;
    if (configs.empty()) return rows;
    const PreparedData data = prepare_data(configs.front());
    for (const auto& config : configs) {
        SweepRow row{config.variant, std::nullopt, 0.0, {}};
        const auto start = std::chrono::steady_clock::now();
        try {
            if (!detail::same_source(config, configs.front())) throw InvalidArgument("sweep configs must share the dataset");
            RunResult r = run_prepared(data, config);
            if (!config.out.empty()) write_artifacts(r, config, config.out);
            row.accuracy = r.report.accuracy;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "variant,label,accuracy,runtime_seconds,error\n";
    for (const auto& r : rows) {
        const auto& info = variant_info(r.variant);
        out += std::string(info.name) + ',' + csv_field(info.label) + ',' + (r.accuracy ? format_real(*r.accuracy) : "") +
               ',' + detail::format_g(r.runtime_seconds, 6) + ',' + csv_field(r.error) + '\n';
    }
    return out;
}

inline nlohmann::json sweep_json(const std::vector<SweepRow>& rows) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
        const auto& info = variant_info(r.variant);
        j.push_back({{"variant", info.name},
                     {"label", info.label},
                     {"accuracy", r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr)},
                     {"runtime_seconds", r.runtime_seconds},
                     {"error", r.error}});
    }
    return j;
}

} // namespace metasel
