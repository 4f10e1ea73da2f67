#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 numerical failure.

#include "metasel/metasel.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace metasel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

inline int exit_code(ErrorClass c) {
    switch (c) {
    case ErrorClass::usage: return kExitUsage;
    case ErrorClass::data: return kExitData;
    case ErrorClass::numerical: return kExitNumerical;
    }
    return kExitData;
}

namespace detail {

struct RunFlags {
    std::string config_file;
    std::string dataset;
    std::string manifest;
    std::string synthetic;
    std::string variant = "base";
    std::string variants = "all";
    std::string solver = "direct_kronecker";
    std::string knn = "model";
    std::string out = "metasel-out";
    double lambda = 0.2;
    int points = kDefaultPointCount;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    double translation_range = 0.1;
    double jitter_sigma = 0.01;
    double jitter_clip = 0.05;
    std::map<std::string, CLI::Option*> opts;

    bool given(const std::string& name) const {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }
};

inline void add_run_flags(CLI::App& cmd, RunFlags& f, bool single_variant) {
    f.opts["config"] = cmd.add_option("--config", f.config_file, "Run configuration JSON; flags override its keys");
    f.opts["dataset"] = cmd.add_option("--dataset", f.dataset, "ShapeNet-part style dataset root");
    f.opts["manifest"] = cmd.add_option("--manifest", f.manifest, "Split manifest JSON (default: <dataset>/manifest.json)");
    f.opts["synthetic"] = cmd.add_option("--synthetic", f.synthetic, "'default' or a synthetic spec JSON file");
    if (single_variant) {
        f.opts["variant"] = cmd.add_option("--variant", f.variant, "Dataset variant")->capture_default_str();
    } else {
        f.opts["variants"] =
            cmd.add_option("--variants", f.variants, "'all' or a comma-separated variant list")->capture_default_str();
    }
    f.opts["lambda"] = cmd.add_option("--lambda", f.lambda, "Encoder regularization weight")->capture_default_str();
    f.opts["solver"] =
        cmd.add_option("--solver", f.solver, "direct_kronecker | bartels_stewart")->capture_default_str();
    f.opts["points"] = cmd.add_option("--points", f.points, "Points per model after resampling")->capture_default_str();
    f.opts["seed"] = cmd.add_option("--seed", f.seed, "Master seed for all randomness")->capture_default_str();
    f.opts["knn"] = cmd.add_option("--knn", f.knn, "model | prototype")->capture_default_str();
    f.opts["threads"] = cmd.add_option("--threads", f.threads, "Worker threads (0 = all)")->capture_default_str();
    f.opts["out"] = cmd.add_option("--out", f.out, "Output directory")->capture_default_str();
    f.opts["translation_range"] =
        cmd.add_option("--translation-range", f.translation_range, "Per-axis translation half-width")->capture_default_str();
    f.opts["jitter_sigma"] = cmd.add_option("--jitter-sigma", f.jitter_sigma, "Jitter standard deviation")->capture_default_str();
    f.opts["jitter_clip"] = cmd.add_option("--jitter-clip", f.jitter_clip, "Jitter clip bound")->capture_default_str();
}

inline SyntheticSpec load_synthetic_arg(const std::string& arg, std::uint64_t seed) {
    if (arg == "default") return synthetic_spec_from_json(nlohmann::json::object(), seed);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(metasel::detail::read_file(arg));
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(arg + ": " + e.what());
    }
    return synthetic_spec_from_json(j, seed);
}

/// Config file first, then the flags that were given explicitly, then defaults.
inline RunConfig resolve_config(const RunFlags& f) {
    RunConfig c;
    c.encoder.lambda = f.lambda;
    c.points = f.points;
    c.seed = f.seed;
    c.threads = f.threads;
    c.out = f.out;
    c.augment = {f.translation_range, f.jitter_sigma, f.jitter_clip};
    c.variant = parse_variant(f.variant);
    c.encoder.solver = parse_solver(f.solver);
    c.knn = parse_knn(f.knn);

    if (!f.config_file.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(metasel::detail::read_file(f.config_file));
        } catch (const nlohmann::json::parse_error& e) {
            throw InvalidArgument(f.config_file + ": " + e.what());
        } catch (const NotFoundError& e) {
            throw InvalidArgument(e.what());
        }
        if (f.given("seed")) j["seed"] = f.seed;
        c = config_from_json(j, c);
    }
    if (f.given("lambda")) c.encoder.lambda = f.lambda;
    if (f.given("points")) c.points = f.points;
    if (f.given("seed")) c.seed = f.seed;
    if (f.given("threads")) c.threads = f.threads;
    if (f.given("out")) c.out = f.out;
    if (f.given("variant")) c.variant = parse_variant(f.variant);
    if (f.given("solver")) c.encoder.solver = parse_solver(f.solver);
    if (f.given("knn")) c.knn = parse_knn(f.knn);
    if (f.given("translation_range")) c.augment.translation_range = f.translation_range;
    if (f.given("jitter_sigma")) c.augment.jitter_sigma = f.jitter_sigma;
    if (f.given("jitter_clip")) c.augment.jitter_clip = f.jitter_clip;
    if (f.given("dataset")) {
        c.dataset = f.dataset;
        c.synthetic.reset();
    }
    if (f.given("manifest")) c.manifest = f.manifest;
    if (f.given("synthetic")) {
        c.synthetic = load_synthetic_arg(f.synthetic, c.seed);
        if (!f.given("dataset")) c.dataset.reset();
    }
    if (!c.dataset && !c.synthetic) throw InvalidArgument("a data source is required: --dataset <dir> or --synthetic default|<spec.json>");
    validate(c);
    return c;
}

inline std::vector<Variant> parse_variant_list(const std::string& list) {
    std::vector<Variant> out;
    if (list == "all") {
        for (const auto& info : kVariants) out.push_back(info.variant);
        return out;
    }
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_variant(item));
    }
    if (out.empty()) throw InvalidArgument("empty variant list");
    return out;
}

inline std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
    return buf;
}

inline void print_report(std::ostream& os, const EvalReport& r) {
    os << "accuracy " << percent(r.accuracy) << "%  (" << r.total << " test models)\n";
    os << "weighted recall " << percent(r.weighted_recall) << "%  weighted precision " << percent(r.weighted_precision)
       << "%\n";
    std::size_t width = 8;
    for (const auto& c : r.categories) width = std::max(width, c.size());
    char line[256];
    std::snprintf(line, sizeof line, "%-*s %8s %10s %10s\n", static_cast<int>(width), "category", "support", "recall%",
                  "precision%");
    os << line;
    for (const auto& c : r.categories) {
        const auto& m = r.per_class.at(c);
        std::snprintf(line, sizeof line, "%-*s %8zu %10s %10s\n", static_cast<int>(width), c.c_str(), m.support,
                      m.recall ? percent(*m.recall).c_str() : "-", percent(m.precision).c_str());
        os << line;
    }
}

inline nlohmann::json effective_config(const RunConfig& c) {
    nlohmann::json j = config_to_json(c);
    j["threads"] = c.threads;
    j["threads_resolved"] = resolve_threads(c.threads);
    j["out"] = c.out.string();
    return j;
}

// --- prepare ---------------------------------------------------------------------

struct PrepareFlags {
    std::string dataset;
    std::string out;
    std::string split_dir;
    double test_fraction = 0.1;
    std::uint64_t seed = 0;
    bool all_parts = false;
    unsigned threads = 0;
};

inline std::vector<std::string> read_split_list(const fs::path& file) {
    try {
        return nlohmann::json::parse(metasel::detail::read_file(file)).get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(file.string() + ": " + e.what());
    }
}

inline int cmd_prepare(const PrepareFlags& f, std::ostream& out) {
    if (!(f.test_fraction >= 0.0 && f.test_fraction < 1.0)) throw InvalidArgument("--test-fraction must be in [0, 1)");
    const fs::path root = f.dataset;
    DatasetManifest manifest;
    manifest.category_map = read_category_map(root);
    std::vector<std::string> ids = scan_model_ids(root, manifest.category_map);

    std::vector<char> keep(ids.size(), 1);
    if (!f.all_parts) {
        parallel_for(ids.size(), f.threads, [&](std::size_t i) {
            const auto slash = ids[i].find('/');
            const fs::path seg = root / ids[i].substr(0, slash) / "points_label" / (ids[i].substr(slash + 1) + ".seg");
            std::vector<int> labels;
            try {
                labels = parse_labels_file(metasel::detail::read_file(seg));
            } catch (Error& e) {
                e.add_context(ids[i]);
                throw;
            }
            keep[i] = std::set<int>(labels.begin(), labels.end()).size() == static_cast<std::size_t>(kPartCount);
        });
    }
    std::set<std::string> usable;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (keep[i]) usable.insert(ids[i]);
    }

    auto token_of = [](const std::string& id) { return id.substr(0, id.find('/')); };
    if (!f.split_dir.empty()) {
        // Official ShapeNet-part lists: "shape_data/<token>/<name>"; train+val become train.
        auto normalize = [&](const std::string& entry) {
            const auto last = entry.rfind('/');
            const auto prev = entry.rfind('/', last - 1);
            return entry.substr(prev + 1);
        };
        for (const char* name : {"shuffled_train_file_list.json", "shuffled_val_file_list.json"}) {
            if (!fs::exists(fs::path(f.split_dir) / name)) continue;
            for (const auto& e : read_split_list(fs::path(f.split_dir) / name)) {
                if (usable.count(normalize(e))) manifest.train_ids.push_back(normalize(e));
            }
        }
        for (const auto& e : read_split_list(fs::path(f.split_dir) / "shuffled_test_file_list.json")) {
            if (usable.count(normalize(e))) manifest.test_ids.push_back(normalize(e));
        }
    } else {
        std::map<std::string, std::vector<std::string>> by_token;
        for (const auto& id : usable) by_token[token_of(id)].push_back(id);
        for (auto& [token, members] : by_token) {
            Rng rng(derive_seed(f.seed, token, "split"));
            std::shuffle(members.begin(), members.end(), rng);
            const auto test = static_cast<std::size_t>(std::lround(f.test_fraction * static_cast<double>(members.size())));
            for (std::size_t i = 0; i < members.size(); ++i) {
                (i < test ? manifest.test_ids : manifest.train_ids).push_back(members[i]);
            }
        }
        std::sort(manifest.train_ids.begin(), manifest.train_ids.end());
        std::sort(manifest.test_ids.begin(), manifest.test_ids.end());
    }

    // Drop categories with no models left.
    std::set<std::string> used_tokens;
    for (const auto& id : manifest.train_ids) used_tokens.insert(token_of(id));
    for (const auto& id : manifest.test_ids) used_tokens.insert(token_of(id));
    std::erase_if(manifest.category_map, [&](const auto& kv) { return !used_tokens.count(kv.first); });

    const fs::path manifest_path = f.out.empty() ? root / "manifest.json" : fs::path(f.out);
    write_manifest(manifest_path, manifest);

    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& id : manifest.train_ids) ++counts[manifest.category_map.at(token_of(id))].first;
    for (const auto& id : manifest.test_ids) ++counts[manifest.category_map.at(token_of(id))].second;
    out << "scanned " << ids.size() << " models, kept " << usable.size() << "\n";
    char line[128];
    for (const auto& [name, c] : counts) {
        std::snprintf(line, sizeof line, "%-16s %8zu %8zu\n", name.c_str(), c.first, c.second);
        out << line;
    }
    std::snprintf(line, sizeof line, "%-16s %8zu %8zu\n", "total", manifest.train_ids.size(), manifest.test_ids.size());
    out << line << "manifest written to " << manifest_path.string() << "\n";
    return kExitOk;
}

} // namespace detail

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Point-cloud classification from per-model Sylvester projections", "metasel"};
    app.require_subcommand(1);

    detail::RunFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "Run one dataset variant end to end");
    detail::add_run_flags(*run_cmd, run_flags, true);

    detail::RunFlags sweep_flags;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run several variants on the same data");
    detail::add_run_flags(*sweep_cmd, sweep_flags, false);

    detail::RunFlags inspect_flags;
    auto* inspect_cmd = app.add_subcommand("inspect", "Print the effective configuration");
    detail::add_run_flags(*inspect_cmd, inspect_flags, true);

    std::string synth_arg = "default";
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    auto* gen_cmd = app.add_subcommand("gen-synth", "Write a synthetic dataset in ShapeNet-part layout");
    gen_cmd->add_option("--synthetic", synth_arg, "'default' or a synthetic spec JSON file")->capture_default_str();
    gen_cmd->add_option("--seed", synth_seed, "Seed when the spec has none")->capture_default_str();
    gen_cmd->add_option("--out", synth_out, "Dataset root to write")->required();

    detail::PrepareFlags prep;
    auto* prep_cmd = app.add_subcommand("prepare", "Scan a dataset root and write a train/test manifest");
    prep_cmd->add_option("--dataset", prep.dataset, "ShapeNet-part style dataset root")->required();
    prep_cmd->add_option("--out", prep.out, "Manifest path (default: <dataset>/manifest.json)");
    prep_cmd->add_option("--split-dir", prep.split_dir, "Directory with the official shuffled_*_file_list.json files");
    prep_cmd->add_option("--test-fraction", prep.test_fraction, "Per-category test share without --split-dir")
        ->capture_default_str();
    prep_cmd->add_option("--seed", prep.seed, "Split seed")->capture_default_str();
    prep_cmd->add_flag("--all-parts", prep.all_parts, "Keep models with any number of part labels");
    prep_cmd->add_option("--threads", prep.threads, "Worker threads (0 = all)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) {
            const RunConfig config = detail::resolve_config(run_flags);
            const RunResult r = run(config);
            out << "variant " << variant_info(config.variant).name << " (" << variant_info(config.variant).label << ")\n";
            detail::print_report(out, r.report);
            out << "artifacts written to " << config.out.string() << "\n";
        } else if (sweep_cmd->parsed()) {
            RunConfig base = detail::resolve_config(sweep_flags);
            std::vector<RunConfig> configs;
            for (Variant v : detail::parse_variant_list(sweep_flags.variants)) {
                RunConfig c = base;
                c.variant = v;
                c.out = base.out / variant_info(v).name;
                configs.push_back(std::move(c));
            }
            const auto rows = run_sweep(configs);
            fs::create_directories(base.out);
            metasel::detail::write_file(base.out / "sweep.csv", sweep_csv(rows));
            metasel::detail::write_file(base.out / "sweep.json", sweep_json(rows).dump(2) + "\n");
            char line[160];
            for (const auto& row : rows) {
                std::snprintf(line, sizeof line, "%-10s %-22s %8s %9.3fs %s\n", variant_info(row.variant).name,
                              variant_info(row.variant).label,
                              row.accuracy ? (detail::percent(*row.accuracy) + "%").c_str() : "failed",
                              row.runtime_seconds, row.error.c_str());
                out << line;
            }
            const bool failed = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.accuracy; });
            if (failed) {
                err << "some variants failed; see sweep.csv\n";
                return kExitNumerical;
            }
        } else if (inspect_cmd->parsed()) {
            out << detail::effective_config(detail::resolve_config(inspect_flags)).dump(2) << "\n";
        } else if (gen_cmd->parsed()) {
            const SyntheticSpec spec = detail::load_synthetic_arg(synth_arg, synth_seed);
            write_dataset(synth_out, generate_synthetic(spec), synthetic_manifest(spec));
            out << "wrote " << spec.categories * spec.models_per_category << " models to " << synth_out << "\n";
        } else if (prep_cmd->parsed()) {
            return detail::cmd_prepare(prep, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.error_class());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

} // namespace metasel::cli
