#pragma once

// Reading and writing datasets in the ShapeNet part-annotation layout:
//
//   <root>/synsetoffset2category.txt      "<name>\t<token>" per line
//   <root>/<token>/points/<id>.pts        "x y z" per line
//   <root>/<token>/points_label/<id>.seg  one integer label per line
//
// Train/test splits live in a separate manifest JSON.

#include "metasel/error.hpp"
#include "metasel/parallel.hpp"
#include "metasel/types.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace metasel {

namespace fs = std::filesystem;

struct DatasetManifest {
    std::map<std::string, std::string> category_map; ///< directory token -> category name
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++lineno;
        fn(lineno, text.substr(pos, end - pos));
        pos = end + 1;
    }
}

template <class T>
bool parse_number(std::string_view token, T& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size();
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NotFoundError("cannot write " + path.string());
    out << contents;
}

inline std::string format_g(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

} // namespace detail

inline std::vector<Eigen::Vector3d> parse_points_file(std::string_view text) {
    std::vector<Eigen::Vector3d> out;
    detail::for_each_line(text, [&](std::size_t lineno, std::string_view line) {
        auto tokens = detail::split_ws(line);
        if (tokens.empty()) return;
        if (tokens.size() != 3) {
            throw ParseError(lineno, "expected 3 coordinates, found " + std::to_string(tokens.size()));
        }
        Eigen::Vector3d p;
        for (int k = 0; k < 3; ++k) {
            if (!detail::parse_number(tokens[static_cast<std::size_t>(k)], p[k])) {
                throw ParseError(lineno, "not a number: '" + std::string(tokens[static_cast<std::size_t>(k)]) + "'");
            }
        }
        out.push_back(p);
    });
    if (out.empty()) throw EmptyInputError("points file has no points");
    return out;
}

inline std::vector<int> parse_labels_file(std::string_view text) {
    std::vector<int> out;
    detail::for_each_line(text, [&](std::size_t lineno, std::string_view line) {
        auto tokens = detail::split_ws(line);
        if (tokens.empty()) return;
        int label = 0;
        if (tokens.size() != 1 || !detail::parse_number(tokens[0], label)) {
            throw ParseError(lineno, "expected one integer label, found '" + std::string(line) + "'");
        }
        out.push_back(label);
    });
    if (out.empty()) throw EmptyInputError("labels file has no labels");
    return out;
}

/// Nine significant digits per coordinate.
inline std::string format_points_file(const PointMatrix& points) {
    std::string out;
    out.reserve(static_cast<std::size_t>(points.rows()) * 36);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        out += detail::format_g(points(i, 0), 9);
        out += ' ';
        out += detail::format_g(points(i, 1), 9);
        out += ' ';
        out += detail::format_g(points(i, 2), 9);
        out += '\n';
    }
    return out;
}

inline std::string format_labels_file(const std::vector<int>& labels) {
    std::string out;
    for (int l : labels) {
        out += std::to_string(l);
        out += '\n';
    }
    return out;
}

/// Builds a RawModel from parsed file contents, checking the pairing.
inline RawModel make_raw_model(std::string model_id, std::string category,
                               const std::vector<Eigen::Vector3d>& points, std::vector<int> labels) {
    if (points.size() != labels.size()) {
        throw PairingError(model_id + ": " + std::to_string(points.size()) + " points but " +
                           std::to_string(labels.size()) + " labels");
    }
    for (int l : labels) {
        if (l <= 0) throw InvalidLabelError(model_id + ": label " + std::to_string(l) + " is not positive");
    }
    RawModel m{std::move(model_id), std::move(category), PointMatrix(static_cast<Eigen::Index>(points.size()), 3),
               std::move(labels)};
    for (std::size_t i = 0; i < points.size(); ++i) m.points.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
    return m;
}

// --- synsetoffset2category.txt -------------------------------------------------

inline std::map<std::string, std::string> parse_category_file(std::string_view text) {
    std::map<std::string, std::string> map;
    detail::for_each_line(text, [&](std::size_t lineno, std::string_view line) {
        auto tokens = detail::split_ws(line);
        if (tokens.empty()) return;
        if (tokens.size() != 2) throw ParseError(lineno, "expected '<name> <token>'");
        map.emplace(std::string(tokens[1]), std::string(tokens[0]));
    });
    return map;
}

inline std::string format_category_file(const std::map<std::string, std::string>& category_map) {
    std::string out;
    for (const auto& [token, name] : category_map) out += name + '\t' + token + '\n';
    return out;
}

// --- manifest -------------------------------------------------------------------

inline void validate_manifest(const DatasetManifest& m) {
    std::set<std::string> train(m.train_ids.begin(), m.train_ids.end());
    if (train.size() != m.train_ids.size()) throw ManifestError("manifest: duplicate train id");
    std::set<std::string> test;
    for (const auto& id : m.test_ids) {
        if (!test.insert(id).second) throw ManifestError("manifest: duplicate test id " + id);
        if (train.count(id)) throw ManifestError("manifest: id " + id + " is in both train and test");
    }
}

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
    return nlohmann::json{{"category_map", m.category_map}, {"train_ids", m.train_ids}, {"test_ids", m.test_ids}};
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
    DatasetManifest m;
    try {
        m.category_map = j.at("category_map").get<std::map<std::string, std::string>>();
        m.train_ids = j.at("train_ids").get<std::vector<std::string>>();
        m.test_ids = j.at("test_ids").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("manifest: ") + e.what());
    }
    validate_manifest(m);
    return m;
}

inline DatasetManifest read_manifest(const fs::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ManifestError(path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

inline void write_manifest(const fs::path& path, const DatasetManifest& m) {
    detail::write_file(path, manifest_to_json(m).dump(2) + "\n");
}

// --- loading --------------------------------------------------------------------

struct ModelLocation {
    std::string token;
    std::string name;
};

/// Accepts "<token>/<name>" or a bare name; bare names are looked up in every
/// category directory of the manifest.
inline ModelLocation locate_model(const fs::path& root, const DatasetManifest& manifest, const std::string& id) {
    auto slash = id.rfind('/');
    if (slash != std::string::npos) {
        // Tolerate the "shape_data/<token>/<name>" form of the official split lists.
        std::string head = id.substr(0, slash);
        auto prev = head.rfind('/');
        std::string token = prev == std::string::npos ? head : head.substr(prev + 1);
        std::string name = id.substr(slash + 1);
        if (!manifest.category_map.count(token)) throw NotFoundError(id + ": unknown category token " + token);
        if (!fs::exists(root / token / "points" / (name + ".pts"))) throw NotFoundError(id + ": no points file");
        return {token, name};
    }
    std::vector<std::string> hits;
    for (const auto& [token, _] : manifest.category_map) {
        if (fs::exists(root / token / "points" / (id + ".pts"))) hits.push_back(token);
    }
    if (hits.empty()) throw NotFoundError(id + ": no points file under any category");
    if (hits.size() > 1) throw NotFoundError(id + ": ambiguous, found in " + hits[0] + " and " + hits[1]);
    return {hits[0], id};
}

inline RawModel load_model(const fs::path& root, const DatasetManifest& manifest, const std::string& id) {
    ModelLocation loc = locate_model(root, manifest, id);
    fs::path pts = root / loc.token / "points" / (loc.name + ".pts");
    fs::path seg = root / loc.token / "points_label" / (loc.name + ".seg");
    if (!fs::exists(seg)) throw NotFoundError(id + ": no labels file " + seg.string());
    try {
        auto points = parse_points_file(detail::read_file(pts));
        auto labels = parse_labels_file(detail::read_file(seg));
        return make_raw_model(loc.name, manifest.category_map.at(loc.token), points, std::move(labels));
    } catch (Error& e) {
        if (dynamic_cast<PairingError*>(&e) == nullptr) e.add_context(id);
        throw;
    }
}

/// Loads every manifest id, train ids first, each list in manifest order.
inline std::vector<RawModel> load_dataset(const fs::path& root, const DatasetManifest& manifest, unsigned threads = 1) {
    validate_manifest(manifest);
    std::vector<std::string> ids = manifest.train_ids;
    ids.insert(ids.end(), manifest.test_ids.begin(), manifest.test_ids.end());
    std::vector<RawModel> models(ids.size());
    parallel_for(ids.size(), threads, [&](std::size_t i) { models[i] = load_model(root, manifest, ids[i]); });
    return models;
}

inline void write_model(const fs::path& root, const std::string& token, const RawModel& m) {
    detail::write_file(root / token / "points" / (m.model_id + ".pts"), format_points_file(m.points));
    detail::write_file(root / token / "points_label" / (m.model_id + ".seg"), format_labels_file(m.labels));
}

/// Writes models, the category file and manifest.json under root. Every
/// model's category must appear in the manifest's category map.
inline void write_dataset(const fs::path& root, const std::vector<RawModel>& models, const DatasetManifest& manifest) {
    std::map<std::string, std::string> token_of;
    for (const auto& [token, name] : manifest.category_map) token_of[name] = token;
    for (const auto& m : models) {
        auto it = token_of.find(m.category);
        if (it == token_of.end()) throw ManifestError("category " + m.category + " missing from manifest");
        write_model(root, it->second, m);
    }
    detail::write_file(root / "synsetoffset2category.txt", format_category_file(manifest.category_map));
    write_manifest(root / "manifest.json", manifest);
}

/// Category map from the root's synsetoffset2category.txt, or from its
/// subdirectory names when that file is absent.
inline std::map<std::string, std::string> read_category_map(const fs::path& root) {
    fs::path file = root / "synsetoffset2category.txt";
    if (fs::exists(file)) return parse_category_file(detail::read_file(file));
    std::map<std::string, std::string> map;
    if (!fs::is_directory(root)) throw NotFoundError("dataset root " + root.string() + " not found");
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && fs::is_directory(entry.path() / "points")) {
            auto token = entry.path().filename().string();
            map.emplace(token, token);
        }
    }
    return map;
}

/// All "<token>/<name>" ids under root, sorted.
inline std::vector<std::string> scan_model_ids(const fs::path& root, const std::map<std::string, std::string>& category_map) {
    std::vector<std::string> ids;
    for (const auto& [token, _] : category_map) {
        fs::path dir = root / token / "points";
        if (!fs::is_directory(dir)) continue;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".pts") ids.push_back(token + "/" + entry.path().stem().string());
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace metasel
