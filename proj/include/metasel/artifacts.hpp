#pragma once

// CSV and JSON renderings of run outputs. Every writer is a pure function of
// its input so equal runs give byte-identical files.

#include "metasel/classifier.hpp"
#include "metasel/dataset_io.hpp"
#include "metasel/encoder.hpp"
#include "metasel/evaluate.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace metasel {

inline constexpr std::string_view kWeightColumns = "w00,w01,w02,w10,w11,w12,w20,w21,w22";

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

/// Minimal RFC 4180 reader; enough for the files this library writes.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n') {
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else if (c != '\r') {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string format_real(double v) { return detail::format_g(v, 17); }

inline std::string projections_csv(const std::vector<ProjectionModel>& projections) {
    std::string out = "model_id,category," + std::string(kWeightColumns) + "\n";
    for (const auto& p : projections) {
        out += csv_field(p.model_id) + ',' + csv_field(p.category);
        for (double v : p.w_flat) out += ',' + format_real(v);
        out += '\n';
    }
    return out;
}

inline std::string prototypes_csv(const std::vector<CategoryPrototype>& prototypes) {
    std::string out = "category," + std::string(kWeightColumns) + "\n";
    for (const auto& p : prototypes) {
        out += csv_field(p.category);
        for (double v : p.w_prime) out += ',' + format_real(v);
        out += '\n';
    }
    return out;
}

inline std::string predictions_csv(const std::vector<Prediction>& predictions) {
    std::string out = "model_id,true_category,predicted_category,best_train_id,similarity\n";
    for (const auto& p : predictions) {
        out += csv_field(p.model_id) + ',' + csv_field(p.true_category) + ',' + csv_field(p.predicted_category) + ',' +
               csv_field(p.best_train_id) + ',' + format_real(p.similarity) + '\n';
    }
    return out;
}

/// First row and first column hold category names; cells are counts with
/// rows = true category, columns = predicted.
inline std::string confusion_csv(const EvalReport& r) {
    std::string out = "true\\predicted";
    for (const auto& c : r.categories) out += ',' + csv_field(c);
    out += '\n';
    for (std::size_t i = 0; i < r.categories.size(); ++i) {
        out += csv_field(r.categories[i]);
        for (std::size_t n : r.confusion[i]) out += ',' + std::to_string(n);
        out += '\n';
    }
    return out;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json per_class = nlohmann::json::object();
    for (const auto& c : r.categories) {
        const auto& m = r.per_class.at(c);
        per_class[c] = {{"support", m.support},
                        {"predicted", m.predicted},
                        {"recall", m.recall ? nlohmann::json(*m.recall) : nlohmann::json(nullptr)},
                        {"precision", m.precision}};
    }
    return {{"total", r.total},
            {"accuracy", r.accuracy},
            {"weighted_recall", r.weighted_recall},
            {"weighted_precision", r.weighted_precision},
            {"categories", r.categories},
            {"per_class", per_class},
            {"confusion", r.confusion}};
}

} // namespace metasel
