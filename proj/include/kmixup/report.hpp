#pragma once

// JSON/CSV serialization for reports and model checkpoints.

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "analysis.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "nn.hpp"

namespace kmixup {

using json = nlohmann::json;

namespace detail {

/// JSON has no NaN; non-finite values become null.
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

inline void to_json(json& j, const MatchStats& m) {
    j = json{{"k", m.k},
             {"trials", m.trials},
             {"cross_cluster_fraction", m.cross_cluster_fraction},
             {"per_trial_counts", m.per_trial_counts},
             {"predicted_counts", m.predicted_counts},
             {"r", m.r},
             {"s", m.s},
             {"match_lengths", m.match_lengths}};
}

inline void to_json(json& j, const LocalizationReport& r) {
    j = json{{"k", r.k},
             {"trials", r.trials},
             {"D", r.D},
             {"epsilon", r.epsilon},
             {"cross_matches", r.cross_matches},
             {"violations", r.violations},
             {"violation_fraction", r.violation_fraction}};
}

inline void to_json(json& j, const ScalingReport& r) {
    j = json{{"ks", r.ks},
             {"mean_w2sq", r.mean_w2sq},
             {"fitted_slope", detail::number_or_null(r.fitted_slope)},
             {"fit_residual", detail::number_or_null(r.fit_residual)},
             {"degenerate", r.degenerate}};
}

inline void to_json(json& j, const EpochMetrics& m) {
    j = json{{"epoch", m.epoch}, {"train_loss", m.train_loss}, {"test_acc", detail::number_or_null(m.test_acc)}};
}

/// Flat CSV of a scaling report: k,mean_w2sq.
inline void write_scaling_csv(const ScalingReport& r, std::ostream& out) {
    out << "k,mean_w2sq\n";
    for (std::size_t i = 0; i < r.ks.size(); ++i) out << r.ks[i] << ',' << detail::format_double(r.mean_w2sq[i]) << '\n';
}

/// Flat CSV of per-trial match statistics: trial,cross,predicted.
inline void write_match_csv(const MatchStats& m, std::ostream& out) {
    out << "trial,cross,predicted\n";
    for (std::size_t t = 0; t < m.trials; ++t) out << t << ',' << m.per_trial_counts[t] << ',' << m.predicted_counts[t] << '\n';
}

inline void write_metrics_csv(const std::vector<EpochMetrics>& history, std::ostream& out) {
    out << "epoch,train_loss,test_acc\n";
    for (const auto& m : history)
        out << m.epoch << ',' << detail::format_double(m.train_loss) << ',' << detail::format_double(m.test_acc) << '\n';
}

// ---------------------------------------------------------------------------
// Model checkpoints
// ---------------------------------------------------------------------------

/// {"layer_sizes": [...], "weights": [[row-major], ...], "biases": [[...], ...],
///  "class_names": [...]}
inline json checkpoint_json(const MlpModel& model) {
    json j;
    j["layer_sizes"] = model.layer_sizes;
    j["weights"] = json::array();
    j["biases"] = json::array();
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        const auto& w = model.weights[l];
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(w.size()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
        j["weights"].push_back(flat);
        j["biases"].push_back(std::vector<double>(model.biases[l].data(), model.biases[l].data() + model.biases[l].size()));
    }
    j["class_names"] = model.class_names;
    return j;
}

inline MlpModel model_from_json(const json& j) {
    try {
        MlpModel m = MlpModel::zeros(j.at("layer_sizes").get<std::vector<std::size_t>>());
        const auto& ws = j.at("weights");
        const auto& bs = j.at("biases");
        if (ws.size() != m.num_layers() || bs.size() != m.num_layers())
            throw ShapeError("checkpoint layer count does not match layer_sizes");
        for (std::size_t l = 0; l < m.num_layers(); ++l) {
            const auto flat = ws[l].get<std::vector<double>>();
            const auto bias = bs[l].get<std::vector<double>>();
            auto& w = m.weights[l];
            if (flat.size() != static_cast<std::size_t>(w.size()) || bias.size() != static_cast<std::size_t>(m.biases[l].size()))
                throw ShapeError("checkpoint layer " + std::to_string(l) + " has wrong size");
            std::size_t idx = 0;
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[idx++];
            for (std::size_t i = 0; i < bias.size(); ++i) m.biases[l](static_cast<Eigen::Index>(i)) = bias[i];
        }
        if (j.contains("class_names")) m.class_names = j.at("class_names").get<std::vector<std::string>>();
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed checkpoint: ") + e.what());
    }
}

inline void save_checkpoint(const MlpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << checkpoint_json(model).dump() << '\n';
    if (!out) throw IoError("write failed: " + path);
}

inline MlpModel load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("checkpoint is not valid JSON: " + std::string(e.what()));
    }
    return model_from_json(j);
}

/// Reorder a dataset's one-hot labels so class indices follow `class_names`
/// (e.g. a checkpoint's). Unknown names are an input error.
inline Dataset align_classes(const Dataset& data, const std::vector<std::string>& class_names) {
    if (class_names.empty() || data.class_names.empty()) return data;
    std::vector<std::size_t> remap(data.classes);
    for (std::size_t c = 0; c < data.classes; ++c) {
        const auto it = std::find(class_names.begin(), class_names.end(), data.class_names[c]);
        if (it == class_names.end()) throw InputError("label '" + data.class_names[c] + "' is unknown to the model");
        remap[c] = static_cast<std::size_t>(it - class_names.begin());
    }
    Dataset out = data;
    out.classes = class_names.size();
    out.class_names = class_names;
    for (std::size_t i = 0; i < data.size(); ++i) out.points[i].label = one_hot(out.classes, remap[data.class_of(i)]);
    return out;
}

}  // namespace kmixup
