#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"

namespace kmixup {

namespace detail {

inline std::vector<std::string> split_commas(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Parse a dataset from CSV text: header row, d numeric feature columns, one
/// label column (strings mapped to classes in first-appearance order), and an
/// optional trailing `cluster_id` column.
inline Dataset parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) {
            header = detail::split_commas(line);
            break;
        }
    }
    if (header.empty()) throw EmptyDataset("CSV has no header row");
    const bool has_cluster = detail::trim(header.back()) == "cluster_id";
    const std::size_t label_col = header.size() - (has_cluster ? 2 : 1);
    if (header.size() < (has_cluster ? 3u : 2u))
        throw RaggedRow("header needs at least one feature column and a label column", line_no);

    Dataset out;
    out.dim = label_col;
    std::map<std::string, std::size_t> class_index;
    std::vector<std::size_t> classes_seen;
    std::vector<Eigen::VectorXd> features;

    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_commas(line);
        if (cells.size() != header.size())
            throw RaggedRow("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                " fields, header has " + std::to_string(header.size()),
                            line_no);
        Eigen::VectorXd x(static_cast<Eigen::Index>(out.dim));
        for (std::size_t c = 0; c < out.dim; ++c) {
            double v;
            if (!detail::parse_double(cells[c], v) || !std::isfinite(v))
                throw NonNumericField("line " + std::to_string(line_no) + ", column '" + header[c] +
                                          "': non-numeric feature '" + cells[c] + "'",
                                      line_no);
            x(static_cast<Eigen::Index>(c)) = v;
        }
        const std::string name(detail::trim(cells[label_col]));
        auto [it, inserted] = class_index.emplace(name, out.class_names.size());
        if (inserted) out.class_names.push_back(name);
        classes_seen.push_back(it->second);
        features.push_back(std::move(x));
        if (has_cluster) {
            double v;
            if (!detail::parse_double(cells.back(), v) || v != std::floor(v))
                throw NonNumericField("line " + std::to_string(line_no) + ": cluster_id must be an integer", line_no);
            out.cluster_id.push_back(static_cast<int>(v));
        }
    }
    if (features.empty()) throw EmptyDataset("CSV has a header but no data rows");
    out.classes = out.class_names.size();
    out.points.reserve(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) out.push_back(std::move(features[i]), classes_seen[i]);
    return out;
}

inline Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);
    return parse_csv(in);
}

/// Header x0..x{d-1},label[,cluster_id]; label is the class name when known,
/// else the class index. Values use 17 significant digits so reloads are exact.
inline void write_csv(const Dataset& data, std::ostream& out, bool with_cluster_id = true) {
    const bool clusters = with_cluster_id && data.cluster_id.size() == data.size() && !data.empty();
    for (std::size_t c = 0; c < data.dim; ++c) out << 'x' << c << ',';
    out << "label" << (clusters ? ",cluster_id" : "") << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& x = data.points[i].features;
        for (Eigen::Index c = 0; c < x.size(); ++c) out << detail::format_double(x(c)) << ',';
        const std::size_t cls = data.class_of(i);
        out << (cls < data.class_names.size() ? data.class_names[cls] : std::to_string(cls));
        if (clusters) out << ',' << data.cluster_id[i];
        out << '\n';
    }
}

inline void save_csv(const Dataset& data, const std::string& path, bool with_cluster_id = true) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_csv(data, out, with_cluster_id);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace kmixup
