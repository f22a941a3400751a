#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "dataset.hpp"
#include "mixup.hpp"

namespace kmixup {

/// One matched pair from a k-mixup step and the vicinal point it produced.
struct CouplingRecord {
    std::size_t step = 0;
    std::size_t gamma_row = 0;
    std::size_t xi_row = 0;
    double lambda = 0.0;
    Eigen::VectorXd vicinal;
};

inline std::vector<CouplingRecord> sample_couplings(const Dataset& data, const MixupConfig& cfg, std::size_t steps) {
    cfg.validate();
    require_room_for_two_batches(data, cfg.k);
    Rng gen = make_stream(cfg.seed, 0xC0);
    std::vector<CouplingRecord> out;
    out.reserve(steps * cfg.k);
    for (std::size_t s = 0; s < steps; ++s)
        for (auto& v : make_vicinal_step(data, cfg, gen))
            out.push_back({s, v.parent_gamma, v.parent_xi, v.lambda, std::move(v.features)});
    return out;
}

/// step,gamma_row,xi_row,lambda,gamma_x0..,xi_x0..,v_x0..
inline void write_coupling_csv(const Dataset& data, const std::vector<CouplingRecord>& records, std::ostream& out) {
    out << "step,gamma_row,xi_row,lambda";
    for (const char* prefix : {"gamma_x", "xi_x", "v_x"})
        for (std::size_t c = 0; c < data.dim; ++c) out << ',' << prefix << c;
    out << '\n';
    for (const auto& r : records) {
        out << r.step << ',' << r.gamma_row << ',' << r.xi_row << ',' << detail::format_double(r.lambda);
        for (const Eigen::VectorXd* v : {&data.points[r.gamma_row].features, &data.points[r.xi_row].features, &r.vicinal})
            for (Eigen::Index c = 0; c < v->size(); ++c) out << ',' << detail::format_double((*v)(c));
        out << '\n';
    }
}

namespace detail {

inline const char* class_color(std::size_t cls) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    return palette[cls % 8];
}

}  // namespace detail

/// SVG 1.1 scatter of the first two feature coordinates: dataset points by
/// class, one grey segment per matched pair, black dots for vicinal points.
inline void write_coupling_svg(const Dataset& data, const std::vector<CouplingRecord>& records, std::ostream& out,
                               double size = 600.0) {
    const double margin = 20.0;
    double lo_x = 0.0, hi_x = 1.0, lo_y = 0.0, hi_y = 1.0;
    if (!data.empty()) {
        lo_x = hi_x = data.points[0].features(0);
        lo_y = hi_y = data.dim > 1 ? data.points[0].features(1) : 0.0;
        for (const auto& p : data.points) {
            lo_x = std::min(lo_x, p.features(0));
            hi_x = std::max(hi_x, p.features(0));
            if (data.dim > 1) {
                lo_y = std::min(lo_y, p.features(1));
                hi_y = std::max(hi_y, p.features(1));
            }
        }
    }
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
    auto px = [&](const Eigen::VectorXd& v) { return margin + (v(0) - lo_x) / span * (size - 2 * margin); };
    auto py = [&](const Eigen::VectorXd& v) {
        const double y = v.size() > 1 ? v(1) : 0.0;
        return size - margin - (y - lo_y) / span * (size - 2 * margin);
    };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(size) << "\" height=\""
        << num(size) << "\" viewBox=\"0 0 " << num(size) << ' ' << num(size) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g id=\"data\">\n";
    for (std::size_t i = 0; i < data.size(); ++i)
        out << "<circle cx=\"" << num(px(data.points[i].features)) << "\" cy=\"" << num(py(data.points[i].features))
            << "\" r=\"2\" fill=\"" << detail::class_color(data.class_of(i)) << "\" fill-opacity=\"0.5\"/>\n";
    out << "</g>\n<g id=\"matches\" stroke=\"#555555\" stroke-width=\"0.6\" stroke-opacity=\"0.7\">\n";
    for (const auto& r : records) {
        const auto& a = data.points[r.gamma_row].features;
        const auto& b = data.points[r.xi_row].features;
        out << "<line x1=\"" << num(px(a)) << "\" y1=\"" << num(py(a)) << "\" x2=\"" << num(px(b)) << "\" y2=\""
            << num(py(b)) << "\"/>\n";
    }
    out << "</g>\n<g id=\"vicinal\" fill=\"black\">\n";
    for (const auto& r : records)
        out << "<circle cx=\"" << num(px(r.vicinal)) << "\" cy=\"" << num(py(r.vicinal)) << "\" r=\"1.5\"/>\n";
    out << "</g>\n</svg>\n";
}

}  // namespace kmixup
