#pragma once

// Fidelity sweeps, CSV/SVG rendering and JSON serialization used by the CLI.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kraus_reclaim/dilation.hpp"
#include "kraus_reclaim/families.hpp"
#include "kraus_reclaim/optimizer.hpp"

namespace kraus_reclaim {

struct PGrid {
    double start = 0.0;
    double stop = 1.0;
    double step = 0.01;

    std::vector<double> points() const {
        if (!(start >= 0.0 && stop <= 1.0 && start <= stop)) {
            throw InvalidInput("p grid must satisfy 0 <= start <= stop <= 1");
        }
        if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("p grid step must be positive");
        const auto intervals = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
        std::vector<double> out;
        out.reserve(intervals + 1);
        for (std::size_t i = 0; i <= intervals; ++i) {
            out.push_back(std::min(start + static_cast<double>(i) * step, stop));
        }
        return out;
    }
};

struct SweepRow {
    double p = 0.0;
    double f_nocorr = 0.0;
    double f_canonical = 0.0;
    std::optional<double> f_supermax;  // qutrit only
    std::optional<double> f_search;
};

struct SweepOptions {
    int d = 3;
    PGrid grid;
    std::optional<SearchConfig> search;  // fills f_search when set
};

inline SweepRow sweep_row(int d, double p, const std::optional<SearchConfig>& search = std::nullopt) {
    const KrausSet canonical = amplitude_damping(d, p);
    SweepRow row{p, ent_fidelity(canonical), correction_bound(canonical), std::nullopt, std::nullopt};
    if (d == 3) row.f_supermax = fD_max(p);
    if (search) row.f_search = random_search(canonical, *search).best_bound;
    return row;
}

inline std::vector<SweepRow> sweep(const SweepOptions& options) {
    std::vector<SweepRow> rows;
    for (double p : options.grid.points()) rows.push_back(sweep_row(options.d, p, options.search));
    return rows;
}

inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

/// Columns p,f_nocorr,f_canonical,f_supermax[,f_search]; f_supermax is left
/// empty when the dimension has no closed form.
inline void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool with_search) {
    out << "p,f_nocorr,f_canonical,f_supermax" << (with_search ? ",f_search" : "") << '\n';
    for (const auto& row : rows) {
        out << format_number(row.p) << ',' << format_number(row.f_nocorr) << ','
            << format_number(row.f_canonical) << ',';
        if (row.f_supermax) out << format_number(*row.f_supermax);
        if (with_search) {
            out << ',';
            if (row.f_search) out << format_number(*row.f_search);
        }
        out << '\n';
    }
}

/// Minimal line plot: dotted = no correction, dashed = canonical, solid = super-canonical maximum.
inline void write_svg(std::ostream& out, const std::vector<SweepRow>& rows, int d) {
    constexpr double width = 640, height = 420, left = 60, right = 20, top = 20, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto x_of = [&](double p) { return left + p * plot_w; };
    auto y_of = [&](double f) { return top + (1.0 - f) * plot_h; };
    auto polyline = [&](auto getter, const char* dash, const char* colour) {
        std::ostringstream pts;
        for (const auto& row : rows) {
            const std::optional<double> v = getter(row);
            if (v) pts << format_number(x_of(row.p)) << ',' << format_number(y_of(*v)) << ' ';
        }
        out << "  <polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"";
        if (*dash) out << " stroke-dasharray=\"" << dash << '"';
        out << " points=\"" << pts.str() << "\"/>\n";
    };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "  <g stroke=\"black\" stroke-width=\"1\">\n"
        << "    <line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\"/>\n"
        << "    <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\"/>\n"
        << "  </g>\n"
        << "  <g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int tick = 0; tick <= 5; ++tick) {
        const double v = tick / 5.0;
        out << "    <text x=\"" << format_number(x_of(v)) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\">" << format_number(v) << "</text>\n"
            << "    <text x=\"" << left - 8 << "\" y=\"" << format_number(y_of(v) + 4)
            << "\" text-anchor=\"end\">" << format_number(v) << "</text>\n";
    }
    out << "    <text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\">p</text>\n"
        << "    <text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 "
        << top + plot_h / 2 << ")\" text-anchor=\"middle\">entanglement fidelity (d=" << d
        << ")</text>\n"
        << "  </g>\n";

    polyline([](const SweepRow& r) { return std::optional<double>(r.f_nocorr); }, "2,4", "#1f77b4");
    polyline([](const SweepRow& r) { return std::optional<double>(r.f_canonical); }, "8,5", "#2ca02c");
    const bool has_supermax = !rows.empty() && rows.front().f_supermax.has_value();
    if (has_supermax) {
        polyline([](const SweepRow& r) { return r.f_supermax; }, "", "#d62728");
    }

    struct Entry {
        const char* label;
        const char* dash;
        const char* colour;
    };
    std::vector<Entry> legend = {{"no correction (dot)", "2,4", "#1f77b4"},
                                 {"canonical / equi-canonical (dash)", "8,5", "#2ca02c"}};
    if (has_supermax) legend.push_back({"super-canonical maximum (solid)", "", "#d62728"});
    double y = top + plot_h - 16.0 * static_cast<double>(legend.size());
    for (const auto& e : legend) {
        out << "  <line x1=\"" << left + 12 << "\" y1=\"" << y << "\" x2=\"" << left + 42 << "\" y2=\""
            << y << "\" stroke=\"" << e.colour << "\" stroke-width=\"2\"";
        if (*e.dash) out << " stroke-dasharray=\"" << e.dash << '"';
        out << "/>\n  <text x=\"" << left + 48 << "\" y=\"" << y + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << e.label << "</text>\n";
        y += 16.0;
    }
    out << "</svg>\n";
}

// JSON

inline nlohmann::json to_json(const ComplexMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json to_json(const KrausSet& k) {
    nlohmann::json ops = nlohmann::json::array();
    for (const auto& op : k) ops.push_back(to_json(op));
    return ops;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols) throw InvalidInput("ragged matrix in JSON");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& z = row.at(static_cast<std::size_t>(c));
            m(r, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
        }
    }
    return m;
}

inline KrausSet kraus_from_json(const nlohmann::json& j) {
    std::vector<ComplexMatrix> ops;
    for (const auto& op : j) ops.push_back(matrix_from_json(op));
    return KrausSet(std::move(ops));
}

inline const char* to_string(Sampler s) { return s == Sampler::gellmann ? "gellmann" : "haar"; }

inline nlohmann::json to_json(const SearchResult& r) {
    nlohmann::json j;
    j["best_bound"] = r.best_bound;
    j["best_params"] = {{"n", r.best_params.n}, {"coeffs", r.best_params.coeffs}};
    j["best_kraus"] = to_json(r.best_kraus);
    j["best_index"] = r.best_index;
    j["samples_evaluated"] = r.samples_evaluated;
    j["min_bound"] = r.min_bound;
    j["max_bound"] = r.max_bound;
    j["spread"] = r.max_bound - r.min_bound;
    nlohmann::json buckets = nlohmann::json::array();
    for (std::size_t b = 0; b < r.histogram.size(); ++b) {
        if (r.histogram[b] != 0) buckets.push_back({static_cast<double>(b) / histogram_bins, r.histogram[b]});
    }
    j["histogram"] = {{"bin_width", 1.0 / histogram_bins}, {"nonzero_bins", std::move(buckets)}};
    j["wall_time"] = r.wall_time;
    return j;
}

/// Dilation summary: extracted operators, completeness residual, entrywise
/// |.| deviation from the canonical operators, and the correction bound.
inline nlohmann::json dilation_report(int d, double chi) {
    const JointUnitary u = joint_unitary(d, chi);
    const KrausSet extracted = extract_kraus(u);
    const double s = std::sin(chi);
    const double p = std::clamp(s * s, 0.0, 1.0);
    const KrausSet canonical = amplitude_damping(d, p);
    double deviation = 0.0;
    for (std::size_t m = 0; m < extracted.size(); ++m) {
        deviation = std::max(deviation, max_abs(ComplexMatrix(extracted[m].cwiseAbs().cast<Complex>() -
                                                              canonical[m].cwiseAbs().cast<Complex>())));
    }
    nlohmann::json j;
    j["d"] = d;
    j["chi"] = chi;
    j["p"] = p;
    j["kraus"] = to_json(extracted);
    j["completeness_residual"] = extracted.completeness_residual();
    j["abs_deviation"] = deviation;
    j["correction_bound"] = correction_bound(extracted);
    return j;
}

}  // namespace kraus_reclaim
