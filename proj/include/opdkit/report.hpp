#pragma once

// CSV, JSON and SVG output for metrics and sweeps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "opdkit/analysis.hpp"
#include "opdkit/errors.hpp"
#include "opdkit/metrics.hpp"

namespace opdkit::report {

using nlohmann::json;

/// Full-precision text for a dB value; non-finite values become the
/// literals inf, -inf and nan.
inline std::string format_db(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json db_to_json(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline double db_from_json(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw ValidationError("unexpected dB literal '" + s + "'");
    }
    return j.get<double>();
}

inline json metrics_to_json(const MetricsReport& m) {
    return json{{"sdr_db", db_to_json(m.sdr_db)},
                {"snr_db", db_to_json(m.snr_db)},
                {"sar_db", db_to_json(m.sar_db)},
                {"artifact_free", m.artifact_free},
                {"no_target", m.no_target},
                {"energies",
                 {{"target", m.energies.target},
                  {"noise_error", m.energies.noise_error},
                  {"artifact_error", m.energies.artifact_error},
                  {"projected", m.energies.projected}}}};
}

inline json regularization_to_json(const RegularizationEvent& e) {
    return json{{"basis", e.basis}, {"lambda", e.lambda}, {"diagonal_shift", e.diagonal_shift}, {"rcond_before", e.rcond_before}};
}

inline constexpr const char* kSweepHeader =
    "utterance_id,omega_noise,omega_artif,omega_obs,sdr_db,snr_db,sar_db,inner_s_hat_y,sari_closed_form_db,error";

namespace detail {

inline std::string opt_number(const std::optional<double>& v) { return v ? format_db(*v) : std::string(); }

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace detail

inline std::string sweep_row_csv(const SweepRow& r) {
    using detail::opt_number;
    std::ostringstream os;
    os << detail::csv_escape(r.utterance_id) << ',' << opt_number(r.omega_noise) << ',' << opt_number(r.omega_artif)
       << ',' << opt_number(r.omega_obs) << ',';
    if (r.error) {
        os << ",,,,," << detail::csv_escape(*r.error);
    } else {
        os << format_db(r.metrics.sdr_db) << ',' << format_db(r.metrics.snr_db) << ',' << format_db(r.metrics.sar_db)
           << ',' << format_db(r.inner_s_hat_y) << ',' << opt_number(r.sari_closed_form_db) << ',';
    }
    return os.str();
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = std::string(kSweepHeader) + '\n';
    for (const auto& r : rows) out += sweep_row_csv(r) + '\n';
    return out;
}

/// Corpus mean (of per-utterance dB values) at one grid point.
struct SummaryRow {
    std::optional<double> omega_noise;
    std::optional<double> omega_artif;
    std::optional<double> omega_obs;
    double sdr_db = 0.0;
    double snr_db = 0.0;
    double sar_db = 0.0;
    std::size_t utterances = 0;
};

/// Groups successful rows by grid point, in order of first appearance.
inline std::vector<SummaryRow> summarize(const std::vector<SweepRow>& rows) {
    using Key = std::tuple<std::optional<double>, std::optional<double>, std::optional<double>>;
    std::vector<SummaryRow> out;
    std::map<Key, std::size_t> index;
    for (const auto& r : rows) {
        if (r.error) continue;
        const Key key{r.omega_noise, r.omega_artif, r.omega_obs};
        auto [it, inserted] = index.try_emplace(key, out.size());
        if (inserted) out.push_back(SummaryRow{r.omega_noise, r.omega_artif, r.omega_obs, 0.0, 0.0, 0.0, 0});
        auto& s = out[it->second];
        s.sdr_db += r.metrics.sdr_db;
        s.snr_db += r.metrics.snr_db;
        s.sar_db += r.metrics.sar_db;
        ++s.utterances;
    }
    for (auto& s : out) {
        const auto n = static_cast<double>(s.utterances);
        s.sdr_db /= n;
        s.snr_db /= n;
        s.sar_db /= n;
    }
    return out;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
    using detail::opt_number;
    std::string out = "omega_noise,omega_artif,omega_obs,sdr_db,snr_db,sar_db,utterances\n";
    for (const auto& s : rows) {
        out += opt_number(s.omega_noise) + ',' + opt_number(s.omega_artif) + ',' + opt_number(s.omega_obs) + ',' +
               format_db(s.sdr_db) + ',' + format_db(s.snr_db) + ',' + format_db(s.sar_db) + ',' +
               std::to_string(s.utterances) + '\n';
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) { detail::write_text(path, text); }

inline void write_json(const std::filesystem::path& path, const json& j) { detail::write_text(path, j.dump(2) + '\n'); }

// --- SVG -------------------------------------------------------------------

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    std::string color = "#1f77b4";
    double width = 2.0;
    double opacity = 1.0;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

inline std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::pair<double, double> nice_range(double lo, double hi) {
    if (!(lo < hi)) {
        const double pad = std::max(1.0, std::abs(lo) * 0.1);
        return {lo - pad, hi + pad};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

} // namespace detail

/// Renders a grid of line-plot panels. Non-finite points are dropped and
/// break the polyline.
inline std::string render_svg(const std::vector<Panel>& panels, std::size_t columns) {
    using namespace detail;
    constexpr double kW = 360, kH = 260, kMarginL = 60, kMarginR = 15, kMarginT = 30, kMarginB = 45;
    columns = std::max<std::size_t>(1, std::min(columns, panels.size()));
    const std::size_t rows = (panels.size() + columns - 1) / columns;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kW * columns) << "\" height=\"" << num(kH * rows)
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        const double ox = kW * static_cast<double>(p % columns);
        const double oy = kH * static_cast<double>(p / columns);
        const double pw = kW - kMarginL - kMarginR;
        const double ph = kH - kMarginT - kMarginB;

        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
        for (const auto& s : panel.series) {
            for (auto [x, y] : s.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
        if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
        if (!(xmin < xmax)) xmax = xmin + 1.0;
        std::tie(ymin, ymax) = nice_range(ymin, ymax);

        const auto sx = [&](double x) { return ox + kMarginL + (x - xmin) / (xmax - xmin) * pw; };
        const auto sy = [&](double y) { return oy + kMarginT + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

        os << "<g>\n";
        os << "<text x=\"" << num(ox + kMarginL + pw / 2) << "\" y=\"" << num(oy + 18)
           << "\" text-anchor=\"middle\" font-size=\"13\">" << escape_xml(panel.title) << "</text>\n";
        os << "<rect x=\"" << num(ox + kMarginL) << "\" y=\"" << num(oy + kMarginT) << "\" width=\"" << num(pw)
           << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double xv = xmin + (xmax - xmin) * i / 4.0;
            const double yv = ymin + (ymax - ymin) * i / 4.0;
            os << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(oy + kMarginT + ph + 14)
               << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
            os << "<text x=\"" << num(ox + kMarginL - 4) << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">"
               << tick(yv) << "</text>\n";
            os << "<line x1=\"" << num(ox + kMarginL) << "\" y1=\"" << num(sy(yv)) << "\" x2=\"" << num(ox + kMarginL + pw)
               << "\" y2=\"" << num(sy(yv)) << "\" stroke=\"#dddddd\"/>\n";
        }
        os << "<text x=\"" << num(ox + kMarginL + pw / 2) << "\" y=\"" << num(oy + kH - 8)
           << "\" text-anchor=\"middle\">" << escape_xml(panel.x_label) << "</text>\n";
        os << "<text transform=\"translate(" << num(ox + 14) << "," << num(oy + kMarginT + ph / 2)
           << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(panel.y_label) << "</text>\n";

        for (const auto& s : panel.series) {
            std::string path;
            bool pen_down = false;
            for (auto [x, y] : s.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) {
                    pen_down = false;
                    continue;
                }
                path += (pen_down ? " L" : " M") + num(sx(x)) + ' ' + num(sy(y));
                pen_down = true;
            }
            if (path.empty()) continue;
            os << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
               << num(s.width) << "\" stroke-opacity=\"" << num(s.opacity) << "\"><title>" << escape_xml(s.label)
               << "</title></path>\n";
        }
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace opdkit::report
