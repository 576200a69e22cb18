#include "betactl/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <json.hpp>
#include <sstream>

#include "betactl/error.hpp"

namespace betactl {

namespace {

constexpr std::array<std::string_view, 8> kColumns = {"t", "x1", "x2", "y_beta", "y_cc", "u1", "F_est", "y_star"};

void append_number(std::string& out, double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string fmt(double v, int precision = 6) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

// shortest text that reads back as v
std::string exact(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string csv_file_name(int scenario_id, LoopMode mode) {
    return "s" + std::to_string(scenario_id) + "_" + std::string(to_string(mode)) + ".csv";
}

void write_csv(const SimResult& r, std::ostream& out) {
    const std::size_t n = r.size();
    for (const auto* v : {&r.x1, &r.x2, &r.y_beta, &r.y_cc, &r.u1, &r.f_est}) {
        if (v->size() != n) throw Error("result series lengths differ");
    }
    std::string buf;
    buf.reserve(64 * 1024);
    buf.append(kCsvHeader).push_back('\n');
    for (std::size_t k = 0; k < n; ++k) {
        for (double v : {r.t[k], r.x1[k], r.x2[k], r.y_beta[k], r.y_cc[k], r.u1[k], r.f_est[k]}) {
            append_number(buf, v);
            buf.push_back(',');
        }
        append_number(buf, r.y_star);
        buf.push_back('\n');
        if (buf.size() > 60 * 1024) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("failed to write CSV");
}

void write_csv(const SimResult& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    write_csv(r, out);
    out.close();
    if (!out) throw Error("failed to write '" + path.string() + "'");
}

SimResult read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("line 1: empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split(line, ',');
    std::map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
    std::array<std::size_t, kColumns.size()> col{};
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
        const auto it = index.find(kColumns[c]);
        if (it == index.end()) throw Error("missing column '" + std::string(kColumns[c]) + "'");
        col[c] = it->second;
    }

    SimResult r;
    std::array<std::vector<double>*, 7> series = {&r.t, &r.x1, &r.x2, &r.y_beta, &r.y_cc, &r.u1, &r.f_est};
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            throw Error("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(fields.size()));
        }
        std::array<double, kColumns.size()> row{};
        for (std::size_t c = 0; c < kColumns.size(); ++c) {
            const std::string_view f = fields[col[c]];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[c]);
            if (ec != std::errc{} || ptr != f.data() + f.size()) {
                throw Error("line " + std::to_string(line_no) + ": bad number '" + std::string(f) + "' in column " +
                            std::string(kColumns[c]));
            }
        }
        for (std::size_t c = 0; c < series.size(); ++c) series[c]->push_back(row[c]);
        r.y_star = row[7];
    }
    if (r.t.size() < 2) throw Error("CSV holds fewer than two rows");
    r.h = (r.t.back() - r.t.front()) / static_cast<double>(r.t.size() - 1);
    return r;
}

SimResult read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    try {
        return read_csv(in);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string metrics_json(const std::vector<SpectrumReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        arr.push_back({
            {"scenario_id", r.scenario_id},
            {"mode", std::string(to_string(r.mode))},
            {"series", r.series},
            {"span", {r.span.start, r.span.end}},
            {"dominant_frequency_hz", optional_number(r.dominant_frequency_hz)},
            {"beta_power", r.beta_power},
            {"tone50_power", r.tone50_power},
            {"mean_ycc", r.mean_ycc},
            {"suppression_ratio", optional_number(r.suppression_ratio)},
        });
    }
    return nlohmann::json{{"reports", arr}}.dump(2) + "\n";
}

std::string metrics_text(const std::vector<SpectrumReport>& reports) {
    std::ostringstream os;
    for (const auto& r : reports) {
        os << "scenario " << r.scenario_id << " " << to_string(r.mode) << " " << r.series << " ["
           << fmt(r.span.start) << ", " << fmt(r.span.end) << "] s\n";
        os << "  dominant frequency  "
           << (r.dominant_frequency_hz ? fmt(*r.dominant_frequency_hz) + " Hz" : std::string("n/a")) << "\n";
        os << "  beta power          " << fmt(r.beta_power) << "\n";
        os << "  50 Hz tone power    " << fmt(r.tone50_power) << "\n";
        os << "  mean y_cc           " << fmt(r.mean_ycc) << "\n";
        if (r.suppression_ratio) os << "  suppression ratio   " << fmt(*r.suppression_ratio) << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Trace {
    const std::vector<double>* values;
    std::string color;
    std::string label;
};

struct Box {
    double x, y, w, h;
};

// Min/max per bucket keeps oscillation envelopes visible after decimation.
std::vector<std::pair<double, double>> decimate(const std::vector<double>& t, const std::vector<double>& v,
                                                std::size_t buckets) {
    std::vector<std::pair<double, double>> pts;
    const std::size_t n = t.size();
    if (n <= 2 * buckets) {
        for (std::size_t i = 0; i < n; ++i) pts.emplace_back(t[i], v[i]);
        return pts;
    }
    const std::size_t per = (n + buckets - 1) / buckets;
    for (std::size_t start = 0; start < n; start += per) {
        const std::size_t end = std::min(n, start + per);
        std::size_t lo = start, hi = start;
        for (std::size_t i = start; i < end; ++i) {
            if (v[i] < v[lo]) lo = i;
            if (v[i] > v[hi]) hi = i;
        }
        const auto [a, b] = std::minmax(lo, hi);
        pts.emplace_back(t[a], v[a]);
        if (b != a) pts.emplace_back(t[b], v[b]);
    }
    return pts;
}

void draw_panel(std::ostringstream& os, const std::string& id, const std::string& title, const Box& box,
                const std::vector<double>& t, const std::vector<Trace>& traces,
                const std::optional<double>& setpoint) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& tr : traces) {
        for (double v : *tr.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (setpoint) {
        lo = std::min(lo, *setpoint);
        hi = std::max(hi, *setpoint);
    }
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double t0 = t.front(), t1 = t.back();
    auto px = [&](double tv) { return box.x + (tv - t0) / (t1 - t0) * box.w; };
    auto py = [&](double v) { return box.y + box.h - (v - lo) / (hi - lo) * box.h; };

    os << "<g id=\"panel-" << id << "\" class=\"panel\">\n";
    os << "<text x=\"" << box.x << "\" y=\"" << box.y - 8 << "\" font-size=\"13\">(" << id << ") " << title
       << "</text>\n";
    os << "<rect x=\"" << box.x << "\" y=\"" << box.y << "\" width=\"" << box.w << "\" height=\"" << box.h
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << box.x - 4 << "\" y=\"" << box.y + 10 << "\" font-size=\"10\" text-anchor=\"end\">"
       << fmt(hi, 4) << "</text>\n";
    os << "<text x=\"" << box.x - 4 << "\" y=\"" << box.y + box.h << "\" font-size=\"10\" text-anchor=\"end\">"
       << fmt(lo, 4) << "</text>\n";
    os << "<text x=\"" << box.x << "\" y=\"" << box.y + box.h + 14 << "\" font-size=\"10\">" << fmt(t0, 4)
       << " s</text>\n";
    os << "<text x=\"" << box.x + box.w << "\" y=\"" << box.y + box.h + 14
       << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(t1, 4) << " s</text>\n";

    double legend_y = box.y + 14;
    for (const auto& tr : traces) {
        os << "<polyline class=\"trace\" data-series=\"" << tr.label << "\" fill=\"none\" stroke=\"" << tr.color
           << "\" stroke-width=\"1\" points=\"";
        for (const auto& [tv, v] : decimate(t, *tr.values, 1200)) os << fmt(px(tv)) << ',' << fmt(py(v)) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << box.x + box.w - 6 << "\" y=\"" << legend_y << "\" font-size=\"10\" fill=\""
           << tr.color << "\" text-anchor=\"end\">" << tr.label << "</text>\n";
        legend_y += 12;
    }
    if (setpoint) {
        os << "<line class=\"setpoint\" data-value=\"" << exact(*setpoint) << "\" x1=\"" << box.x << "\" y1=\""
           << fmt(py(*setpoint)) << "\" x2=\"" << box.x + box.w << "\" y2=\"" << fmt(py(*setpoint))
           << "\" stroke=\"#c00\" stroke-dasharray=\"6,4\"/>\n";
    }
    os << "</g>\n";
}

}  // namespace

std::string render_svg(const SimResult& open, const SimResult& closed) {
    if (open.size() < 2 || closed.size() < 2) throw Error("cannot plot fewer than two samples");
    constexpr double width = 1260, height = 680;
    constexpr double left = 70, top = 50, panel_w = 330, panel_h = 230, gap_x = 90, gap_y = 90;
    auto box = [&](int col, int row) {
        return Box{left + col * (panel_w + gap_x), top + row * (panel_h + gap_y), panel_w, panel_h};
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"22\" font-size=\"15\">Scenario " << open.scenario_id
       << ": open loop (top), closed loop (bottom)</text>\n";

    draw_panel(os, "a", "States", box(0, 0), open.t, {{&open.x1, "#1f77b4", "x1"}, {&open.x2, "#ff7f0e", "x2"}}, {});
    draw_panel(os, "b", "Filtered output", box(1, 0), open.t, {{&open.y_beta, "#2ca02c", "y_beta"}}, {});
    draw_panel(os, "c", "Magnitude estimation", box(2, 0), open.t, {{&open.y_cc, "#333", "y_cc"}}, {});
    draw_panel(os, "d", "States", box(0, 1), closed.t,
               {{&closed.x1, "#1f77b4", "x1"}, {&closed.x2, "#ff7f0e", "x2"}}, {});
    draw_panel(os, "e", "Control input", box(1, 1), closed.t, {{&closed.u1, "#9467bd", "u1"}}, {});
    draw_panel(os, "f", "Setpoint (- -) and magnitude estimation", box(2, 1), closed.t,
               {{&closed.y_cc, "#333", "y_cc"}}, closed.y_star);
    os << "</svg>\n";
    return os.str();
}

std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error("'" + dir.string() + "' is not a directory");
    std::vector<std::filesystem::path> written;
    for (int id = 1; id <= 3; ++id) {
        const auto open_path = dir / csv_file_name(id, LoopMode::open);
        const auto closed_path = dir / csv_file_name(id, LoopMode::closed);
        if (!std::filesystem::exists(open_path) || !std::filesystem::exists(closed_path)) continue;
        SimResult open = read_csv(open_path);
        SimResult closed = read_csv(closed_path);
        open.scenario_id = closed.scenario_id = id;
        open.mode = LoopMode::open;
        closed.mode = LoopMode::closed;

        const auto out_path = dir / ("s" + std::to_string(id) + ".svg");
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + out_path.string() + "' for writing");
        out << render_svg(open, closed);
        if (!out) throw Error("failed to write '" + out_path.string() + "'");
        written.push_back(out_path);
    }
    if (written.empty()) throw Error("no s<id>_open.csv / s<id>_closed.csv pair found in '" + dir.string() + "'");
    return written;
}

}  // namespace betactl
