#include "hgl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hgl {

using nlohmann::json;

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const StateLayout& layout) {
    out << "t";
    for (const auto& name : layout.names()) {
        out << ',' << name;
    }
    out << ",V,Vdot\n";
    const bool has_v = traj.V.size() == traj.t.size();
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        out << format_double(traj.t[k]);
        const Vec& x = traj.x[k];
        for (Index c = 0; c < x.size(); ++c) {
            out << ',' << format_double(x[c]);
        }
        if (has_v) {
            out << ',' << format_double(traj.V[k]) << ',' << format_double(traj.Vdot[k]);
        } else {
            out << ",nan,nan";
        }
        out << '\n';
    }
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw std::invalid_argument("csv: no column named \"" + name + "\"");
    }
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("csv: empty input");
    }
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            table.header.push_back(cell);
        }
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            double v = 0.0;
            if (cell == "nan") {
                v = std::numeric_limits<double>::quiet_NaN();
            } else {
                const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
                    throw std::invalid_argument("csv: bad number \"" + cell + "\" on line " +
                                                std::to_string(lineno));
                }
            }
            row.push_back(v);
        }
        if (row.size() != table.header.size()) {
            throw std::invalid_argument("csv: line " + std::to_string(lineno) + " has " +
                                        std::to_string(row.size()) + " cells, header has " +
                                        std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

// 1-2-5 tick spacing covering [lo, hi] with roughly `target` intervals
std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
    const double span = hi - lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
        step = f * mag;
        if (span / step <= target) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

std::string tick_label(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_svg_plot(std::ostream& out, const std::vector<double>& x, const std::string& x_label,
                    const std::vector<PlotSeries>& series, const std::string& title) {
    constexpr double width = 800, height = 480;
    constexpr double left = 70, right = 170, top = 40, bottom = 50;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (double v : x) {
        if (std::isfinite(v)) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
    }
    for (const auto& s : series) {
        for (double v : s.y) {
            if (std::isfinite(v)) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        }
    }
    if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; }
    if (!std::isfinite(ymin)) { ymin = 0; ymax = 1; }
    if (xmax - xmin <= 0) { xmax = xmin + 1; }
    if (ymax - ymin <= 0) { ymin -= 0.5; ymax += 0.5; }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto sx = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double v) { return top + (ymax - v) / (ymax - ymin) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << escape(title) << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : nice_ticks(xmin, xmax)) {
        const double px = sx(t);
        out << "<line x1=\"" << px << "\" y1=\"" << top << "\" x2=\"" << px << "\" y2=\"" << top + ph
            << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << top + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(t)
            << "</text>\n";
    }
    for (double t : nice_ticks(ymin, ymax)) {
        const double py = sy(t);
        out << "<line x1=\"" << left << "\" y1=\"" << py << "\" x2=\"" << left + pw << "\" y2=\"" << py
            << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << left - 6 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(t)
            << "</text>\n";
    }
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(x_label)
        << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* colour = palette[s % std::size(palette)];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        const std::size_t count = std::min(x.size(), series[s].y.size());
        for (std::size_t k = 0; k < count; ++k) {
            if (!std::isfinite(x[k]) || !std::isfinite(series[s].y[k])) continue;
            out << sx(x[k]) << ',' << sy(series[s].y[k]) << ' ';
        }
        out << "\"/>\n";
        const double ly = top + 14 + 18 * static_cast<double>(s);
        out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 32
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(series[s].name) << "</text>\n";
    }
    out << "</svg>\n";
}

namespace {

json vec_json(const Vec& v) {
    json arr = json::array();
    for (Index k = 0; k < v.size(); ++k) {
        // JSON has no infinity; unsatisfiable thresholds are written as null
        if (std::isfinite(v[k])) {
            arr.push_back(v[k]);
        } else {
            arr.push_back(nullptr);
        }
    }
    return arr;
}

json bools_json(const std::vector<bool>& v) {
    json arr = json::array();
    for (bool b : v) arr.push_back(b);
    return arr;
}

}  // namespace

json to_json(const EquilibriumSet& eq, const StateLayout& layout) {
    const auto names = layout.names();
    json points = json::array();
    for (std::size_t k = 0; k < eq.points.size(); ++k) {
        const auto& pt = eq.points[k];
        json state = json::object();
        for (Index c = 0; c < pt.x.size(); ++c) {
            state[names[static_cast<std::size_t>(c)]] = pt.x[c];
        }
        points.push_back({{"index", k},
                          {"label", to_string(pt.kind)},
                          {"pattern", pt.pattern},
                          {"delta", vec_json(pt.x.head(eq.n))},
                          {"state", vec_json(pt.x)}});
    }
    return {{"n", eq.n},
            {"m", eq.m},
            {"state_order", names},
            {"y_star", vec_json(eq.y_star)},
            {"references", {{"T_r", vec_json(eq.T_r)}, {"i_dc_r", vec_json(eq.i_dc_r)}}},
            {"points", points}};
}

json to_json(const CertificateReport& r) {
    json q11 = json::array();
    for (const auto& b : r.q.q11) {
        q11.push_back({{b(0, 0), b(0, 1), b(0, 2)}, {b(1, 0), b(1, 1), b(1, 2)}, {b(2, 0), b(2, 1), b(2, 2)}});
    }
    json spectra = json::array();
    for (const auto& s : r.spectra) {
        json eig = json::array();
        for (Index k = 0; k < s.size(); ++k) {
            eig.push_back({s[k].real(), s[k].imag()});
        }
        spectra.push_back(eig);
    }
    return {{"D_min", vec_json(r.D_min)},
            {"D_margin", vec_json(r.D_margin)},
            {"gamma_min_printed", vec_json(r.gamma_min)},
            {"gamma_min_schur", vec_json(r.gamma_min_schur)},
            {"gamma_margin", vec_json(r.gamma_margin)},
            {"gamma_margin_printed", vec_json(r.gamma_margin_printed)},
            {"gamma_infinite", bools_json(r.gamma_infinite)},
            {"q11", q11},
            {"q11_min_eig", vec_json(r.q11_min_eig)},
            {"q22", vec_json(r.q.q22)},
            {"q22_min", r.q22_min},
            {"verdicts",
             {{"closed_form", r.closed_form_pass},
              {"printed_form", r.printed_form_pass},
              {"direct_pd", r.direct_pd_pass},
              {"agreement", r.agreement},
              {"pass", r.pass}}},
            {"max_real_part", vec_json(r.max_real_part)},
            {"spectra", spectra}};
}

json to_json(const MonteCarloReport& r) {
    json trials = json::array();
    for (const auto& t : r.results) {
        trials.push_back({{"seed", t.seed},
                          {"injected", t.injected},
                          {"label", t.label},
                          {"termination", to_string(t.reason)},
                          {"final_time", t.final_time}});
    }
    return {{"trials", r.trials},
            {"seed", r.seed},
            {"certified", r.certified},
            {"fraction_stable", r.fraction_stable},
            {"fraction_saddle", r.fraction_saddle},
            {"fraction_unresolved", r.fraction_unresolved},
            {"wall_time", r.wall_time},
            {"threads", r.threads_used},
            {"warnings", r.warnings},
            {"classification", r.labels()},
            {"results", trials}};
}

void write_certificate_table(std::ostream& out, const CertificateReport& r) {
    auto cell = [](double v) {
        std::ostringstream os;
        if (std::isfinite(v)) {
            os << std::setprecision(6) << v;
        } else {
            os << (v > 0 ? "inf" : "-inf");
        }
        return os.str();
    };
    out << std::left << std::setw(6) << "unit" << std::setw(14) << "D_min" << std::setw(14) << "D-D_min"
        << std::setw(14) << "gamma_min" << std::setw(14) << "gamma_schur" << std::setw(14)
        << "gamma-schur" << std::setw(14) << "min eig Q11" << '\n';
    for (Index j = 0; j < r.D_min.size(); ++j) {
        out << std::left << std::setw(6) << j << std::setw(14) << cell(r.D_min[j]) << std::setw(14)
            << cell(r.D_margin[j]) << std::setw(14) << cell(r.gamma_min[j]) << std::setw(14)
            << cell(r.gamma_min_schur[j]) << std::setw(14) << cell(r.gamma_margin[j]) << std::setw(14)
            << cell(r.q11_min_eig[j]) << '\n';
    }
    out << "min Q22 entry: " << cell(r.q22_min) << '\n';
    out << "closed form (schur gain): " << (r.closed_form_pass ? "pass" : "fail")
        << "   printed gain: " << (r.printed_form_pass ? "pass" : "fail")
        << "   direct PD: " << (r.direct_pd_pass ? "pass" : "fail")
        << "   agreement: " << (r.agreement ? "yes" : "NO") << '\n';
    if (r.max_real_part.size() > 0) {
        out << "max Re(eig) at x*_s: " << cell(r.max_real_part[0]);
        if (r.max_real_part.size() > 1) {
            out << "   min over saddles: " << cell(r.max_real_part.tail(r.max_real_part.size() - 1).minCoeff());
        }
        out << '\n';
    }
    out << "certificate: " << (r.pass ? "PASS" : "FAIL") << '\n';
}

}  // namespace hgl
