#pragma once

// Report and time-series serialization: CSV trajectories, SVG line plots and
// JSON documents for equilibria, certificates and Monte Carlo runs.

#include "hgl/certificates.hpp"
#include "hgl/equilibria.hpp"
#include "hgl/simulator.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace hgl {

/// Shortest round-trip text for a double, at most 17 significant digits.
std::string format_double(double value);

/// Header "t,<state names>,V,Vdot", one LF-terminated row per sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const StateLayout& layout);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column index by name; throws std::invalid_argument if absent.
    std::size_t column(const std::string& name) const;
};

/// Parse a numeric CSV with one header row.
CsvTable read_csv(std::istream& in);

struct PlotSeries {
    std::string name;
    std::vector<double> y;
};

/// Line plot of each series against `x`, with axes, ticks and a legend.
void write_svg_plot(std::ostream& out, const std::vector<double>& x, const std::string& x_label,
                    const std::vector<PlotSeries>& series, const std::string& title);

nlohmann::json to_json(const EquilibriumSet& eq, const StateLayout& layout);
nlohmann::json to_json(const CertificateReport& report);
nlohmann::json to_json(const MonteCarloReport& report);

/// Fixed-width per-unit table of margins and verdicts.
void write_certificate_table(std::ostream& out, const CertificateReport& report);

}  // namespace hgl
