// Copyright 2026 The peecs Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PEECS_OUTPUT_HPP_
#define PEECS_OUTPUT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "peecs/harness.hpp"

namespace peecs {

class OutputError : public Error {
 public:
  using Error::Error;
};

/// Nine significant digits, as used in every CSV file.
[[nodiscard]] inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline constexpr const char* kTrialCsvHeader =
    "k,sensor_x,sensor_y,n_true,n_est,ospa_total,ospa_loc,ospa_card";
inline constexpr const char* kAggregateCsvHeader =
    "k,ospa_total_mean,ospa_total_std,ospa_loc_mean,ospa_loc_std,ospa_card_mean,ospa_card_std,"
    "card_err_mean,card_err_std,centroid_dist_mean,centroid_dist_std";
inline constexpr const char* kCostCsvHeader = "k,command,dx,dy,card_error,state_error,cost,chosen";
inline constexpr const char* kTrackCsvHeader = "k,birth_time,birth_index,x,y,vx,vy,omega";

[[nodiscard]] inline std::string trial_csv(const TrialRecord& record) {
  std::ostringstream os;
  os << kTrialCsvHeader << '\n';
  for (const auto& s : record.scans) {
    os << s.k << ',' << format_number(s.sensor.x) << ',' << format_number(s.sensor.y) << ','
       << s.n_true() << ',' << s.n_est() << ',' << format_number(s.ospa.total) << ','
       << format_number(s.ospa.localization) << ',' << format_number(s.ospa.cardinality) << '\n';
  }
  return os.str();
}

[[nodiscard]] inline std::string cost_csv(const TrialRecord& record) {
  std::ostringstream os;
  os << kCostCsvHeader << '\n';
  for (const auto& s : record.scans) {
    for (std::size_t i = 0; i < s.costs.size(); ++i) {
      const auto& c = s.costs[i];
      os << s.k << ',' << i << ',' << format_number(c.command.dx) << ','
         << format_number(c.command.dy) << ',' << format_number(c.cardinality_error) << ','
         << format_number(c.state_error) << ',' << format_number(c.cost) << ','
         << (c.command == s.command ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

[[nodiscard]] inline std::string track_csv(const TrialRecord& record) {
  std::ostringstream os;
  os << kTrackCsvHeader << '\n';
  for (const auto& s : record.scans) {
    for (const auto& t : s.tracks) {
      os << s.k << ',' << t.label.birth_time << ',' << t.label.birth_index << ','
         << format_number(t.state.x) << ',' << format_number(t.state.y) << ','
         << format_number(t.state.vx) << ',' << format_number(t.state.vy) << ','
         << format_number(t.state.omega) << '\n';
    }
  }
  return os.str();
}

[[nodiscard]] inline std::string aggregate_csv(const std::vector<ScanAggregate>& per_scan) {
  std::ostringstream os;
  os << kAggregateCsvHeader << '\n';
  for (const auto& s : per_scan) {
    os << s.k << ',' << format_number(s.ospa_total.mean) << ',' << format_number(s.ospa_total.stddev)
       << ',' << format_number(s.ospa_loc.mean) << ',' << format_number(s.ospa_loc.stddev) << ','
       << format_number(s.ospa_card.mean) << ',' << format_number(s.ospa_card.stddev) << ','
       << format_number(s.card_error.mean) << ',' << format_number(s.card_error.stddev) << ','
       << format_number(s.centroid_distance.mean) << ','
       << format_number(s.centroid_distance.stddev) << '\n';
  }
  return os.str();
}

/// One parsed row of a per-trial CSV file.
struct TrialCsvRow {
  int k{0};
  double sensor_x{0.0};
  double sensor_y{0.0};
  int n_true{0};
  int n_est{0};
  double ospa_total{0.0};
  double ospa_loc{0.0};
  double ospa_card{0.0};
};

[[nodiscard]] inline std::vector<TrialCsvRow> parse_trial_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTrialCsvHeader) {
    throw OutputError("trial CSV: unexpected header");
  }
  std::vector<TrialCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8) throw OutputError("trial CSV: expected 8 fields in '" + line + "'");
    TrialCsvRow row;
    row.k = std::stoi(fields[0]);
    row.sensor_x = std::stod(fields[1]);
    row.sensor_y = std::stod(fields[2]);
    row.n_true = std::stoi(fields[3]);
    row.n_est = std::stoi(fields[4]);
    row.ospa_total = std::stod(fields[5]);
    row.ospa_loc = std::stod(fields[6]);
    row.ospa_card = std::stod(fields[7]);
    rows.push_back(row);
  }
  return rows;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw OutputError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// SVG plots
// ---------------------------------------------------------------------------

namespace detail {

struct PlotFrame {
  double x0, x1, y0, y1;
  double width{640.0}, height{480.0}, margin{50.0};

  [[nodiscard]] double px(double x) const {
    return margin + (x - x0) / (x1 - x0) * (width - 2 * margin);
  }
  [[nodiscard]] double py(double y) const {
    return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin);
  }
};

inline std::string svg_header(const PlotFrame& f, const std::string& title) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
     << f.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<rect x=\"" << f.margin << "\" y=\"" << f.margin << "\" width=\""
     << f.width - 2 * f.margin << "\" height=\"" << f.height - 2 * f.margin
     << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << f.width / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n"
     << "<text x=\"" << f.margin << "\" y=\"" << f.height - 30 << "\">" << format_number(f.x0)
     << "</text>\n"
     << "<text x=\"" << f.width - f.margin << "\" y=\"" << f.height - 30
     << "\" text-anchor=\"end\">" << format_number(f.x1) << "</text>\n"
     << "<text x=\"5\" y=\"" << f.height - f.margin << "\">" << format_number(f.y0) << "</text>\n"
     << "<text x=\"5\" y=\"" << f.margin + 10 << "\">" << format_number(f.y1) << "</text>\n";
  return os.str();
}

inline std::string polyline(const PlotFrame& f, const std::vector<std::pair<double, double>>& pts,
                            const char* color, double width = 1.5) {
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
     << "\" points=\"";
  for (const auto& [x, y] : pts) os << format_number(f.px(x)) << ',' << format_number(f.py(y)) << ' ';
  os << "\"/>\n";
  return os.str();
}

}  // namespace detail

/// Sensor path, true object paths and estimated positions of one trial.
[[nodiscard]] inline std::string trajectory_svg(const TrialRecord& record) {
  double x0 = record.sensor_start.x, x1 = x0, y0 = record.sensor_start.y, y1 = y0;
  auto grow = [&](double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const auto& s : record.scans) {
    grow(s.sensor.x, s.sensor.y);
    for (const auto& t : s.truth) grow(t.state.x, t.state.y);
    for (const auto& t : s.tracks) grow(t.state.x, t.state.y);
  }
  detail::PlotFrame f{x0 - 50, x1 + 50, y0 - 50, y1 + 50};
  std::string svg = detail::svg_header(f, "Sensor and object positions");
  std::vector<std::pair<double, double>> sensor{{record.sensor_start.x, record.sensor_start.y}};
  std::map<int, std::vector<std::pair<double, double>>> truth;
  for (const auto& s : record.scans) {
    sensor.emplace_back(s.sensor.x, s.sensor.y);
    for (const auto& t : s.truth) truth[t.track_id].emplace_back(t.state.x, t.state.y);
  }
  for (const auto& [id, pts] : truth) svg += detail::polyline(f, pts, "black", 2.0);
  std::ostringstream marks;
  for (const auto& s : record.scans) {
    for (const auto& t : s.tracks) {
      marks << "<circle cx=\"" << format_number(f.px(t.state.x)) << "\" cy=\""
            << format_number(f.py(t.state.y)) << "\" r=\"2\" fill=\"red\"/>\n";
    }
  }
  svg += marks.str();
  svg += detail::polyline(f, sensor, "blue", 1.5);
  svg += "</svg>\n";
  return svg;
}

/// Mean OSPA curves (total, localization, cardinality) for one or more runs.
[[nodiscard]] inline std::string error_svg(
    const std::vector<std::pair<std::string, std::vector<ScanAggregate>>>& series, double cutoff) {
  int k_max = 1;
  for (const auto& [_, per_scan] : series) {
    for (const auto& s : per_scan) k_max = std::max(k_max, s.k);
  }
  detail::PlotFrame f{1.0, static_cast<double>(std::max(k_max, 2)), 0.0, cutoff};
  std::string svg = detail::svg_header(f, "Mean OSPA error per scan");
  const char* colors[] = {"black", "red", "blue", "green"};
  std::size_t idx = 0;
  std::ostringstream legend;
  for (const auto& [name, per_scan] : series) {
    const char* color = colors[idx % 4];
    std::vector<std::pair<double, double>> total, loc, card;
    for (const auto& s : per_scan) {
      total.emplace_back(s.k, s.ospa_total.mean);
      loc.emplace_back(s.k, s.ospa_loc.mean);
      card.emplace_back(s.k, s.ospa_card.mean);
    }
    svg += detail::polyline(f, total, color, 2.0);
    svg += detail::polyline(f, loc, color, 0.8);
    std::string dashed = detail::polyline(f, card, color, 0.8);
    dashed.insert(dashed.find("points"), "stroke-dasharray=\"4 3\" ");
    svg += dashed;
    legend << "<text x=\"" << f.width - f.margin - 5 << "\" y=\"" << f.margin + 15 + 15 * idx
           << "\" text-anchor=\"end\" fill=\"" << color << "\">" << name
           << " (thick: total, thin: loc, dashed: card)</text>\n";
    ++idx;
  }
  svg += legend.str();
  svg += "</svg>\n";
  return svg;
}

/// Writes per-trial CSVs (trial, cost table, tracks), the aggregate CSV and,
/// when requested, SVG plots into `dir`.
inline void emit_outputs(const MonteCarloResult& result, const std::filesystem::path& dir,
                         bool plot, double ospa_cutoff) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create '" + dir.string() + "': " + ec.message());
  for (std::size_t t = 0; t < result.trials.size(); ++t) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "%03zu.csv", t);
    write_text(dir / (std::string("trial_") + suffix), trial_csv(result.trials[t]));
    write_text(dir / (std::string("costs_") + suffix), cost_csv(result.trials[t]));
    write_text(dir / (std::string("tracks_") + suffix), track_csv(result.trials[t]));
  }
  write_text(dir / "aggregate.csv", aggregate_csv(result.per_scan));
  if (plot && !result.trials.empty()) {
    write_text(dir / "trajectory.svg", trajectory_svg(result.trials.front()));
    write_text(dir / "errors.svg",
               error_svg({{std::string(to_string(result.trials.front().mode)), result.per_scan}},
                         ospa_cutoff));
  }
}

}  // namespace peecs

#endif  // PEECS_OUTPUT_HPP_
