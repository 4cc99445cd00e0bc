// Copyright 2026 The pbopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Self-contained SVG line charts from CSV columns. Output depends only on
// the input table, so identical input gives identical bytes.

#ifndef PBOPT_SVG_HPP
#define PBOPT_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pbopt/csv.hpp"

namespace pbopt {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

namespace svg_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace svg_detail

/// One series per (run, column): x is `x_col` (default "iteration", falling
/// back to the row index when absent), runs are split by "run_id"+"seed"
/// when those columns exist. Rows with an empty y are skipped.
inline std::vector<Series> series_from_csv(const CsvTable& t, const std::vector<std::string>& cols,
                                           const std::string& x_col = "iteration") {
  std::vector<std::size_t> yidx;
  for (const auto& c : cols) yidx.push_back(t.column(c));
  const auto find = [&t](const std::string& name) -> long {
    for (std::size_t c = 0; c < t.header.size(); ++c)
      if (t.header[c] == name) return static_cast<long>(c);
    return -1;
  };
  const long xi = find(x_col), run = find("run_id"), seed = find("seed");
  std::vector<Series> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::string key;
    if (run >= 0) key += row[static_cast<std::size_t>(run)];
    if (seed >= 0) key += "/" + row[static_cast<std::size_t>(seed)];
    const double x = xi >= 0 ? parse_field(row[static_cast<std::size_t>(xi)]) : static_cast<double>(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const double y = parse_field(row[yidx[k]]);
      if (std::isnan(y) || std::isnan(x)) continue;
      const std::string label = key.empty() ? cols[k] : key + " " + cols[k];
      auto [it, fresh] = index.emplace(label, out.size());
      if (fresh) out.push_back({label, {}});
      out[it->second].points.emplace_back(x, y);
    }
  }
  return out;
}

inline std::string render_svg(const std::vector<Series>& series, const std::string& title = "") {
  using namespace svg_detail;
  constexpr double W = 720, H = 440, L = 70, R = 200, T = 30, B = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool any = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!any) {
        x0 = x1 = x;
        y0 = y1 = y;
        any = true;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pw = W - L - R, ph = H - T - B;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return T + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    os << "<text x=\"" << num(L) << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">"
       << escape(title) << "</text>\n";
  }
  os << "<g stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << num(L) << "\" y1=\"" << num(T + ph) << "\" x2=\"" << num(L + pw)
     << "\" y2=\"" << num(T + ph) << "\"/>\n";
  os << "<line x1=\"" << num(L) << "\" y1=\"" << num(T) << "\" x2=\"" << num(L) << "\" y2=\""
     << num(T + ph) << "\"/>\n";
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"10\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(T + ph + 15)
       << "\" text-anchor=\"middle\">" << tick(fx) << "</text>\n";
    os << "<text x=\"" << num(L - 5) << "\" y=\"" << num(sy(fy) + 3) << "\" text-anchor=\"end\">"
       << tick(fy) << "</text>\n";
  }
  os << "</g>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t p = 0; p < series[i].points.size(); ++p) {
      if (p) os << ' ';
      os << num(sx(series[i].points[p].first)) << ',' << num(sy(series[i].points[p].second));
    }
    os << "\"/>\n";
    const double ly = T + 12.0 * static_cast<double>(i) + 6;
    os << "<line x1=\"" << num(L + pw + 10) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(L + pw + 30)
       << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(L + pw + 34) << "\" y=\"" << num(ly + 3)
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << escape(series[i].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// Reads `csv_in`, plots `columns`, writes `out_path`.
inline void emit_svg(const std::string& csv_in, const std::vector<std::string>& columns,
                     const std::string& out_path) {
  const CsvTable t = read_csv(csv_in);
  const std::string svg = render_svg(series_from_csv(t, columns));
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + out_path);
  os << svg;
}

}  // namespace pbopt

#endif  // PBOPT_SVG_HPP
