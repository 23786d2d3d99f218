#pragma once

// Reading sweep CSV files back and rendering them as standalone SVG line plots.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "specsqueeze/error.hpp"

namespace specsqueeze::cli {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t index_of(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error(ErrorKind::MissingColumn, "column '" + name + "' not in CSV");
    return static_cast<std::size_t>(it - columns.begin());
  }
};

namespace detail {

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_commas(line);
    if (t.columns.empty()) {
      t.columns = cells;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw Error(ErrorKind::IOError, source + ":" + std::to_string(lineno) + ": expected " +
                                          std::to_string(t.columns.size()) + " fields");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') {
        throw Error(ErrorKind::IOError, source + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty() || t.rows.empty()) throw Error(ErrorKind::IOError, source + ": CSV has no data");
  return t;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IOError, "cannot open '" + path + "'");
  return parse_csv(in, path);
}

struct PlotOptions {
  std::vector<std::string> columns;
  std::optional<double> inset_center;
  double inset_halfwidth = 1e-3;
  std::string title;
};

namespace detail {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
  Range padded() const {
    if (empty()) return {-1.0, 1.0};
    if (hi == lo) {
      const double d = std::max(1.0, std::abs(lo)) * 0.05;
      return {lo - d, hi + d};
    }
    const double d = 0.05 * (hi - lo);
    return {lo - d, hi + d};
  }
};

struct Panel {
  double x0, y0, w, h;  // pixel box
  Range xr, yr;         // data box
  double sx(double x) const { return x0 + (x - xr.lo) / (xr.hi - xr.lo) * w; }
  double sy(double y) const { return y0 + h - (y - yr.lo) / (yr.hi - yr.lo) * h; }
};

inline std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline const char* palette(std::size_t k) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return colors[k % 6];
}

inline void draw_panel(std::ostringstream& os, const Panel& p, const CsvTable& t,
                       const std::vector<std::size_t>& ycols, const std::string& xlabel,
                       double x_offset, const std::string& cls) {
  os << "<g class=\"" << cls << "\">\n";
  os << "<rect x=\"" << fmt("%.2f", p.x0) << "\" y=\"" << fmt("%.2f", p.y0) << "\" width=\""
     << fmt("%.2f", p.w) << "\" height=\"" << fmt("%.2f", p.h)
     << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = p.xr.lo + (p.xr.hi - p.xr.lo) * k / 4.0;
    const double yv = p.yr.lo + (p.yr.hi - p.yr.lo) * k / 4.0;
    os << "<text x=\"" << fmt("%.2f", p.sx(xv)) << "\" y=\"" << fmt("%.2f", p.y0 + p.h + 16)
       << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt("%.4g", xv) << "</text>\n";
    os << "<text x=\"" << fmt("%.2f", p.x0 - 6) << "\" y=\"" << fmt("%.2f", p.sy(yv) + 4)
       << "\" font-size=\"11\" text-anchor=\"end\">" << fmt("%.4g", yv) << "</text>\n";
  }
  os << "<text x=\"" << fmt("%.2f", p.x0 + p.w / 2) << "\" y=\"" << fmt("%.2f", p.y0 + p.h + 34)
     << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  if (p.yr.lo < 1.0 && p.yr.hi > 1.0) {
    os << "<line x1=\"" << fmt("%.2f", p.x0) << "\" y1=\"" << fmt("%.2f", p.sy(1.0)) << "\" x2=\""
       << fmt("%.2f", p.x0 + p.w) << "\" y2=\"" << fmt("%.2f", p.sy(1.0))
       << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t k = 0; k < ycols.size(); ++k) {
    os << "<path class=\"curve\" data-column=\"" << t.columns[ycols[k]] << "\" fill=\"none\" stroke=\""
       << palette(k) << "\" stroke-width=\"1.5\" d=\"";
    bool pen_down = false;
    for (const auto& row : t.rows) {
      const double x = row[0] - x_offset;
      const double y = row[ycols[k]];
      if (!std::isfinite(y) || x < p.xr.lo || x > p.xr.hi) {
        pen_down = false;
        continue;
      }
      const double yc = std::clamp(y, p.yr.lo, p.yr.hi);
      os << (pen_down ? " L" : " M") << fmt("%.2f", p.sx(x)) << ',' << fmt("%.2f", p.sy(yc));
      pen_down = true;
    }
    os << "\"/>\n";
  }
  os << "</g>\n";
}

}  // namespace detail

/// Line plot of the selected columns against the first CSV column. With an
/// inset center c, a second panel shows the same curves over c ± halfwidth
/// against x − c.
inline std::string render_svg(const CsvTable& t, const PlotOptions& opt) {
  if (opt.columns.empty()) throw Error(ErrorKind::ConfigError, "no columns selected for plotting");
  std::vector<std::size_t> ycols;
  for (const auto& c : opt.columns) ycols.push_back(t.index_of(c));
  const std::string xlabel = t.columns[0];

  detail::Range xr, yr;
  for (const auto& row : t.rows) {
    xr.add(row[0]);
    for (auto k : ycols) yr.add(row[k]);
  }
  const bool inset = opt.inset_center.has_value();
  detail::Range ixr{-opt.inset_halfwidth, opt.inset_halfwidth}, iyr;
  if (inset) {
    if (!(opt.inset_halfwidth > 0.0)) throw Error(ErrorKind::ConfigError, "inset half-width must be positive");
    for (const auto& row : t.rows) {
      if (std::abs(row[0] - *opt.inset_center) > opt.inset_halfwidth) continue;
      for (auto k : ycols) iyr.add(row[k]);
    }
  }

  const double width = inset ? 1100.0 : 760.0;
  const double height = 480.0;
  std::ostringstream os;
  const auto xp = xr.empty() || xr.lo == xr.hi ? xr.padded() : xr;
  const auto yp = yr.padded();
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\" data-curves=\"" << ycols.size()
     << "\" data-xmin=\"" << detail::fmt("%.17g", xp.lo) << "\" data-xmax=\""
     << detail::fmt("%.17g", xp.hi) << "\" data-ymin=\"" << detail::fmt("%.17g", yp.lo)
     << "\" data-ymax=\"" << detail::fmt("%.17g", yp.hi) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  if (!opt.title.empty()) {
    os << "<text x=\"" << width / 2 << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">"
       << opt.title << "</text>\n";
  }
  const detail::Panel main{70.0, 40.0, 640.0, 380.0, xp, yp};
  detail::draw_panel(os, main, t, ycols, xlabel, 0.0, "main");
  if (inset) {
    const detail::Panel side{800.0, 40.0, 260.0, 380.0, ixr, iyr.padded()};
    detail::draw_panel(os, side, t, ycols, xlabel + " - " + detail::fmt("%.6g", *opt.inset_center),
                       *opt.inset_center, "inset");
  }
  for (std::size_t k = 0; k < ycols.size(); ++k) {
    const double y = 60.0 + 18.0 * k;
    os << "<line x1=\"600\" y1=\"" << y << "\" x2=\"625\" y2=\"" << y << "\" stroke=\""
       << detail::palette(k) << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"630\" y=\"" << y + 4 << "\" font-size=\"12\">" << t.columns[ycols[k]] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_svg(const std::string& path, const std::string& svg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IOError, "cannot write '" + path + "'");
  out << svg;
  if (!out) throw Error(ErrorKind::IOError, "failed writing '" + path + "'");
}

}  // namespace specsqueeze::cli
