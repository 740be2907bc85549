#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "css/harness.hpp"

namespace css {

namespace {

// Fixed two-decimal coordinates keep the output byte-stable.
std::string coord(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct PointStat {
  double x = 0.0;
  double mean = 0.0;
  double spread = 0.0;  // se for EQ, sd for SS
  bool plotted = true;
};

struct Series {
  std::string label;
  std::vector<PointStat> points;
};

}  // namespace

std::string results_to_svg(const ResultsTable& table, const std::string& x_label,
                           const std::string& metric) {
  if (table.empty()) throw EmptyInput("refusing to plot an empty results table");
  if (metric != "EQ" && metric != "SS") throw BadParams("metric must be EQ or SS");
  const bool eq_metric = metric == "EQ";

  // Group per-run rows into (method, group) series over sweep values,
  // preserving first-appearance order.
  std::vector<std::pair<std::string, std::string>> series_order;
  std::map<std::pair<std::string, std::string>, std::map<double, std::vector<const TrialReport*>>>
      cells;
  for (const auto& row : table.rows) {
    if (row.is_aggregate()) continue;
    const auto key = std::make_pair(row.method, row.group);
    if (!cells.contains(key)) series_order.push_back(key);
    cells[key][row.sweep_value].push_back(&row);
  }
  if (series_order.empty()) throw EmptyInput("results table has no per-run rows");

  std::vector<Series> series;
  for (const auto& key : series_order) {
    Series s;
    s.label = key.second == "all" ? key.first : key.first + " (" + key.second + ")";
    for (const auto& [x, rows] : cells.at(key)) {
      PointStat pt;
      pt.x = x;
      const double n = static_cast<double>(rows.size());
      if (eq_metric) {
        for (const auto* r : rows) pt.mean += r->eq;
        pt.mean /= n;
        pt.spread = std::sqrt(pt.mean * (1.0 - pt.mean) / n);
      } else {
        // SS is shown over feasible runs only; a cell with none is skipped.
        double count = 0.0;
        for (const auto* r : rows) {
          if (r->feasible == 1.0) {
            pt.mean += r->ss;
            count += 1.0;
          }
        }
        if (count == 0.0) {
          pt.plotted = false;
        } else {
          pt.mean /= count;
          double var = 0.0;
          for (const auto* r : rows) {
            if (r->feasible == 1.0) var += (r->ss - pt.mean) * (r->ss - pt.mean);
          }
          pt.spread = count > 1.0 ? std::sqrt(var / (count - 1.0)) : 0.0;
        }
      }
      s.points.push_back(pt);
    }
    series.push_back(std::move(s));
  }

  double x_min = 0.0, x_max = 0.0, y_max = 0.0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& pt : s.points) {
      if (!pt.plotted) continue;
      if (first) {
        x_min = x_max = pt.x;
        first = false;
      } else {
        x_min = std::min(x_min, pt.x);
        x_max = std::max(x_max, pt.x);
      }
      y_max = std::max(y_max, pt.mean + pt.spread);
    }
  }
  if (first) throw EmptyInput("no plottable points");
  if (x_max == x_min) x_max = x_min + 1.0;
  const bool log_x = x_min > 0.0 && x_max / x_min >= 50.0;
  if (eq_metric) y_max = 1.0;
  if (y_max <= 0.0) y_max = 1.0;

  const double width = 720, height = 440;
  const double left = 70, right = width - 180, top = 30, bottom = height - 50;
  auto x_pos = [&](double x) {
    const double lo = log_x ? std::log10(x_min) : x_min;
    const double hi = log_x ? std::log10(x_max) : x_max;
    const double v = log_x ? std::log10(x) : x;
    return left + (v - lo) / (hi - lo) * (right - left);
  };
  auto y_pos = [&](double y) { return bottom - y / (y_max * 1.05) * (bottom - top); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(width) + "\" height=\"" +
         coord(height) + "\" viewBox=\"0 0 " + coord(width) + " " + coord(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes.
  svg += "<line x1=\"" + coord(left) + "\" y1=\"" + coord(bottom) + "\" x2=\"" + coord(right) +
         "\" y2=\"" + coord(bottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + coord(left) + "\" y1=\"" + coord(top) + "\" x2=\"" + coord(left) +
         "\" y2=\"" + coord(bottom) + "\" stroke=\"black\"/>\n";

  // X ticks at the observed sweep values (capped), Y ticks on a 5-step grid.
  std::vector<double> xticks;
  for (const auto& s : series) {
    for (const auto& pt : s.points) {
      if (std::find(xticks.begin(), xticks.end(), pt.x) == xticks.end()) xticks.push_back(pt.x);
    }
  }
  std::sort(xticks.begin(), xticks.end());
  if (xticks.size() > 10) {
    std::vector<double> thinned;
    for (std::size_t i = 0; i < xticks.size(); i += xticks.size() / 8 + 1) {
      thinned.push_back(xticks[i]);
    }
    xticks = thinned;
  }
  for (double t : xticks) {
    const double x = x_pos(t);
    svg += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(bottom) + "\" x2=\"" + coord(x) +
           "\" y2=\"" + coord(bottom + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + coord(x) + "\" y=\"" + coord(bottom + 20) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + format_double(t) + "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = y_max * 1.05 * i / 5.0;
    const double y = y_pos(v);
    svg += "<line x1=\"" + coord(left - 5) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(left) +
           "\" y2=\"" + coord(y) + "\" stroke=\"black\"/>\n";
    char vbuf[32];
    const auto res = std::to_chars(vbuf, vbuf + sizeof(vbuf), v, std::chars_format::fixed, 2);
    svg += "<text x=\"" + coord(left - 8) + "\" y=\"" + coord(y + 4) +
           "\" font-size=\"12\" text-anchor=\"end\">" + std::string(vbuf, res.ptr) + "</text>\n";
  }
  svg += "<text x=\"" + coord((left + right) / 2) + "\" y=\"" + coord(height - 12) +
         "\" font-size=\"13\" text-anchor=\"middle\">" + x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + coord((top + bottom) / 2) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         coord((top + bottom) / 2) + ")\">" + metric + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];

    if (!eq_metric) {
      // +-1 sd band over contiguous plotted stretches.
      std::string band;
      std::vector<const PointStat*> run;
      auto flush = [&]() {
        if (run.size() >= 2) {
          band += "<polygon fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
          for (const auto* pt : run) {
            band += coord(x_pos(pt->x)) + "," + coord(y_pos(std::min(pt->mean + pt->spread, y_max * 1.05))) + " ";
          }
          for (auto it = run.rbegin(); it != run.rend(); ++it) {
            band += coord(x_pos((*it)->x)) + "," + coord(y_pos(std::max(0.0, (*it)->mean - (*it)->spread))) + " ";
          }
          band += "\"/>\n";
        }
        run.clear();
      };
      for (const auto& pt : s.points) {
        if (pt.plotted) {
          run.push_back(&pt);
        } else {
          flush();
        }
      }
      flush();
      svg += band;
    }

    std::string line;
    bool open = false;
    for (const auto& pt : s.points) {
      if (!pt.plotted) {
        if (open) {
          line += "\"/>\n";
          open = false;
        }
        continue;
      }
      if (!open) {
        line += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"";
        open = true;
      }
      line += coord(x_pos(pt.x)) + "," + coord(y_pos(pt.mean)) + " ";
    }
    if (open) line += "\"/>\n";
    svg += line;

    for (const auto& pt : s.points) {
      if (!pt.plotted) continue;
      svg += "<circle cx=\"" + coord(x_pos(pt.x)) + "\" cy=\"" + coord(y_pos(pt.mean)) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
      if (eq_metric && pt.spread > 0.0) {
        svg += "<line x1=\"" + coord(x_pos(pt.x)) + "\" y1=\"" +
               coord(y_pos(std::max(0.0, pt.mean - pt.spread))) + "\" x2=\"" + coord(x_pos(pt.x)) +
               "\" y2=\"" + coord(y_pos(std::min(1.0, pt.mean + pt.spread))) + "\" stroke=\"" +
               color + "\" stroke-width=\"1.5\"/>\n";
      }
    }

    // Legend entry.
    const double ly = top + 18.0 * static_cast<double>(si);
    svg += "<line x1=\"" + coord(right + 12) + "\" y1=\"" + coord(ly) + "\" x2=\"" +
           coord(right + 36) + "\" y2=\"" + coord(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + coord(right + 42) + "\" y=\"" + coord(ly + 4) +
           "\" font-size=\"12\">" + s.label + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

void emit_svg_lines(const ResultsTable& table, const std::string& x_label,
                    const std::string& metric, const std::string& path) {
  const std::string svg = results_to_svg(table, x_label, metric);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << svg;
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace css
