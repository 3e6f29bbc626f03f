// Copyright 2026 The suscept-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace suscept::lab {
namespace {

constexpr double kWidth = 720, kHeight = 450;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo <= 0) {
      const double pad = lo == 0 ? 1 : 0.1 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

// 4-6 ticks at 1/2/5 multiples of a power of ten.
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" +
         num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" "
         "height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle",
                 const std::string& extra = "") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\"" +
         extra + ">" + xml_escape(s) + "</text>\n";
}

}  // namespace

std::string xml_escape(const std::string& s) {
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

std::string render_line_plot(const LinePlot& plot) {
  auto ty = [&](double v) { return plot.log_y ? (v > 0 ? std::log10(v) : NAN) : v; };
  Range xr, yr;
  for (const auto& s : plot.series)
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      xr.add(s.x[k]);
      const double e = k < s.error.size() ? s.error[k] : 0.0;
      yr.add(ty(s.y[k] - e));
      yr.add(ty(s.y[k] + e));
      yr.add(ty(s.y[k]));
    }
  for (const auto& m : plot.markers) xr.add(m.x);
  xr.settle();
  yr.settle();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << header(kWidth, kHeight);
  o << text(kLeft + pw / 2, 22, plot.title, "middle", " font-size=\"14\"");
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(xr.lo, xr.hi)) {
    o << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\""
      << num(px(t)) << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    o << text(px(t), kTop + ph + 18, num(t));
  }
  for (double t : ticks(yr.lo, yr.hi)) {
    o << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\""
      << num(kLeft) << "\" y2=\"" << num(py(t)) << "\" stroke=\"black\"/>\n";
    o << text(kLeft - 8, py(t) + 4, plot.log_y ? "1e" + num(t) : num(t), "end");
  }
  o << text(kLeft + pw / 2, kHeight - 15, plot.x_label);
  o << text(18, kTop + ph / 2, plot.y_label, "middle",
            " transform=\"rotate(-90 18 " + num(kTop + ph / 2) + ")\"");

  for (const auto& m : plot.markers) {
    o << "<line x1=\"" << num(px(m.x)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(m.x))
      << "\" y2=\"" << num(kTop + ph)
      << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    o << text(px(m.x) + 4, kTop + 14, m.label, "start", " fill=\"gray\"");
  }

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& ser = plot.series[s];
    const char* colour = kPalette[s % std::size(kPalette)];
    std::string path;
    bool pen_down = false;
    for (std::size_t k = 0; k < ser.x.size() && k < ser.y.size(); ++k) {
      const double y = ty(ser.y[k]);
      if (!std::isfinite(y) || !std::isfinite(ser.x[k])) {
        pen_down = false;
        continue;
      }
      path += (pen_down ? " L" : " M") + num(px(ser.x[k])) + "," + num(py(y));
      pen_down = true;
      o << "<circle cx=\"" << num(px(ser.x[k])) << "\" cy=\"" << num(py(y))
        << "\" r=\"2.5\" fill=\"" << colour << "\"/>\n";
      if (k < ser.error.size() && ser.error[k] > 0) {
        const double lo = ty(ser.y[k] - ser.error[k]), hi = ty(ser.y[k] + ser.error[k]);
        if (std::isfinite(lo) && std::isfinite(hi))
          o << "<line x1=\"" << num(px(ser.x[k])) << "\" y1=\"" << num(py(lo)) << "\" x2=\""
            << num(px(ser.x[k])) << "\" y2=\"" << num(py(hi)) << "\" stroke=\"" << colour
            << "\"/>\n";
      }
    }
    if (!path.empty())
      o << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << colour
        << "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 10 + 18 * static_cast<double>(s);
    o << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
      << num(kLeft + pw + 32) << "\" y2=\"" << num(ly) << "\" stroke=\"" << colour
      << "\" stroke-width=\"2\"/>\n";
    o << text(kLeft + pw + 38, ly + 4, ser.label, "start");
  }
  o << "</svg>\n";
  return o.str();
}

std::string render_heatmap(const Heatmap& map) {
  const auto R = map.values.rows(), C = map.values.cols();
  const double cell = std::clamp(480.0 / static_cast<double>(std::max<Eigen::Index>(C, 1)), 6.0, 48.0);
  const double left = 90, top = 50;
  const double w = left + cell * static_cast<double>(C) + 120;
  const double h = top + cell * static_cast<double>(R) + 60;
  double lo = 0, hi = 0;
  if (map.values.size() > 0 && map.values.allFinite()) {
    lo = map.values.minCoeff();
    hi = map.values.maxCoeff();
  }
  const bool diverging = lo < 0 && hi > 0;
  const double span = diverging ? std::max(-lo, hi) : (hi - lo > 0 ? hi - lo : 1.0);
  auto colour = [&](double v) {
    int r, g, b;
    if (diverging) {
      const double u = std::clamp(v / span, -1.0, 1.0);
      if (u >= 0) {
        r = 255, g = b = static_cast<int>(255 * (1 - u));
      } else {
        b = 255, r = g = static_cast<int>(255 * (1 + u));
      }
    } else {
      const double u = std::clamp((v - lo) / span, 0.0, 1.0);
      r = static_cast<int>(255 * (1 - 0.8 * u));
      g = static_cast<int>(255 * (1 - 0.6 * u));
      b = 255;
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };

  std::ostringstream o;
  o << header(w, h);
  o << text(w / 2, 24, map.title, "middle", " font-size=\"14\"");
  for (Eigen::Index i = 0; i < R; ++i) {
    if (i < static_cast<Eigen::Index>(map.row_labels.size()))
      o << text(left - 6, top + cell * (static_cast<double>(i) + 0.5) + 4,
                map.row_labels[static_cast<std::size_t>(i)], "end");
    for (Eigen::Index j = 0; j < C; ++j) {
      o << "<rect x=\"" << num(left + cell * static_cast<double>(j)) << "\" y=\""
        << num(top + cell * static_cast<double>(i)) << "\" width=\"" << num(cell)
        << "\" height=\"" << num(cell) << "\" fill=\"" << colour(map.values(i, j))
        << "\"><title>" << num(map.values(i, j)) << "</title></rect>\n";
    }
  }
  if (cell >= 14)
    for (Eigen::Index j = 0; j < C && j < static_cast<Eigen::Index>(map.column_labels.size()); ++j) {
      const double x = left + cell * (static_cast<double>(j) + 0.5);
      const double y = top + cell * static_cast<double>(R) + 12;
      o << text(x, y, map.column_labels[static_cast<std::size_t>(j)], "end",
                " transform=\"rotate(-60 " + num(x) + " " + num(y) + ")\"");
    }
  const double sx = left + cell * static_cast<double>(C) + 20;
  const double bar_lo = diverging ? -span : lo, bar_hi = diverging ? span : lo + span;
  for (int k = 0; k < 10; ++k) {
    const double v = bar_hi - (bar_hi - bar_lo) * (k + 0.5) / 10.0;
    o << "<rect x=\"" << num(sx) << "\" y=\"" << num(top + 16.0 * k)
      << "\" width=\"14\" height=\"16\" fill=\"" << colour(v) << "\"/>\n";
  }
  o << text(sx + 18, top + 10, num(bar_hi), "start");
  o << text(sx + 18, top + 160, num(bar_lo), "start");
  o << "</svg>\n";
  return o.str();
}

}  // namespace suscept::lab
