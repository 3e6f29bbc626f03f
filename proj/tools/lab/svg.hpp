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

// Minimal SVG renderings: line plots with optional error bars and vertical
// markers, and labelled heatmaps. Output is deterministic text.

#ifndef SUSCEPT_LAB_SVG_HPP_
#define SUSCEPT_LAB_SVG_HPP_

#include <string>
#include <vector>

#include "suscept/types.hpp"

namespace suscept::lab {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> error;  // empty or one half-width per point
};

struct Marker {
  double x = 0.0;
  std::string label;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Marker> markers;  // dashed vertical lines
  bool log_y = false;
};

std::string render_line_plot(const LinePlot& plot);

struct Heatmap {
  std::string title;
  Matrix values;
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
};

// Diverging palette centred on zero when the data change sign.
std::string render_heatmap(const Heatmap& map);

std::string xml_escape(const std::string& text);

}  // namespace suscept::lab

#endif  // SUSCEPT_LAB_SVG_HPP_
