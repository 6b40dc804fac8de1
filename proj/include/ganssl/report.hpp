#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ganssl/grid.hpp"

namespace ganssl {

struct PlotSeries {
  enum class Kind { line, points, crosses };
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  Kind kind = Kind::line;
  std::string color = "#1f6fb5";
};

struct PlotStyle {
  int width = 800;
  int height = 560;
  std::string title;
  std::string x_label;
  std::string y_label;
};

// Standalone SVG with axes, ticks and a legend; byte-deterministic for
// identical inputs. Throws on an empty series list.
void emit_svg_plot(const std::vector<PlotSeries>& series, const PlotStyle& style,
                   const std::filesystem::path& path);

// Delegates to the grid CSV format (distributions interface).
void emit_density_csv(const GridDensity& density, const std::filesystem::path& path);

// step,objective,tv_or_acc rows.
void write_history_csv(std::span<const double> objective,
                       std::span<const double> metric,
                       const std::filesystem::path& path);

void write_text_file(const std::string& content, const std::filesystem::path& path);

}  // namespace ganssl
