#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "scgan/experiments/protocol.h"

namespace scgan::experiments {

// Report CSV: header
//   row,run,dev_uar,test_uar,synthetic_added,dev_confusion,test_confusion
// then one "run" row per run and "mean" and "sd" summary rows. Confusion
// matrices are flattened row-major with ';' separators.
void export_report(const EvalReport& report, const std::filesystem::path& path);
/// Runs and summary of a report CSV (the config is not stored in it).
EvalReport read_report(const std::filesystem::path& path);

// Sweep CSV: m,runs,dev_mean,dev_sd,test_mean,test_sd
void export_sweep(const std::vector<SweepPoint>& points, const std::filesystem::path& path);
std::vector<SweepPoint> read_sweep(const std::filesystem::path& path);

// Training trace CSV:
//   step,turn,network,generator_loss,discriminator_loss,generator_threshold,discriminator_threshold
void export_trace(const gan::TrainTrace& trace, const std::filesystem::path& path);

struct PlotPoint {
  double x = 0.0, y = 0.0, sd = 0.0;
};
struct PlotSeries {
  std::string name;
  std::vector<PlotPoint> points;
};
struct PlotOptions {
  std::string title;
  std::string x_label = "m (synthetic samples per class)";
  std::string y_label = "UAR";
  int width = 640, height = 420;
};

/// Standalone SVG line chart with axes, legend and SD error bars.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options = {});
void export_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path,
                 const PlotOptions& options = {});

struct Projection {
  std::vector<std::array<double, 2>> points;
  std::array<std::vector<double>, 2> axes;   // principal directions
  std::array<double, 2> singular_values{};
  std::vector<double> mean;
};

/// Rank-2 PCA of the rows (centred) via singular value decomposition.
Projection pca_2d(const std::vector<std::vector<double>>& rows);

}  // namespace scgan::experiments
