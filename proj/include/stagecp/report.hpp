#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stagecp/csv_io.hpp"

namespace stagecp {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // non-finite values break the line
};

/// Minimal SVG line chart: axes, min/max tick labels, one polyline per series.
std::string render_svg(const std::string& title, const std::vector<Series>& series);

/// Plot kinds: width, coverage, ab, components, ratio. The last two need the
/// diagnostics file of an online SR run.
inline const std::vector<std::string> kPlotKinds{"width", "coverage", "ab", "components", "ratio"};

/// Renders the requested plots from results.csv (and diagnostics.csv when
/// present) in `dir`, writing <kind>.svg into `out_dir`. Kinds that lack
/// their input data are skipped. Throws IoError.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& dir,
                                               const std::filesystem::path& out_dir,
                                               const std::vector<std::string>& kinds,
                                               std::size_t sliding_window = 200);

/// Same as above from in-memory records; diagnostics CSV text may be empty.
std::vector<std::filesystem::path> emit_report(const std::vector<ResultRecord>& records,
                                               const std::string& diagnostics_csv_text,
                                               const std::filesystem::path& out_dir,
                                               const std::vector<std::string>& kinds,
                                               std::size_t sliding_window = 200);

}  // namespace stagecp
