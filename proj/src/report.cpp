#include "stagecp/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "stagecp/experiment.hpp"
#include "stagecp/quantiles.hpp"

namespace stagecp {

namespace {

constexpr double kW = 800, kH = 420, kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Column name -> values from a generic numeric CSV.
std::map<std::string, std::vector<double>> read_columns(const std::string& text) {
  std::map<std::string, std::vector<double>> cols;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return cols;
  std::vector<std::string> names;
  for (auto f : split_fields(line)) names.emplace_back(f);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    for (std::size_t i = 0; i < names.size() && i < f.size(); ++i) {
      cols[names[i]].push_back(parse_double(f[i]));
    }
  }
  return cols;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string render_svg(const std::string& title, const std::vector<Series>& series) {
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1;
  if (!(ymin <= ymax)) ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"" << kTop + ph + 18 << "\">" << fmt(xmin) << "</text>\n";
  svg << "<text x=\"" << kLeft + pw << "\" y=\"" << kTop + ph + 18
      << "\" text-anchor=\"end\">" << fmt(xmax) << "</text>\n";
  svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + ph << "\" text-anchor=\"end\">"
      << fmt(ymin) << "</text>\n";
  svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 10 << "\" text-anchor=\"end\">"
      << fmt(ymax) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\""
            << points << "\"/>\n";
        points.clear();
      }
    };
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      points += fmt(px(s.x[i])) + "," + fmt(py(s.y[i])) + " ";
    }
    flush();
    const double ly = kTop + 16 + 18 * static_cast<double>(si);
    svg << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kW - kRight + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kW - kRight + 38 << "\" y=\"" << ly << "\">" << escape(s.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> emit_report(const std::vector<ResultRecord>& records,
                                               const std::string& diagnostics_text,
                                               const std::filesystem::path& out_dir,
                                               const std::vector<std::string>& kinds,
                                               std::size_t sliding_window) {
  if (records.empty()) throw Error(ErrorKind::InvalidArgument, "no records to plot");
  // Records grouped by method, in first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ResultRecord*>> by_method;
  for (const auto& r : records) {
    if (!by_method.count(r.method)) order.push_back(r.method);
    by_method[r.method].push_back(&r);
  }
  const auto diag = read_columns(diagnostics_text);

  std::vector<std::filesystem::path> written;
  for (const auto& kind : kinds) {
    std::vector<Series> series;
    std::string title;
    if (kind == "width") {
      title = "Interval width";
      for (const auto& m : order) {
        Series s{m, {}, {}};
        for (const auto* r : by_method[m]) {
          s.x.push_back(static_cast<double>(r->t));
          s.y.push_back(r->width);
        }
        series.push_back(std::move(s));
      }
    } else if (kind == "coverage") {
      title = "Sliding-window coverage (" + std::to_string(sliding_window) + ")";
      for (const auto& m : order) {
        std::vector<std::uint8_t> cov;
        for (const auto* r : by_method[m]) cov.push_back(r->covered ? 1 : 0);
        const auto sl = sliding_coverage(cov, sliding_window);
        const std::size_t offset = cov.size() >= sliding_window ? sliding_window - 1 : cov.size() - 1;
        Series s{m, {}, sl};
        for (std::size_t i = 0; i < sl.size(); ++i) {
          s.x.push_back(static_cast<double>(by_method[m][i + offset]->t));
        }
        series.push_back(std::move(s));
      }
    } else if (kind == "ab") {
      title = "Scaling coefficients";
      for (const auto& m : order) {
        if (m.rfind("SR", 0) != 0) continue;
        Series a{m + " a", {}, {}}, b{m + " b", {}, {}};
        for (const auto* r : by_method[m]) {
          a.x.push_back(static_cast<double>(r->t));
          a.y.push_back(r->a);
          b.x.push_back(static_cast<double>(r->t));
          b.y.push_back(r->b);
        }
        series.push_back(std::move(a));
        series.push_back(std::move(b));
      }
    } else if (kind == "components" || kind == "ratio") {
      if (diag.empty()) continue;
      const auto& t = diag.at("t");
      const auto& dr1 = diag.at("mean_dr1");
      const auto& r2 = diag.at("mean_r2");
      if (kind == "components") {
        title = "Window means of the residual components";
        series.push_back({"mean dR1", t, dr1});
        series.push_back({"mean R2", t, r2});
      } else {
        title = "Ratio of total residual to each component";
        const auto& total = diag.at("mean_total");
        Series a{"R / dR1", t, {}}, b{"R / R2", t, {}};
        for (std::size_t i = 0; i < t.size(); ++i) {
          a.y.push_back(dr1[i] > 0 ? total[i] / dr1[i] : kInf);
          b.y.push_back(r2[i] > 0 ? total[i] / r2[i] : kInf);
        }
        series.push_back(std::move(a));
        series.push_back(std::move(b));
      }
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown plot kind '" + kind + "'");
    }
    if (series.empty()) continue;
    const auto path = out_dir / (kind + ".svg");
    write_file(path, render_svg(title, series));
    written.push_back(path);
  }
  return written;
}

std::vector<std::filesystem::path> emit_report(const std::filesystem::path& dir,
                                               const std::filesystem::path& out_dir,
                                               const std::vector<std::string>& kinds,
                                               std::size_t sliding_window) {
  std::ifstream in(dir / "results.csv");
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + (dir / "results.csv").string());
  const auto records = read_results_csv(in);
  return emit_report(records, read_text(dir / "diagnostics.csv"), out_dir, kinds, sliding_window);
}

}  // namespace stagecp
