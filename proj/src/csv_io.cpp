#include "stagecp/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace stagecp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_cell(std::string_view cell, std::size_t line, std::string_view column) {
  try {
    return parse_double(cell);
  } catch (const Error&) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column '" +
                                           std::string(column) + "': cannot parse '" +
                                           std::string(cell) + "' as a number");
  }
}

std::int64_t parse_int_cell(std::string_view cell, std::size_t line, std::string_view column) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column '" +
                                           std::string(column) + "': cannot parse '" +
                                           std::string(cell) + "' as an integer");
  }
  return v;
}

bool parse_bool_cell(std::string_view cell, std::size_t line, std::string_view column) {
  if (cell == "1" || cell == "true") return true;
  if (cell == "0" || cell == "false") return false;
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column '" +
                                         std::string(column) + "': expected 0 or 1");
}

// Column name -> index, from the header line.
std::map<std::string, std::size_t, std::less<>> header_index(std::string_view header) {
  std::map<std::string, std::size_t, std::less<>> idx;
  const auto fields = split_fields(header);
  for (std::size_t i = 0; i < fields.size(); ++i) idx.emplace(std::string(trim(fields[i])), i);
  return idx;
}

std::size_t require(const std::map<std::string, std::size_t, std::less<>>& idx,
                    std::string_view name) {
  const auto it = idx.find(name);
  if (it == idx.end()) throw Error(ErrorKind::SchemaError, std::string(name));
  return it->second;
}

// Indices of name_0, name_1, ... until a gap.
std::vector<std::size_t> indexed_columns(const std::map<std::string, std::size_t, std::less<>>& idx,
                                         const std::string& prefix) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0;; ++j) {
    const auto it = idx.find(prefix + std::to_string(j));
    if (it == idx.end()) break;
    out.push_back(it->second);
  }
  if (out.empty()) throw Error(ErrorKind::SchemaError, prefix + "0");
  return out;
}

}  // namespace

std::optional<CsvSchema> parse_schema(std::string_view name) {
  if (name == "RAW_TRIPLETS") return CsvSchema::RAW_TRIPLETS;
  if (name == "PRECOMPUTED") return CsvSchema::PRECOMPUTED;
  return std::nullopt;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::ParseError, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

IngestedData parse_csv(std::istream& in, CsvSchema schema) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::SchemaError, "missing header");
  const auto idx = header_index(line);

  IngestedData data;
  data.schema = schema;
  const std::size_t t_col = require(idx, "t");
  const std::size_t y_col = require(idx, "y");
  std::vector<std::size_t> w_cols, x_cols;
  std::size_t mu2_x_col = 0, mu2_xhat_col = 0;
  if (schema == CsvSchema::RAW_TRIPLETS) {
    w_cols = indexed_columns(idx, "w_");
    x_cols = indexed_columns(idx, "x_");
  } else {
    mu2_x_col = require(idx, "mu2_x");
    mu2_xhat_col = require(idx, "mu2_xhat");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != idx.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(idx.size()) + " fields, got " +
                                             std::to_string(f.size()));
    }
    const auto t = parse_int_cell(f[t_col], line_no, "t");
    const double y = parse_cell(f[y_col], line_no, "y");
    if (schema == CsvSchema::RAW_TRIPLETS) {
      TripletPoint p;
      p.t = t;
      p.y = y;
      for (auto c : w_cols) p.w.push_back(parse_cell(f[c], line_no, "w"));
      for (auto c : x_cols) p.x.push_back(parse_cell(f[c], line_no, "x"));
      data.points.push_back(std::move(p));
    } else {
      data.outputs.push_back({t, y, parse_cell(f[mu2_x_col], line_no, "mu2_x"),
                              parse_cell(f[mu2_xhat_col], line_no, "mu2_xhat")});
    }
  }
  return data;
}

IngestedData ingest_csv(const std::filesystem::path& path, CsvSchema schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return parse_csv(in, schema);
}

void write_raw_csv(std::ostream& out, const std::vector<TripletPoint>& points) {
  const std::size_t p = points.empty() ? 1 : points.front().w.size();
  const std::size_t q = points.empty() ? 1 : points.front().x.size();
  out << "t";
  for (std::size_t j = 0; j < p; ++j) out << ",w_" << j;
  for (std::size_t j = 0; j < q; ++j) out << ",x_" << j;
  out << ",y\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    out << pt.t.value_or(static_cast<std::int64_t>(i));
    for (double v : pt.w) out << ',' << format_double(v);
    for (double v : pt.x) out << ',' << format_double(v);
    out << ',' << format_double(pt.y) << '\n';
  }
}

void write_precomputed_csv(std::ostream& out, const std::vector<StageOutputs>& outputs) {
  out << "t,y,mu2_x,mu2_xhat\n";
  for (const auto& o : outputs) {
    out << o.t << ',' << format_double(o.y) << ',' << format_double(o.mu2_x) << ','
        << format_double(o.mu2_xhat) << '\n';
  }
}

void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << kResultsHeader << '\n';
  for (const auto& r : records) {
    out << r.t << ',' << r.method << ',' << format_double(r.lo) << ',' << format_double(r.hi)
        << ',' << (r.covered ? 1 : 0) << ',' << format_double(r.width) << ','
        << format_double(r.a) << ',' << format_double(r.b) << ',' << format_double(r.c) << ','
        << format_double(r.d) << ',' << format_double(r.alpha_t) << ','
        << (r.abstained ? 1 : 0) << '\n';
  }
}

std::vector<ResultRecord> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::SchemaError, "missing header");
  const auto idx = header_index(line);
  static constexpr const char* kCols[] = {"t", "method", "lo", "hi", "covered", "width",
                                          "a", "b",      "c",  "d",  "alpha_t", "abstained"};
  std::size_t col[12];
  for (std::size_t i = 0; i < 12; ++i) col[i] = require(idx, kCols[i]);

  std::vector<ResultRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != idx.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": wrong field count");
    }
    ResultRecord r;
    r.t = parse_int_cell(f[col[0]], line_no, "t");
    r.method = std::string(f[col[1]]);
    r.lo = parse_cell(f[col[2]], line_no, "lo");
    r.hi = parse_cell(f[col[3]], line_no, "hi");
    r.covered = parse_bool_cell(f[col[4]], line_no, "covered");
    r.width = parse_cell(f[col[5]], line_no, "width");
    r.a = parse_cell(f[col[6]], line_no, "a");
    r.b = parse_cell(f[col[7]], line_no, "b");
    r.c = parse_cell(f[col[8]], line_no, "c");
    r.d = parse_cell(f[col[9]], line_no, "d");
    r.alpha_t = parse_cell(f[col[10]], line_no, "alpha_t");
    r.abstained = parse_bool_cell(f[col[11]], line_no, "abstained");
    out.push_back(std::move(r));
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace stagecp
