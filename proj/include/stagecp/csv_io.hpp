#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stagecp/core_types.hpp"

namespace stagecp {

enum class CsvSchema { RAW_TRIPLETS, PRECOMPUTED };

std::optional<CsvSchema> parse_schema(std::string_view name);

struct IngestedData {
  CsvSchema schema = CsvSchema::RAW_TRIPLETS;
  std::vector<TripletPoint> points;   // RAW_TRIPLETS
  std::vector<StageOutputs> outputs;  // PRECOMPUTED
};

/// RAW_TRIPLETS header: t, w_0..w_{p-1}, x_0..x_{q-1}, y (any column order).
/// PRECOMPUTED header: t, y, mu2_x, mu2_xhat.
/// Throws SchemaError naming the missing column, ParseError with the line
/// number on malformed rows.
IngestedData parse_csv(std::istream& in, CsvSchema schema);
IngestedData ingest_csv(const std::filesystem::path& path, CsvSchema schema);

void write_raw_csv(std::ostream& out, const std::vector<TripletPoint>& points);
void write_precomputed_csv(std::ostream& out, const std::vector<StageOutputs>& outputs);

/// One row of the results file.
struct ResultRecord {
  std::int64_t t = 0;
  std::string method;
  double lo = 0.0;
  double hi = 0.0;
  bool covered = false;
  double width = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double alpha_t = 0.0;
  bool abstained = false;
  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

inline constexpr std::string_view kResultsHeader =
    "t,method,lo,hi,covered,width,a,b,c,d,alpha_t,abstained";

void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> read_results_csv(std::istream& in);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Splits a CSV line on commas (no quoting; all fields are numeric or
/// method tags).
std::vector<std::string_view> split_fields(std::string_view line);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace stagecp
