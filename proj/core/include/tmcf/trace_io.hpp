#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "tmcf/dataset.hpp"

namespace tmcf {

enum class TraceFormat { Csv, Abilene, Geant };

TraceFormat parse_trace_format(std::string_view name);
std::string_view to_string(TraceFormat format);

struct IngestOptions {
  /// Replace empty / "nan" / "na" cells by 0 instead of rejecting them.
  bool zero_fill_missing = false;
  /// Sampling period for canonical CSV traces that do not carry an
  /// `# interval_seconds=` directive.
  std::uint32_t interval_seconds = 300;
  /// Abilene archive: values are in units of 100 bytes per 5 minutes and each
  /// OD pair occupies 5 consecutive columns (real, then four estimates).
  double abilene_unit_bytes = 100.0;
  std::size_t abilene_columns_per_flow = 5;
  /// GEANT archive: multiplier converting one XML value into bytes per
  /// interval. Default treats values as kbit/s over a 900 s interval.
  double geant_value_to_bytes = 1000.0 / 8.0 * 900.0;
};

/// Loads a trace in any supported layout and validates it.
TmSeries load_tm_series(const std::filesystem::path& path, TraceFormat format, const IngestOptions& options = {});

/// Canonical layout: optional `# interval_seconds=S` line, header
/// `t,f0,...,f{M-1}`, one row per interval.
TmSeries read_canonical_csv(std::istream& in, const std::string& source_name, const IngestOptions& options = {});
void write_canonical_csv(std::ostream& out, const TmSeries& tm);

TmSeries read_abilene(const std::filesystem::path& path, const IngestOptions& options = {});
TmSeries read_geant(const std::filesystem::path& path, const IngestOptions& options = {});

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace tmcf
