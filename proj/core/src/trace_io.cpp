#include "tmcf/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <vector>

#include "tmcf/errors.hpp"

namespace fs = std::filesystem;

namespace tmcf {

TraceFormat parse_trace_format(std::string_view name) {
  if (name == "csv") return TraceFormat::Csv;
  if (name == "abilene") return TraceFormat::Abilene;
  if (name == "geant") return TraceFormat::Geant;
  throw ConfigError("unknown trace format '" + std::string(name) + "' (expected csv, abilene or geant)");
}

std::string_view to_string(TraceFormat format) {
  switch (format) {
    case TraceFormat::Csv:
      return "csv";
    case TraceFormat::Abilene:
      return "abilene";
    case TraceFormat::Geant:
      return "geant";
  }
  return "csv";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_missing(std::string_view cell) {
  if (cell.empty()) return true;
  std::string lower(cell);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower == "nan" || lower == "na";
}

// Parses one traffic value; missing cells become 0 when allowed.
double parse_value(std::string_view cell, const std::string& source, std::size_t line, const IngestOptions& opt) {
  cell = trim(cell);
  if (is_missing(cell)) {
    if (opt.zero_fill_missing) return 0.0;
    throw ParseError(source, line, "missing value");
  }
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw ParseError(source, line, "cannot parse '" + std::string(cell) + "' as a number");
  }
  if (!std::isfinite(v)) throw ParseError(source, line, "non-finite value");
  if (v < 0.0) throw DataError(source + ":" + std::to_string(line) + ": negative traffic value " + std::string(cell));
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::size_t exact_sqrt(std::size_t m) {
  auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m))));
  return n * n == m ? n : 0;
}

}  // namespace

TmSeries read_canonical_csv(std::istream& in, const std::string& source, const IngestOptions& options) {
  std::uint32_t interval = options.interval_seconds;
  std::string line;
  std::size_t line_no = 0;
  std::size_t n_flows = 0;
  bool have_header = false;
  std::vector<double> values;
  std::vector<std::int64_t> timestamps;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      constexpr std::string_view key = "interval_seconds=";
      const auto pos = view.find(key);
      if (pos != std::string_view::npos) {
        const auto num = trim(view.substr(pos + key.size()));
        std::uint32_t parsed = 0;
        const auto res = std::from_chars(num.data(), num.data() + num.size(), parsed);
        if (res.ec != std::errc() || parsed == 0) throw ParseError(source, line_no, "bad interval_seconds directive");
        interval = parsed;
      }
      continue;
    }
    const auto fields = split_fields(view, ',');
    if (!have_header) {
      if (trim(fields.front()) != "t") throw ParseError(source, line_no, "header must start with 't'");
      n_flows = fields.size() - 1;
      for (std::size_t m = 0; m < n_flows; ++m) {
        if (trim(fields[m + 1]) != "f" + std::to_string(m)) {
          throw ParseError(source, line_no, "expected column f" + std::to_string(m));
        }
      }
      if (n_flows == 0 || exact_sqrt(n_flows) == 0) {
        throw ParseError(source, line_no, "flow column count " + std::to_string(n_flows) + " is not a perfect square");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != n_flows + 1) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(n_flows + 1) + " fields, found " + std::to_string(fields.size()));
    }
    const auto t_cell = trim(fields.front());
    std::int64_t t = 0;
    const auto res = std::from_chars(t_cell.data(), t_cell.data() + t_cell.size(), t);
    if (res.ec != std::errc() || res.ptr != t_cell.data() + t_cell.size()) {
      throw ParseError(source, line_no, "cannot parse time index '" + std::string(t_cell) + "'");
    }
    timestamps.push_back(t);
    for (std::size_t m = 0; m < n_flows; ++m) values.push_back(parse_value(fields[m + 1], source, line_no, options));
  }
  if (!have_header) throw ParseError(source, line_no, "missing header");

  TmSeries tm(exact_sqrt(n_flows), interval, std::move(values));
  tm.timestamps() = std::move(timestamps);
  tm.validate();
  return tm;
}

void write_canonical_csv(std::ostream& out, const TmSeries& tm) {
  out << "# interval_seconds=" << tm.interval_seconds() << '\n';
  out << 't';
  for (std::size_t m = 0; m < tm.flow_count(); ++m) out << ",f" << m;
  out << '\n';
  for (std::size_t t = 0; t < tm.steps(); ++t) {
    out << (tm.timestamps().empty() ? static_cast<std::int64_t>(t) : tm.timestamps()[t]);
    for (const double v : tm.step(t)) out << ',' << format_double(v);
    out << '\n';
  }
}

namespace {

std::vector<fs::path> list_files(const fs::path& path, const std::regex& pattern) {
  if (fs::is_regular_file(path)) return {path};
  if (!fs::is_directory(path)) throw DataError("trace path does not exist: " + path.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), pattern)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no trace files found under " + path.string());
  return files;
}

}  // namespace

TmSeries read_abilene(const fs::path& path, const IngestOptions& options) {
  constexpr std::size_t kNodes = 12;
  constexpr std::size_t kFlows = kNodes * kNodes;
  const std::size_t width = kFlows * options.abilene_columns_per_flow;
  std::vector<double> values;

  for (const auto& file : list_files(path, std::regex(R"(X\d+(\.txt)?)"))) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto fields = split_whitespace(line);
      if (fields.empty()) continue;
      if (fields.size() != width) {
        throw ParseError(file.string(), line_no,
                         "expected " + std::to_string(width) + " columns, found " + std::to_string(fields.size()));
      }
      for (std::size_t m = 0; m < kFlows; ++m) {
        const double v = parse_value(fields[m * options.abilene_columns_per_flow], file.string(), line_no, options);
        values.push_back(v * options.abilene_unit_bytes);
      }
    }
  }
  TmSeries tm(kNodes, 300, std::move(values));
  tm.validate();
  return tm;
}

TmSeries read_geant(const fs::path& path, const IngestOptions& options) {
  constexpr std::size_t kNodes = 23;
  const std::regex src_re(R"re(<src\s+id\s*=\s*"(\d+)"\s*>)re");
  const std::regex dst_re(R"re(<dst\s+id\s*=\s*"(\d+)"\s*>\s*([^<]*)</dst>)re");
  std::vector<double> values;

  for (const auto& file : list_files(path, std::regex(R"(.*\.xml)"))) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    std::vector<double> step(kNodes * kNodes, 0.0);
    std::string line;
    std::size_t line_no = 0;
    std::size_t src = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::smatch match;
      auto begin = line.cbegin();
      // A line may carry the <src> opener and any number of <dst> entries.
      if (std::regex_search(line, match, src_re)) {
        src = std::stoul(match[1].str());
        if (src == 0 || src > kNodes) throw DataError(file.string() + ":" + std::to_string(line_no) + ": bad src id");
        begin = match.suffix().first;
      }
      for (std::sregex_iterator it(begin, line.cend(), dst_re), end; it != end; ++it) {
        if (src == 0) throw ParseError(file.string(), line_no, "<dst> outside of <src>");
        const std::size_t dst = std::stoul((*it)[1].str());
        if (dst == 0 || dst > kNodes) throw DataError(file.string() + ":" + std::to_string(line_no) + ": bad dst id");
        const double v = parse_value((*it)[2].str(), file.string(), line_no, options);
        step[(src - 1) * kNodes + (dst - 1)] = v * options.geant_value_to_bytes;
      }
    }
    values.insert(values.end(), step.begin(), step.end());
  }
  TmSeries tm(kNodes, 900, std::move(values));
  tm.validate();
  return tm;
}

TmSeries load_tm_series(const fs::path& path, TraceFormat format, const IngestOptions& options) {
  switch (format) {
    case TraceFormat::Csv: {
      std::ifstream in(path);
      if (!in) throw DataError("cannot open trace " + path.string());
      return read_canonical_csv(in, path.string(), options);
    }
    case TraceFormat::Abilene:
      return read_abilene(path, options);
    case TraceFormat::Geant:
      return read_geant(path, options);
  }
  throw ConfigError("unsupported trace format");
}

}  // namespace tmcf
