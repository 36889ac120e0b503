#include "tmcf/artifacts.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tmcf/errors.hpp"
#include "tmcf/trace_io.hpp"

namespace tmcf {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string hash_file(const fs::path& path) { return hex64(fnv1a64(read_text(path))); }

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("short write to " + path.string());
  }
  fs::rename(tmp, path);
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().remove_suffix(1);
  return out;
}

template <typename T>
T parse_number(std::string_view cell, const std::string& source, std::size_t line) {
  T v{};
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw ParseError(source, line, "cannot parse '" + std::string(cell) + "' as a number");
  }
  return v;
}

// Data rows of a CSV file with the header (if any) checked against `header`.
std::vector<std::vector<std::string_view>> rows_of(const std::string& text, const std::string& source,
                                                   std::string_view header, std::vector<std::size_t>* line_numbers) {
  std::vector<std::vector<std::string_view>> rows;
  std::string_view rest(text);
  std::size_t line_no = 0;
  bool header_seen = header.empty();
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != header) throw ParseError(source, line_no, "expected header '" + std::string(header) + "'");
      header_seen = true;
      continue;
    }
    rows.push_back(split(line));
    if (line_numbers) line_numbers->push_back(line_no);
  }
  return rows;
}

}  // namespace

std::string partition_to_json(const Partition& p) {
  json j = {{"labels", p.labels}, {"k", p.k}, {"method", p.method}};
  if (p.seed) j["seed"] = *p.seed;
  return j.dump() + "\n";
}

Partition partition_from_json(const std::string& text, const std::string& source) {
  Partition p;
  try {
    const json j = json::parse(text);
    p.labels = j.at("labels").get<std::vector<int>>();
    p.k = j.at("k").get<int>();
    p.method = j.value("method", std::string("unknown"));
    if (j.contains("seed") && !j["seed"].is_null()) p.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw DataError(source + ": malformed partition JSON: " + e.what());
  }
  p.validate();
  return p;
}

void write_partition(const fs::path& path, const Partition& p) { write_text(path, partition_to_json(p)); }

Partition read_partition(const fs::path& path) { return partition_from_json(read_text(path), path.string()); }

void write_dendrogram_csv(const fs::path& path, const Dendrogram& d) {
  std::ostringstream out;
  out << "# leaves=" << d.leaves << " linkage=" << to_string(d.linkage) << "\n";
  out << "step,a,b,height,size\n";
  for (std::size_t s = 0; s < d.merges.size(); ++s) {
    const Merge& m = d.merges[s];
    out << s << ',' << m.a << ',' << m.b << ',' << format_double(m.height) << ',' << m.size << '\n';
  }
  write_text(path, out.str());
}

Dendrogram read_dendrogram_csv(const fs::path& path, Linkage linkage) {
  const std::string text = read_text(path);
  std::vector<std::size_t> lines;
  const auto rows = rows_of(text, path.string(), "step,a,b,height,size", &lines);
  Dendrogram d;
  d.linkage = linkage;
  d.leaves = rows.size() + 1;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 5) throw ParseError(path.string(), lines[r], "expected 5 columns");
    Merge m;
    m.a = parse_number<std::size_t>(row[1], path.string(), lines[r]);
    m.b = parse_number<std::size_t>(row[2], path.string(), lines[r]);
    m.height = parse_number<double>(row[3], path.string(), lines[r]);
    m.size = parse_number<std::size_t>(row[4], path.string(), lines[r]);
    d.merges.push_back(m);
  }
  return d;
}

void write_dissimilarity_csv(const fs::path& path, const DissimilarityMatrix& d) {
  std::ostringstream out;
  out << "# metric=" << to_string(d.metric()) << "\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (j) out << ',';
      out << format_double(d(i, j));
    }
    out << '\n';
  }
  write_text(path, out.str());
}

DissimilarityMatrix read_dissimilarity_csv(const fs::path& path, std::optional<Metric> fallback) {
  const std::string text = read_text(path);
  std::optional<Metric> metric = fallback;
  constexpr std::string_view kTag = "# metric=";
  if (text.starts_with(kTag)) {
    const auto end = text.find_first_of("\r\n");
    metric = parse_metric(std::string_view(text).substr(kTag.size(), end - kTag.size()));
  }
  std::vector<std::size_t> lines;
  const auto rows = rows_of(text, path.string(), {}, &lines);
  const std::size_t n = rows.size();
  if (n == 0) throw DataError(path.string() + ": empty dissimilarity matrix");
  std::vector<double> values;
  values.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) {
      throw ParseError(path.string(), lines[r], "expected " + std::to_string(n) + " columns, got " +
                                                    std::to_string(rows[r].size()));
    }
    for (const auto cell : rows[r]) values.push_back(parse_number<double>(cell, path.string(), lines[r]));
  }
  DissimilarityMatrix d(n, metric.value_or(Metric::Euclidean), std::move(values));
  d.validate();
  return d;
}

void write_features_csv(const fs::path& path, const ReprMatrix& r) {
  std::ostringstream out;
  out << "flow";
  for (const double a : r.axis) out << ',' << format_double(a);
  out << '\n';
  for (std::size_t m = 0; m < r.size(); ++m) {
    out << m;
    for (const double v : r.features[m]) out << ',' << format_double(v);
    out << '\n';
  }
  write_text(path, out.str());
}

ReprMatrix read_features_csv(const fs::path& path, Representation kind) {
  const std::string text = read_text(path);
  std::vector<std::size_t> lines;
  auto rows = rows_of(text, path.string(), {}, &lines);
  if (rows.empty() || rows.front().empty() || rows.front()[0] != "flow") {
    throw ParseError(path.string(), 1, "expected a header starting with 'flow'");
  }
  ReprMatrix r;
  r.kind = kind;
  for (std::size_t c = 1; c < rows[0].size(); ++c) r.axis.push_back(parse_number<double>(rows[0][c], path.string(), lines[0]));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ParseError(path.string(), lines[i], "column count differs from header");
    std::vector<double> f;
    for (std::size_t c = 1; c < rows[i].size(); ++c) f.push_back(parse_number<double>(rows[i][c], path.string(), lines[i]));
    r.features.push_back(std::move(f));
  }
  r.degenerate.assign(r.features.size(), false);
  return r;
}

void write_sweep_csv(const fs::path& path, const SweepCurve& c) {
  std::ostringstream out;
  out << "k,mean_rmse,rmse_std,mean_runtime_s\n";
  for (std::size_t i = 0; i < c.k_values.size(); ++i) {
    out << c.k_values[i] << ',' << format_double(c.mean_rmse[i]) << ',' << format_double(c.rmse_std[i]) << ','
        << format_double(c.mean_runtime_seconds[i]) << '\n';
  }
  write_text(path, out.str());
}

SweepCurve read_sweep_csv(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<std::size_t> lines;
  const auto rows = rows_of(text, path.string(), "k,mean_rmse,rmse_std,mean_runtime_s", &lines);
  SweepCurve c;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 4) throw ParseError(path.string(), lines[r], "expected 4 columns");
    c.k_values.push_back(parse_number<std::size_t>(rows[r][0], path.string(), lines[r]));
    c.mean_rmse.push_back(parse_number<double>(rows[r][1], path.string(), lines[r]));
    c.rmse_std.push_back(parse_number<double>(rows[r][2], path.string(), lines[r]));
    c.mean_runtime_seconds.push_back(parse_number<double>(rows[r][3], path.string(), lines[r]));
  }
  return c;
}

void write_per_flow_csv(const fs::path& path, std::size_t n_nodes, const std::vector<double>& normalized,
                        const std::vector<double>& mbps) {
  if (normalized.size() != mbps.size() || normalized.size() != n_nodes * n_nodes) {
    throw DataError("per-flow error vectors do not match N^2");
  }
  std::ostringstream out;
  out << "flow,src,dst,rmse_normalized,rmse_mbps\n";
  for (std::size_t m = 0; m < normalized.size(); ++m) {
    out << m << ',' << m / n_nodes << ',' << m % n_nodes << ',' << format_double(normalized[m]) << ','
        << format_double(mbps[m]) << '\n';
  }
  write_text(path, out.str());
}

std::vector<double> read_per_flow_csv(const fs::path& path, std::string_view column) {
  std::size_t col = 0;
  if (column == "rmse_normalized") {
    col = 3;
  } else if (column == "rmse_mbps") {
    col = 4;
  } else {
    throw ConfigError("unknown per-flow column '" + std::string(column) + "'");
  }
  const std::string text = read_text(path);
  std::vector<std::size_t> lines;
  const auto rows = rows_of(text, path.string(), "flow,src,dst,rmse_normalized,rmse_mbps", &lines);
  std::vector<double> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 5) throw ParseError(path.string(), lines[r], "expected 5 columns");
    out.push_back(parse_number<double>(rows[r][col], path.string(), lines[r]));
  }
  return out;
}

std::string train_report_json(const std::vector<ClusterModel>& models, bool include_wall_time) {
  json clusters = json::array();
  for (const auto& cm : models) {
    const TrainReport& r = cm.report;
    json c = {{"cluster", cm.cluster_id},
              {"flows", cm.flows},
              {"input_size", cm.model.input_size()},
              {"hidden_size", cm.model.hidden_size()},
              {"epochs_run", r.epochs_run},
              {"train_loss", r.train_loss},
              {"val_loss", r.val_loss},
              {"stopped_early", r.stopped_early},
              {"best_epoch", r.best_epoch},
              {"best_val_loss", r.best_val_loss},
              {"seed", r.seed},
              {"init", r.init}};
    if (include_wall_time) c["wall_time_seconds"] = r.wall_time_seconds;
    clusters.push_back(std::move(c));
  }
  return json{{"clusters", clusters}}.dump(2) + "\n";
}

}  // namespace tmcf
