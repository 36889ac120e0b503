#include "tmcf/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tmcf/errors.hpp"

namespace tmcf {

static_assert(std::endian::native == std::endian::little, "model files are written in little-endian order");

namespace {

constexpr std::array<char, 8> kMagic = {'T', 'M', 'C', 'F', 'G', 'R', 'U', '\0'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T take(std::istream& in, const std::string& source) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw DataError(source + ": truncated model file");
  return v;
}

}  // namespace

void save_model(const std::filesystem::path& path, const ClusterModel& cm, const std::string& profile) {
  const GruModel& m = cm.model;
  nlohmann::json header = {{"input_size", m.input_size()},
                           {"hidden_size", m.hidden_size()},
                           {"output_size", m.output_size()},
                           {"parameter_count", m.parameters().size()},
                           {"cluster_id", cm.cluster_id},
                           {"flows", cm.flows},
                           {"seed", cm.report.seed},
                           {"profile", profile},
                           {"layout", "w_input,w_hidden,b_input,b_hidden,w_out,b_out;gates r,z,n;column-major"}};
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kModelFormatVersion);
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(m.parameters().data()),
            static_cast<std::streamsize>(m.parameters().size() * sizeof(double)));
  if (!out) throw DataError("short write to model file " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  const std::string source = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + source);

  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw DataError(source + ": not a model file");
  const auto version = take<std::uint32_t>(in, source);
  if (version != kModelFormatVersion) {
    throw DataError(source + ": unsupported model format version " + std::to_string(version));
  }
  const auto header_len = take<std::uint64_t>(in, source);
  if (header_len > (1u << 26)) throw DataError(source + ": implausible header length");
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) throw DataError(source + ": truncated header");

  LoadedModel lm;
  std::size_t count = 0;
  try {
    const auto h = nlohmann::json::parse(text);
    lm.model.model = GruModel(h.at("input_size").get<std::size_t>(), h.at("hidden_size").get<std::size_t>(),
                              h.at("output_size").get<std::size_t>());
    count = h.at("parameter_count").get<std::size_t>();
    lm.model.cluster_id = h.at("cluster_id").get<int>();
    lm.model.flows = h.at("flows").get<std::vector<std::size_t>>();
    lm.model.report.seed = h.at("seed").get<std::uint64_t>();
    lm.profile = h.at("profile").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(source + ": malformed model header: " + e.what());
  }
  auto& params = lm.model.model.parameters();
  if (count != static_cast<std::size_t>(params.size())) throw DataError(source + ": parameter count does not match shapes");
  if (lm.model.flows.size() != lm.model.model.input_size()) throw DataError(source + ": flow list does not match input size");
  if (!in.read(reinterpret_cast<char*>(params.data()), static_cast<std::streamsize>(count * sizeof(double)))) {
    throw DataError(source + ": truncated parameters");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError(source + ": trailing bytes after parameters");
  if (!lm.model.model.all_finite()) throw NumericalError(source + ": non-finite parameters");
  return lm;
}

}  // namespace tmcf
