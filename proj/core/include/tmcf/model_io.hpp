#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "tmcf/predict.hpp"

namespace tmcf {

/// On-disk model layout:
///   8 bytes  magic "TMCFGRU\0"
///   uint32   format version (little endian)
///   uint64   header length in bytes
///   header   UTF-8 JSON: sizes, parameter_count, cluster_id, flows, seed, profile
///   float64  parameters in GruModel::parameters() order (little endian)
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const std::filesystem::path& path, const ClusterModel& model, const std::string& profile);

struct LoadedModel {
  ClusterModel model;
  std::string profile;
};

/// Throws DataError on a wrong magic, unknown version or size mismatch.
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace tmcf
