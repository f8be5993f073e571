#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "torrent/datagen.hpp"

namespace torrent {

// Instances persist as a file pair inside a directory:
//   meta.json — spec, seed, and content digests
//   data.csv  — header `index,x_1..x_p,y,b,eps,is_clean`, one row per sample,
//               floats at 17 significant digits (lossless round-trip)

struct LoadedInstance {
  InstanceSpec spec;
  RegressionInstance instance;
};

std::uint64_t fnv1a64(std::string_view bytes);

// 17-significant-digit shortest form, '.' decimal separator.
std::string format_double(double v);

std::string instance_csv(const RegressionInstance& inst);
std::uint64_t instance_digest(const RegressionInstance& inst);

void save_instance(const std::filesystem::path& dir, const InstanceSpec& spec,
                   const RegressionInstance& inst);
LoadedInstance load_instance(const std::filesystem::path& dir);

}  // namespace torrent
