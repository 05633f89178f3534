#pragma once

#include <filesystem>

#include "hpc/ad/nn.hpp"

namespace hpc::ad {

// Versioned little-endian parameter file. Layout:
//   magic "HPCPARMS" | u32 version | string kind | u32 count |
//   per entry: string name | u32 ndim | u64 dim... | f64 values (row-major)
// No timestamps or hostnames: equal parameters give equal bytes.
inline constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const ParamStore& params,
                     const std::string& kind);

struct LoadedCheckpoint {
  std::string kind;
  std::vector<std::pair<std::string, Tensor>> params;
};
LoadedCheckpoint read_checkpoint(const std::filesystem::path& path);

// Copies values into an existing store; throws on missing names or shape
// mismatches (extra names in the file are also an error).
void load_checkpoint(const std::filesystem::path& path, ParamStore& params,
                     const std::string& expected_kind);

// FNV-1a over names and value bit patterns; detects any parameter change.
uint64_t param_hash(const ParamStore& params);

}  // namespace hpc::ad
