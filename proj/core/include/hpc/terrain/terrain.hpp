#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hpc/common/rng.hpp"

namespace hpc::terrain {

enum class Family {
  kFlat = 0,
  kStairUp,
  kStairDown,
  kRandomRough,
  kPyramidSlope,
  kBoxes,
  kWave,
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);  // throws on unknown name

// 1-D elevation profile on a uniform grid. height_at() interpolates
// linearly between cell centres and clamps outside the grid.
struct HeightField {
  Family family = Family::kFlat;
  double difficulty = 0.0;
  double cell_size = 0.05;
  double origin = 0.0;  // world x of heights[0]
  std::vector<double> heights;

  double length() const { return cell_size * static_cast<double>(heights.size() - 1); }
  double height_at(double x) const;
};

// Difficulty d in [0,1] scales the family parameters:
//   stairs: rise 0.05 + 0.15 d (run 0.30 m)
//   random_rough: amplitude 0.025 + 0.075 d
//   pyramid_slope: grade 0.10 + 0.30 d
//   boxes: box height up to 0.05 + 0.20 d
//   wave: amplitude 0.05 + 0.15 d (period 2 m)
// Every profile keeps a flat strip around the spawn at x=0.
HeightField generate(Family family, double difficulty, uint64_t seed, double length = 60.0,
                     double cell_size = 0.05);

// Robot-centric forward scan: offsets -0.5..+1.5 m in 0.1 m steps,
// heights relative to the root (terrain minus root_z).
inline constexpr int kScanPoints = 21;
inline constexpr double kScanStart = -0.5;
inline constexpr double kScanStep = 0.1;
std::array<double, kScanPoints> sample_scan(const HeightField& hf, double root_x, double root_z);

// Walk-distance curriculum over difficulty levels 0..max_level.
struct Curriculum {
  int level = 0;
  int max_level = 9;
  double promote_distance = 8.0;  // walked at least this: level up
  double demote_distance = 2.0;   // early termination under this: level down

  double difficulty() const { return max_level > 0 ? static_cast<double>(level) / max_level : 0.0; }
  void update(double walked, bool early_termination);
};

// Binary dump: magic "HPCTERRN" | u32 version | u32 family | f64 difficulty
// | f64 cell | f64 origin | u64 count | f64 heights. CSV: x,height rows.
void write_binary(const std::filesystem::path& path, const HeightField& hf);
HeightField read_binary(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const HeightField& hf);

}  // namespace hpc::terrain
