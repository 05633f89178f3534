#include "hpc/common/io.hpp"
#include "hpc/terrain/terrain.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hpc::terrain {

void Curriculum::update(double walked, bool early_termination) {
  if (walked >= promote_distance) {
    if (level < max_level) ++level;
  } else if (early_termination && walked < demote_distance) {
    if (level > 0) --level;
  }
}

static constexpr char kMagic[8] = {'H', 'P', 'C', 'T', 'E', 'R', 'R', 'N'};
static constexpr uint32_t kTerrainVersion = 1;

void write_binary(const std::filesystem::path& path, const HeightField& hf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open terrain file for writing: " + path.string());
  out.write(kMagic, 8);
  write_u32(out, kTerrainVersion);
  write_u32(out, static_cast<uint32_t>(hf.family));
  write_f64(out, hf.difficulty);
  write_f64(out, hf.cell_size);
  write_f64(out, hf.origin);
  write_u64(out, hf.heights.size());
  for (double h : hf.heights) write_f64(out, h);
  if (!out) throw std::runtime_error("terrain write failed: " + path.string());
}

HeightField read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open terrain file: " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a terrain file (bad magic): " + path.string());
  const uint32_t version = read_u32(in);
  if (version != kTerrainVersion)
    throw std::runtime_error("unsupported terrain version " + std::to_string(version));
  HeightField hf;
  hf.family = static_cast<Family>(read_u32(in));
  hf.difficulty = read_f64(in);
  hf.cell_size = read_f64(in);
  hf.origin = read_f64(in);
  const uint64_t count = read_u64(in);
  hf.heights.resize(count);
  for (auto& h : hf.heights) h = read_f64(in);
  return hf;
}

void write_csv(const std::filesystem::path& path, const HeightField& hf) {
  CsvWriter csv(path, {"x", "height"});
  for (size_t i = 0; i < hf.heights.size(); ++i) {
    const double row[2] = {hf.origin + hf.cell_size * static_cast<double>(i), hf.heights[i]};
    csv.write_row(row);
  }
}

}  // namespace hpc::terrain
