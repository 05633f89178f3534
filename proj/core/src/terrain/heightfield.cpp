#include "hpc/terrain/terrain.hpp"

#include <cmath>
#include <stdexcept>

namespace hpc::terrain {

const char* family_name(Family f) {
  switch (f) {
    case Family::kFlat: return "flat";
    case Family::kStairUp: return "stair_up";
    case Family::kStairDown: return "stair_down";
    case Family::kRandomRough: return "random_rough";
    case Family::kPyramidSlope: return "pyramid_slope";
    case Family::kBoxes: return "boxes";
    case Family::kWave: return "wave";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(Family::kWave); ++i) {
    const Family f = static_cast<Family>(i);
    if (name == family_name(f)) return f;
  }
  throw std::invalid_argument("unknown terrain family: '" + name + "'");
}

double HeightField::height_at(double x) const {
  if (heights.empty()) return 0.0;
  const double u = (x - origin) / cell_size;
  if (u <= 0.0) return heights.front();
  const double last = static_cast<double>(heights.size() - 1);
  if (u >= last) return heights.back();
  const auto i = static_cast<size_t>(u);
  const double frac = u - static_cast<double>(i);
  return heights[i] * (1.0 - frac) + heights[i + 1] * frac;
}

std::array<double, kScanPoints> sample_scan(const HeightField& hf, double root_x, double root_z) {
  std::array<double, kScanPoints> scan;
  for (int i = 0; i < kScanPoints; ++i) {
    const double x = root_x + kScanStart + kScanStep * i;
    scan[i] = hf.height_at(x) - root_z;
  }
  return scan;
}

}  // namespace hpc::terrain
