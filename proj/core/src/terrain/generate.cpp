#include <algorithm>
#include <cmath>

#include "hpc/terrain/terrain.hpp"

namespace hpc::terrain {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kSpawnFlatEnd = 2.0;   // features start past this x
constexpr double kGridStart = -5.0;

double stair_rise(double d) { return 0.05 + 0.15 * d; }
constexpr double kStairRun = 0.30;

}  // namespace

HeightField generate(Family family, double difficulty, uint64_t seed, double length,
                     double cell_size) {
  HeightField hf;
  hf.family = family;
  hf.difficulty = difficulty;
  hf.cell_size = cell_size;
  hf.origin = kGridStart;
  const auto n = static_cast<size_t>(std::lround(length / cell_size)) + 1;
  hf.heights.assign(n, 0.0);
  Rng rng(seed);
  const double d = std::clamp(difficulty, 0.0, 1.0);

  auto xat = [&](size_t i) { return hf.origin + cell_size * static_cast<double>(i); };

  switch (family) {
    case Family::kFlat:
      break;

    case Family::kStairUp:
    case Family::kStairDown: {
      const double rise = stair_rise(d) * (family == Family::kStairUp ? 1.0 : -1.0);
      for (size_t i = 0; i < n; ++i) {
        const double x = xat(i);
        if (x <= kSpawnFlatEnd) continue;
        hf.heights[i] = rise * std::floor((x - kSpawnFlatEnd) / kStairRun);
      }
      break;
    }

    case Family::kRandomRough: {
      const double amp = 0.025 + 0.075 * d;
      const size_t knot_stride = 3;  // 0.15 m between knots at the 5 cm default
      const size_t nknots = n / knot_stride + 2;
      std::vector<double> knots(nknots);
      for (auto& k : knots) k = rng.uniform(-amp, amp);
      for (size_t i = 0; i < n; ++i) {
        if (xat(i) <= kSpawnFlatEnd) continue;
        const size_t k = i / knot_stride;
        const double frac = static_cast<double>(i % knot_stride) / knot_stride;
        hf.heights[i] = knots[k] * (1.0 - frac) + knots[k + 1] * frac;
      }
      break;
    }

    case Family::kPyramidSlope: {
      const double grade = 0.10 + 0.30 * d;
      // ramp up 6 m, plateau 2 m, ramp down 6 m, rest 2 m, repeat
      const double up = 6.0, top = 2.0, down = 6.0, rest = 2.0;
      const double period = up + top + down + rest;
      for (size_t i = 0; i < n; ++i) {
        const double x = xat(i);
        if (x <= kSpawnFlatEnd) continue;
        const double p = std::fmod(x - kSpawnFlatEnd, period);
        double h = 0.0;
        if (p < up) h = grade * p;
        else if (p < up + top) h = grade * up;
        else if (p < up + top + down) h = grade * (up - (p - up - top));
        hf.heights[i] = h;
      }
      break;
    }

    case Family::kBoxes: {
      const double hmax = 0.05 + 0.20 * d;
      double x0 = kSpawnFlatEnd;
      while (x0 < xat(n - 1)) {
        const double len = rng.uniform(0.8, 1.6);
        const double h = rng.uniform(0.0, hmax);
        for (size_t i = 0; i < n; ++i) {
          const double x = xat(i);
          if (x > x0 && x <= x0 + len) hf.heights[i] = h;
        }
        x0 += len;
      }
      break;
    }

    case Family::kWave: {
      const double amp = 0.05 + 0.15 * d;
      const double period = 2.0;
      for (size_t i = 0; i < n; ++i) {
        const double x = xat(i);
        if (x <= kSpawnFlatEnd) continue;
        hf.heights[i] = amp * std::sin(kTwoPi * (x - kSpawnFlatEnd) / period);
      }
      break;
    }
  }
  return hf;
}

}  // namespace hpc::terrain
