#include "hpc/eval/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hpc::eval {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(n - 1));
}

PairedT paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("paired_t needs equal-length nonempty samples");
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  PairedT r;
  r.df = static_cast<int>(a.size()) - 1;
  r.mean_diff = mean(d);
  const double sd = sample_std(d);
  if (sd > 0.0 && r.df > 0) r.t = r.mean_diff / (sd / std::sqrt(static_cast<double>(d.size())));
  return r;
}

double t_critical_95(int df) {
  static const double table[] = {6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860,
                                 1.833, 1.812, 1.796, 1.782, 1.771, 1.761, 1.753, 1.746,
                                 1.740, 1.734, 1.729, 1.725, 1.721, 1.717, 1.714, 1.711,
                                 1.708, 1.706, 1.703, 1.701, 1.699, 1.697};
  if (df < 1) throw std::invalid_argument("t_critical_95: df must be >= 1");
  if (df <= 30) return table[df - 1];
  return 1.645;
}

}  // namespace hpc::eval
