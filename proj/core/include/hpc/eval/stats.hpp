#pragma once

#include <span>

namespace hpc::eval {

double mean(std::span<const double> xs);
double sample_std(std::span<const double> xs);  // n-1 denominator, 0 for n < 2

// One-sided paired t statistic for H1: mean(a - b) > 0.
struct PairedT {
  double mean_diff = 0.0;
  double t = 0.0;  // 0 when the differences have zero variance
  int df = 0;
};
PairedT paired_t(std::span<const double> a, std::span<const double> b);

// Upper 5% quantile of Student's t (one-sided 95%). Tabulated for df 1..30,
// asymptotic 1.645 beyond.
double t_critical_95(int df);

}  // namespace hpc::eval
