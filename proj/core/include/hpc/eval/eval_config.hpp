#pragma once

#include <string>
#include <vector>

namespace hpc::eval {

struct EvalConfig {
  int episodes_per_condition = 100;
  std::vector<double> intensities{0.0, 0.5, 1.0, 2.0};
  int streams = 4;  // independent curriculum streams per condition
  bool dynamics_randomization = true;
  int start_level = 0;
  double vx_lo = 0.4;
  double vx_hi = 0.8;
};

}  // namespace hpc::eval
