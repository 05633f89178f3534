#pragma once

// Central finite-difference gradient verification shared by the unit tests
// and the acceptance harness.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hpc/ad/tensor.hpp"

namespace hpc::testsupport {

struct GradCheckResult {
  int checked = 0;
  int failed = 0;
  double worst = 0.0;  // worst |analytic - numeric| / max(1, |a|, |n|)
  std::string worst_at;
};

// loss_fn must rebuild the graph from the current leaf values on every call.
template <typename F>
GradCheckResult gradcheck(std::vector<ad::Tensor> leaves, F&& loss_fn, double h = 1e-6) {
  GradCheckResult res;
  ad::Tensor loss = loss_fn();
  for (auto& l : leaves) l.zero_grad();
  ad::backward(loss);
  std::vector<std::vector<double>> analytic;
  for (auto& l : leaves) {
    auto g = l.grad();
    analytic.emplace_back(g.begin(), g.end());
  }
  for (size_t li = 0; li < leaves.size(); ++li) {
    auto d = leaves[li].data();
    for (size_t i = 0; i < d.size(); ++i) {
      const double orig = d[i];
      d[i] = orig + h;
      const double fp = loss_fn().item();
      d[i] = orig - h;
      const double fm = loss_fn().item();
      d[i] = orig;
      const double num = (fp - fm) / (2.0 * h);
      const double ana = analytic[li][i];
      const double err = std::abs(num - ana) /
                         std::max({1.0, std::abs(num), std::abs(ana)});
      ++res.checked;
      if (err > res.worst) {
        res.worst = err;
        res.worst_at = "leaf " + std::to_string(li) + " [" + std::to_string(i) + "]";
      }
      if (err > 1e-4) ++res.failed;
    }
  }
  return res;
}

}  // namespace hpc::testsupport
