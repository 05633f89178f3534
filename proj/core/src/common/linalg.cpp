#include "hpc/common/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace hpc {

bool cholesky(std::span<const double> a, int n, std::span<double> l_out) {
  if (a.size() != static_cast<size_t>(n) * n || l_out.size() != a.size())
    throw std::invalid_argument("cholesky: bad spans");
  for (auto& v : l_out) v = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= l_out[i * n + k] * l_out[j * n + k];
      if (i == j) {
        if (s <= 0.0) return false;
        l_out[i * n + i] = std::sqrt(s);
      } else {
        l_out[i * n + j] = s / l_out[j * n + j];
      }
    }
  }
  return true;
}

void lower_tri_matvec(std::span<const double> l, int n, std::span<const double> x,
                      std::span<double> y) {
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += l[i * n + j] * x[j];
    y[i] = s;
  }
}

std::vector<double> symmetric_eigenvalues(std::span<const double> a, int n) {
  std::vector<double> m(a.begin(), a.end());
  auto off = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += m[i * n + j] * m[i * n + j];
    return s;
  };
  for (int sweep = 0; sweep < 100 && off() > 1e-24; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = m[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        double app = m[p * n + p], aqq = m[q * n + q];
        double theta = 0.5 * (aqq - app) / apq;
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double mkp = m[k * n + p], mkq = m[k * n + q];
          m[k * n + p] = c * mkp - s * mkq;
          m[k * n + q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          double mpk = m[p * n + k], mqk = m[q * n + k];
          m[p * n + k] = c * mpk - s * mqk;
          m[q * n + k] = s * mpk + c * mqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = m[i * n + i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace hpc
