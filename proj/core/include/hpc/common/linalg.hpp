#pragma once

#include <span>
#include <vector>

namespace hpc {

// Lower-triangular Cholesky factor of a symmetric positive definite matrix
// (row-major n*n). Returns false if a pivot is not positive.
bool cholesky(std::span<const double> a, int n, std::span<double> l_out);

// y = L * x for lower-triangular L (row-major n*n).
void lower_tri_matvec(std::span<const double> l, int n, std::span<const double> x,
                      std::span<double> y);

// Jacobi eigenvalues of a symmetric matrix, ascending. Test oracle quality,
// not performance.
std::vector<double> symmetric_eigenvalues(std::span<const double> a, int n);

}  // namespace hpc
