#pragma once

#include "etesc/types.hpp"

#include <complex>
#include <vector>

namespace etesc::linalg {

/// Induced 2-norm (largest singular value).
[[nodiscard]] double induced_norm(const Matrix& a);

/// Eigenvalues of a symmetric matrix, ascending.
[[nodiscard]] Vector symmetric_eigenvalues(const Matrix& a);

[[nodiscard]] std::vector<std::complex<double>> eigenvalues(const Matrix& a);

/// Largest absolute deviation from symmetry, max |a_ij - a_ji|.
[[nodiscard]] double asymmetry(const Matrix& a);

[[nodiscard]] inline Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace etesc::linalg
