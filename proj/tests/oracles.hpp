#pragma once

// Test-only reference computations. Nothing here calls into the code it is
// used to check.

#include <cstdint>
#include <optional>
#include <vector>

namespace aridem::testing {

// Row-major n x n product computed as dot products of A's rows with B's
// columns gathered into a transposed copy.
inline std::vector<std::int64_t> dot_product_matmul(std::size_t n, const std::vector<std::int64_t>& a,
                                                    const std::vector<std::int64_t>& b) {
  std::vector<std::int64_t> bt(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) bt[c * n + r] = b[r * n + c];
  std::vector<std::int64_t> out(n * n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      std::int64_t s = 0;
      for (std::size_t k = 0; k < n; ++k) s += a[r * n + k] * bt[c * n + k];
      out[r * n + c] = s;
    }
  }
  return out;
}

struct Coefficients {
  std::int64_t cubic;
  std::int64_t quadratic;
};

// Solves  x*n1^3 + y*n1^2 = v1,  x*n2^3 + y*n2^2 = v2  by Cramer's rule in
// 128-bit integers; empty when the solution is not integral.
inline std::optional<Coefficients> solve_cubic_quadratic(std::int64_t n1, std::int64_t v1,
                                                         std::int64_t n2, std::int64_t v2) {
  using Wide = __int128;
  const Wide a11 = Wide(n1) * n1 * n1, a12 = Wide(n1) * n1;
  const Wide a21 = Wide(n2) * n2 * n2, a22 = Wide(n2) * n2;
  const Wide det = a11 * a22 - a12 * a21;
  const Wide x_num = Wide(v1) * a22 - a12 * Wide(v2);
  const Wide y_num = a11 * Wide(v2) - a21 * Wide(v1);
  if (det == 0 || x_num % det != 0 || y_num % det != 0) return std::nullopt;
  return Coefficients{static_cast<std::int64_t>(x_num / det), static_cast<std::int64_t>(y_num / det)};
}

}  // namespace aridem::testing
