#pragma once

#include <algorithm>
#include <vector>

namespace msturm::detail {

/// Cubic Hermite on [t0, t1] given values and derivatives at both ends.
template <class T>
T hermite(double t, double t0, double t1, const T& y0, const T& d0, const T& y1, const T& d1) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return (h00 * y0 + (h10 * h) * d0 + h01 * y1 + (h11 * h) * d1).eval();
}

/// Index i with grid[i] <= t <= grid[i+1], clamped to the valid cells.
inline std::size_t cell_of(const std::vector<double>& grid, double t) {
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  return std::min(i, grid.size() - 2);
}

}  // namespace msturm::detail
