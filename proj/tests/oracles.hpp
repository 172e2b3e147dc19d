#pragma once

// Independent brute-force oracles for the test suites. These deliberately
// avoid the library's algorithms: distances are exhaustive nearest-seed
// searches and the 3x3 eigenproblem is solved from the characteristic
// polynomial.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "airwaycl/types.hpp"

namespace oracle {

/// Distance (mm) to the nearest background voxel for every foreground voxel,
/// with everything outside the box treated as background; 0 on background.
/// Exhaustive search over a one-voxel padded lattice.
inline std::vector<double> distance_transform_bruteforce(const airwaycl::Mask3D& m) {
  using namespace airwaycl;
  const Dims& d = m.dims;
  std::vector<std::array<int, 3>> bg;
  for (int z = -1; z <= d.nz; ++z)
    for (int y = -1; y <= d.ny; ++y)
      for (int x = -1; x <= d.nx; ++x) {
        const bool inside = d.contains(x, y, z);
        const bool fg = inside && m.data[std::size_t(linear_index(d, x, y, z))] != 0;
        if (!fg) bg.push_back({x, y, z});
      }
  std::vector<double> out(std::size_t(d.count()), 0.0);
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        const auto i = linear_index(d, x, y, z);
        if (!m.data[std::size_t(i)]) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : bg) {
          const double dx = (x - b[0]) * m.spacing.sx;
          const double dy = (y - b[1]) * m.spacing.sy;
          const double dz = (z - b[2]) * m.spacing.sz;
          best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
        }
        out[std::size_t(i)] = best;
      }
  return out;
}

/// Symmetric mean nearest-neighbor distance between two voxel-index sets.
inline double symmetric_set_distance_bruteforce(const airwaycl::Dims& d,
                                                const airwaycl::Spacing& s,
                                                const std::vector<std::int64_t>& a,
                                                const std::vector<std::int64_t>& b) {
  using namespace airwaycl;
  const auto one_way = [&](const std::vector<std::int64_t>& from,
                           const std::vector<std::int64_t>& to) {
    double sum = 0.0;
    for (const auto vi : from) {
      const auto p = unravel(d, vi);
      double best = std::numeric_limits<double>::infinity();
      for (const auto wi : to) {
        const auto q = unravel(d, wi);
        const double dx = (p[0] - q[0]) * s.sx;
        const double dy = (p[1] - q[1]) * s.sy;
        const double dz = (p[2] - q[2]) * s.sz;
        best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
      }
      sum += best;
    }
    return sum / double(from.size());
  };
  return 0.5 * (one_way(a, b) + one_way(b, a));
}

/// Recursive flood fill component count (26 or 6 connectivity).
inline int component_count_bruteforce(const airwaycl::Mask3D& m, int connectivity) {
  using namespace airwaycl;
  const Dims& d = m.dims;
  std::vector<std::uint8_t> seen(std::size_t(d.count()), 0);
  int count = 0;
  std::vector<std::int64_t> stack;
  for (std::int64_t i = 0; i < d.count(); ++i) {
    if (!m.data[std::size_t(i)] || seen[std::size_t(i)]) continue;
    ++count;
    seen[std::size_t(i)] = 1;
    stack.assign(1, i);
    while (!stack.empty()) {
      const auto cur = stack.back();
      stack.pop_back();
      const auto [cx, cy, cz] = unravel(d, cur);
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int manh = std::abs(dx) + std::abs(dy) + std::abs(dz);
            if (manh == 0) continue;
            if (connectivity == 6 && manh > 1) continue;
            const int nx = cx + dx, ny = cy + dy, nz = cz + dz;
            if (!d.contains(nx, ny, nz)) continue;
            const auto ni = linear_index(d, nx, ny, nz);
            if (m.data[std::size_t(ni)] && !seen[std::size_t(ni)]) {
              seen[std::size_t(ni)] = 1;
              stack.push_back(ni);
            }
          }
    }
  }
  return count;
}

/// Eigenvalues/eigenvectors of a symmetric 3x3 matrix from the roots of the
/// characteristic polynomial (trigonometric form), eigenvectors via
/// cross-product null space. Values sorted descending.
struct Eigen3 {
  std::array<double, 3> values{};
  std::array<std::array<double, 3>, 3> vectors{};  // vectors[k] for values[k]
};

inline Eigen3 eigen3_characteristic(const std::array<std::array<double, 3>, 3>& A) {
  const double a = A[0][0], b = A[1][1], c = A[2][2];
  const double d = A[0][1], e = A[1][2], f = A[0][2];
  // coefficients of det(A - x I) = -x^3 + tr x^2 - m x + det
  const double tr = a + b + c;
  const double m2 = a * b + b * c + a * c - d * d - e * e - f * f;
  const double det = a * (b * c - e * e) - d * (d * c - e * f) + f * (d * e - b * f);

  // shifted form: x = tr/3 + t, solve t^3 + p t + q = 0
  const double p = m2 - tr * tr / 3.0;
  const double q = -2.0 * tr * tr * tr / 27.0 + tr * m2 / 3.0 - det;
  std::array<double, 3> roots{};
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (p >= -1e-300 || disc < 0.0) {
    // (near-)triple or numerically degenerate: fall back to equal roots
    roots = {tr / 3.0, tr / 3.0, tr / 3.0};
    if (p < 0.0) {
      const double r = std::sqrt(-p / 3.0);
      const double arg = std::clamp(3.0 * q / (2.0 * p * r), -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k)
        roots[std::size_t(k)] =
            tr / 3.0 + 2.0 * r * std::cos(phi - 2.0943951023931953 * k);
    }
  } else {
    const double r = std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (2.0 * p * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots[std::size_t(k)] = tr / 3.0 + 2.0 * r * std::cos(phi - 2.0943951023931953 * k);
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());

  Eigen3 out;
  out.values = roots;
  for (int k = 0; k < 3; ++k) {
    const double lam = roots[std::size_t(k)];
    // rows of (A - lam I)
    const std::array<std::array<double, 3>, 3> B{{{a - lam, d, f}, {d, b - lam, e},
                                                  {f, e, c - lam}}};
    const auto cross = [](const std::array<double, 3>& u, const std::array<double, 3>& v) {
      return std::array<double, 3>{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                                   u[0] * v[1] - u[1] * v[0]};
    };
    std::array<double, 3> best{0, 0, 0};
    double best_norm = -1.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const auto v = cross(B[std::size_t(i)], B[std::size_t(j)]);
        const double nrm = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if (nrm > best_norm) {
          best_norm = nrm;
          best = v;
        }
      }
    const double nrm = std::sqrt(best_norm);
    for (int i = 0; i < 3; ++i) out.vectors[std::size_t(k)][std::size_t(i)] = best[std::size_t(i)] / nrm;
  }
  return out;
}

}  // namespace oracle
