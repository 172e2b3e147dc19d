#include "airwaycl/distance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace airwaycl::topo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Felzenszwalb-Huttenlocher lower envelope of parabolas for one row.
// f[i] is the squared distance so far at sample i; samples sit at i*step mm.
void dt_row(const double* f, double* out, int n, double step, std::vector<int>& v,
            std::vector<double>& z) {
  v.resize(std::size_t(n));
  z.resize(std::size_t(n) + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double xq = q * step;
    while (true) {
      if (f[v[std::size_t(k)]] == kInf) {
        // an inf parabola never wins; drop it
        if (k == 0) {
          v[0] = q;
          z[0] = -kInf;
          z[1] = kInf;
          break;
        }
        --k;
        continue;
      }
      const double xp = v[std::size_t(k)] * step;
      const double s = ((f[q] + xq * xq) - (f[v[std::size_t(k)]] + xp * xp)) / (2 * xq - 2 * xp);
      if (s <= z[std::size_t(k)]) {
        --k;
        continue;
      }
      ++k;
      v[std::size_t(k)] = q;
      z[std::size_t(k)] = s;
      z[std::size_t(k) + 1] = kInf;
      break;
    }
  }
  if (f[v[0]] == kInf && k == 0) {
    for (int q = 0; q < n; ++q) out[q] = kInf;
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    const double xq = q * step;
    while (z[std::size_t(k) + 1] < xq) ++k;
    const double dx = xq - v[std::size_t(k)] * step;
    out[q] = dx * dx + f[v[std::size_t(k)]];
  }
}

}  // namespace

std::vector<double> squared_distance_to_seeds(const Dims& dims, const Spacing& spacing,
                                              const std::vector<std::uint8_t>& seeds) {
  if (std::int64_t(seeds.size()) != dims.count())
    throw std::invalid_argument("squared_distance_to_seeds: seed size mismatch");
  std::vector<double> d(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) d[i] = seeds[i] ? 0.0 : kInf;

  std::vector<double> row, out_row;
  std::vector<int> v;
  std::vector<double> z;

  // x pass
  row.resize(std::size_t(dims.nx));
  out_row.resize(std::size_t(dims.nx));
  for (int zz = 0; zz < dims.nz; ++zz)
    for (int y = 0; y < dims.ny; ++y) {
      const auto base = linear_index(dims, 0, y, zz);
      for (int x = 0; x < dims.nx; ++x) row[std::size_t(x)] = d[std::size_t(base + x)];
      dt_row(row.data(), out_row.data(), dims.nx, spacing.sx, v, z);
      for (int x = 0; x < dims.nx; ++x) d[std::size_t(base + x)] = out_row[std::size_t(x)];
    }

  // y pass
  row.resize(std::size_t(dims.ny));
  out_row.resize(std::size_t(dims.ny));
  for (int zz = 0; zz < dims.nz; ++zz)
    for (int x = 0; x < dims.nx; ++x) {
      for (int y = 0; y < dims.ny; ++y)
        row[std::size_t(y)] = d[std::size_t(linear_index(dims, x, y, zz))];
      dt_row(row.data(), out_row.data(), dims.ny, spacing.sy, v, z);
      for (int y = 0; y < dims.ny; ++y)
        d[std::size_t(linear_index(dims, x, y, zz))] = out_row[std::size_t(y)];
    }

  // z pass
  row.resize(std::size_t(dims.nz));
  out_row.resize(std::size_t(dims.nz));
  for (int y = 0; y < dims.ny; ++y)
    for (int x = 0; x < dims.nx; ++x) {
      for (int zz = 0; zz < dims.nz; ++zz)
        row[std::size_t(zz)] = d[std::size_t(linear_index(dims, x, y, zz))];
      dt_row(row.data(), out_row.data(), dims.nz, spacing.sz, v, z);
      for (int zz = 0; zz < dims.nz; ++zz)
        d[std::size_t(linear_index(dims, x, y, zz))] = out_row[std::size_t(zz)];
    }

  return d;
}

DistanceField distance_transform(const Mask3D& mask) {
  // Run on a one-voxel background pad so the exterior acts as background;
  // the nearest out-of-box background voxel is always within that shell.
  const Dims pd{mask.dims.nx + 2, mask.dims.ny + 2, mask.dims.nz + 2};
  std::vector<std::uint8_t> seeds(std::size_t(pd.count()), 1);
  for (int z = 0; z < mask.dims.nz; ++z)
    for (int y = 0; y < mask.dims.ny; ++y) {
      const auto src = linear_index(mask.dims, 0, y, z);
      const auto dst = linear_index(pd, 1, y + 1, z + 1);
      for (int x = 0; x < mask.dims.nx; ++x)
        seeds[std::size_t(dst + x)] = mask.data[std::size_t(src + x)] ? 0 : 1;
    }

  const auto sq = squared_distance_to_seeds(pd, mask.spacing, seeds);

  DistanceField out;
  out.dims = mask.dims;
  out.spacing = mask.spacing;
  out.data.assign(std::size_t(mask.dims.count()), 0.0);
  for (int z = 0; z < mask.dims.nz; ++z)
    for (int y = 0; y < mask.dims.ny; ++y)
      for (int x = 0; x < mask.dims.nx; ++x) {
        const auto i = linear_index(mask.dims, x, y, z);
        if (mask.data[std::size_t(i)])
          out.data[std::size_t(i)] =
              std::sqrt(sq[std::size_t(linear_index(pd, x + 1, y + 1, z + 1))]);
      }
  return out;
}

}  // namespace airwaycl::topo
