#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace airwaycl {

/// Voxel counts per axis. Data is stored x-fastest: index = x + nx*(y + ny*z).
struct Dims {
  int nx = 0, ny = 0, nz = 0;

  bool operator==(const Dims&) const = default;
  std::int64_t count() const { return std::int64_t(nx) * ny * nz; }
  bool contains(int x, int y, int z) const {
    return x >= 0 && x < nx && y >= 0 && y < ny && z >= 0 && z < nz;
  }
};

/// Physical voxel size in mm per axis. All components strictly positive.
struct Spacing {
  double sx = 1.0, sy = 1.0, sz = 1.0;

  bool operator==(const Spacing&) const = default;
  double voxel_volume_mm3() const { return sx * sy * sz; }
};

inline std::int64_t linear_index(const Dims& d, int x, int y, int z) {
  return std::int64_t(x) + std::int64_t(d.nx) * (std::int64_t(y) + std::int64_t(d.ny) * z);
}

inline std::array<int, 3> unravel(const Dims& d, std::int64_t i) {
  const int x = int(i % d.nx);
  const std::int64_t r = i / d.nx;
  return {x, int(r % d.ny), int(r / d.ny)};
}

enum class IntensityKind { HU, Normalized };

/// 3D scalar field (CT scan or derived field), x-fastest voxel order.
struct Volume3D {
  Dims dims;
  Spacing spacing;
  std::vector<float> data;
  IntensityKind kind = IntensityKind::HU;

  float at(int x, int y, int z) const { return data[linear_index(dims, x, y, z)]; }
  float& at(int x, int y, int z) { return data[linear_index(dims, x, y, z)]; }
};

/// Binary occupancy mask sharing the Volume3D layout. Values are exactly 0 or 1.
struct Mask3D {
  Dims dims;
  Spacing spacing;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y, int z) const { return data[linear_index(dims, x, y, z)]; }
  std::uint8_t& at(int x, int y, int z) { return data[linear_index(dims, x, y, z)]; }
};

/// Axis-aligned voxel box, inclusive at both ends.
struct BoundingBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};

  bool operator==(const BoundingBox&) const = default;
  Dims extents() const {
    return Dims{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};
  }
  bool valid_within(const Dims& d) const {
    for (int a = 0; a < 3; ++a)
      if (lo[a] > hi[a]) return false;
    return lo[0] >= 0 && lo[1] >= 0 && lo[2] >= 0 && hi[0] < d.nx && hi[1] < d.ny && hi[2] < d.nz;
  }
};

inline Volume3D make_volume(Dims d, Spacing s, float fill = 0.f,
                            IntensityKind k = IntensityKind::HU) {
  Volume3D v;
  v.dims = d;
  v.spacing = s;
  v.kind = k;
  v.data.assign(std::size_t(d.count()), fill);
  return v;
}

inline Mask3D make_mask(Dims d, Spacing s, std::uint8_t fill = 0) {
  Mask3D m;
  m.dims = d;
  m.spacing = s;
  m.data.assign(std::size_t(d.count()), fill);
  return m;
}

inline void require_same_grid(const Dims& a, const Dims& b, const std::string& what) {
  if (!(a == b))
    throw std::invalid_argument(what + ": dimension mismatch (" + std::to_string(a.nx) + "x" +
                                std::to_string(a.ny) + "x" + std::to_string(a.nz) + " vs " +
                                std::to_string(b.nx) + "x" + std::to_string(b.ny) + "x" +
                                std::to_string(b.nz) + ")");
}

}  // namespace airwaycl
