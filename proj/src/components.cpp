#include "airwaycl/components.hpp"

#include <stdexcept>

namespace airwaycl::topo {

const std::vector<std::array<int, 3>>& neighbor_offsets(int connectivity) {
  static const auto make = [](int conn) {
    std::vector<std::array<int, 3>> offs;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int manh = std::abs(dx) + std::abs(dy) + std::abs(dz);
          if (manh == 0) continue;
          if (conn == 6 && manh > 1) continue;
          if (conn == 18 && manh > 2) continue;
          offs.push_back({dx, dy, dz});
        }
    return offs;
  };
  static const std::vector<std::array<int, 3>> c6 = make(6);
  static const std::vector<std::array<int, 3>> c18 = make(18);
  static const std::vector<std::array<int, 3>> c26 = make(26);
  switch (connectivity) {
    case 6: return c6;
    case 18: return c18;
    case 26: return c26;
    default: throw std::invalid_argument("connectivity must be 6, 18 or 26");
  }
}

ComponentLabels label_components(const Mask3D& mask, int connectivity) {
  const auto& offs = neighbor_offsets(connectivity);
  const Dims& d = mask.dims;
  ComponentLabels out;
  out.labels.assign(std::size_t(d.count()), 0);

  std::vector<std::int64_t> stack;
  std::int32_t next = 0;
  std::int64_t i = 0;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x, ++i) {
        if (!mask.data[std::size_t(i)] || out.labels[std::size_t(i)]) continue;
        ++next;
        std::int64_t size = 0;
        out.labels[std::size_t(i)] = next;
        stack.assign(1, i);
        while (!stack.empty()) {
          const std::int64_t cur = stack.back();
          stack.pop_back();
          ++size;
          const auto [cx, cy, cz] = unravel(d, cur);
          for (const auto& o : offs) {
            const int nx = cx + o[0], ny = cy + o[1], nz = cz + o[2];
            if (!d.contains(nx, ny, nz)) continue;
            const std::int64_t ni = linear_index(d, nx, ny, nz);
            if (mask.data[std::size_t(ni)] && !out.labels[std::size_t(ni)]) {
              out.labels[std::size_t(ni)] = next;
              stack.push_back(ni);
            }
          }
        }
        out.sizes.push_back(size);
      }
  return out;
}

int component_count(const Mask3D& mask, int connectivity) {
  return int(label_components(mask, connectivity).sizes.size());
}

Mask3D largest_component(const Mask3D& mask, int connectivity) {
  const ComponentLabels cl = label_components(mask, connectivity);
  Mask3D out = make_mask(mask.dims, mask.spacing);
  if (cl.sizes.empty()) return out;

  std::int32_t best = 1;
  for (std::size_t k = 1; k < cl.sizes.size(); ++k)
    if (cl.sizes[k] > cl.sizes[std::size_t(best) - 1]) best = std::int32_t(k + 1);

  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = cl.labels[i] == best ? 1 : 0;
  return out;
}

std::int64_t euler_characteristic(const Mask3D& mask) {
  const Dims& d = mask.dims;
  const auto fg = [&](int x, int y, int z) {
    return d.contains(x, y, z) && mask.data[std::size_t(linear_index(d, x, y, z))] != 0;
  };

  // Cells of the closed-cube union, counted by their low-corner voxel block:
  // a vertex exists iff any of the 8 voxels sharing it is set, an edge iff any
  // of its 4, a face iff any of its 2, a cube iff its voxel is set.
  std::int64_t vertices = 0, edges = 0, faces = 0, cubes = 0;
  for (int z = -1; z < d.nz; ++z)
    for (int y = -1; y < d.ny; ++y)
      for (int x = -1; x < d.nx; ++x) {
        const bool b000 = fg(x, y, z), b100 = fg(x + 1, y, z);
        const bool b010 = fg(x, y + 1, z), b110 = fg(x + 1, y + 1, z);
        const bool b001 = fg(x, y, z + 1), b101 = fg(x + 1, y, z + 1);
        const bool b011 = fg(x, y + 1, z + 1), b111 = fg(x + 1, y + 1, z + 1);

        vertices += b000 || b100 || b010 || b110 || b001 || b101 || b011 || b111;
        // one edge per axis through the block's far corner
        edges += b000 || b010 || b001 || b011;  // x-directed: shared by voxels varying in y,z
        edges += b000 || b100 || b001 || b101;  // y-directed
        edges += b000 || b100 || b010 || b110;  // z-directed
        // one face per axis pair
        faces += b000 || b001;  // xy-plane face: shared by voxels stacked in z
        faces += b000 || b010;  // xz-plane face
        faces += b000 || b100;  // yz-plane face
        cubes += b000;
      }
  return vertices - edges + faces - cubes;
}

}  // namespace airwaycl::topo
