#include "airwaycl/skeleton.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace airwaycl::topo {
namespace {

struct Offset {
  int dx, dy, dz;
};

// Neighborhood tables, built once. Positions are indexed 0..25 over the 26
// neighbors in (dz, dy, dx) raster order.
struct NeighborTables {
  std::array<Offset, 26> off26{};
  // adjacency between 26-neighborhood positions under 26-connectivity
  std::array<std::array<std::int8_t, 26>, 26> adj26{};
  // positions forming the 18-neighborhood, and 6-adjacency among them
  std::array<std::int8_t, 26> in18{};
  std::array<std::array<std::int8_t, 26>, 26> adj6{};
  std::array<std::int8_t, 26> face{};  // 6-adjacent to the center

  NeighborTables() {
    int k = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          off26[std::size_t(k)] = {dx, dy, dz};
          const int manh = std::abs(dx) + std::abs(dy) + std::abs(dz);
          in18[std::size_t(k)] = manh <= 2;
          face[std::size_t(k)] = manh == 1;
          ++k;
        }
    for (int a = 0; a < 26; ++a)
      for (int b = 0; b < 26; ++b) {
        const int ax = off26[std::size_t(a)].dx - off26[std::size_t(b)].dx;
        const int ay = off26[std::size_t(a)].dy - off26[std::size_t(b)].dy;
        const int az = off26[std::size_t(a)].dz - off26[std::size_t(b)].dz;
        const int cheb = std::max({std::abs(ax), std::abs(ay), std::abs(az)});
        const int manh = std::abs(ax) + std::abs(ay) + std::abs(az);
        adj26[std::size_t(a)][std::size_t(b)] = (a != b) && cheb <= 1;
        adj6[std::size_t(a)][std::size_t(b)] = manh == 1;
      }
  }
};

const NeighborTables& tables() {
  static const NeighborTables t;
  return t;
}

inline bool fg_at(const Mask3D& m, int x, int y, int z) {
  return m.dims.contains(x, y, z) && m.data[std::size_t(linear_index(m.dims, x, y, z))] != 0;
}

int count_fg_neighbors(const Mask3D& m, int x, int y, int z) {
  const auto& t = tables();
  int c = 0;
  for (const auto& o : t.off26) c += fg_at(m, x + o.dx, y + o.dy, z + o.dz);
  return c;
}

}  // namespace

bool is_simple_point(const Mask3D& mask, int x, int y, int z) {
  const auto& t = tables();
  std::array<std::uint8_t, 26> fg{};
  for (int i = 0; i < 26; ++i) {
    const auto& o = t.off26[std::size_t(i)];
    fg[std::size_t(i)] = fg_at(mask, x + o.dx, y + o.dy, z + o.dz);
  }

  // exactly one 26-component of foreground in the punctured neighborhood
  {
    std::array<std::int8_t, 26> seen{};
    int components = 0;
    std::array<int, 26> stack;
    for (int i = 0; i < 26; ++i) {
      if (!fg[std::size_t(i)] || seen[std::size_t(i)]) continue;
      if (++components > 1) return false;
      int top = 0;
      stack[std::size_t(top++)] = i;
      seen[std::size_t(i)] = 1;
      while (top) {
        const int c = stack[std::size_t(--top)];
        for (int j = 0; j < 26; ++j)
          if (fg[std::size_t(j)] && !seen[std::size_t(j)] && t.adj26[std::size_t(c)][std::size_t(j)]) {
            seen[std::size_t(j)] = 1;
            stack[std::size_t(top++)] = j;
          }
      }
    }
    if (components != 1) return false;
  }

  // exactly one 6-component of background in the 18-neighborhood touching a
  // face neighbor
  {
    std::array<std::int8_t, 26> seen{};
    int components = 0;
    std::array<int, 26> stack;
    for (int i = 0; i < 26; ++i) {
      if (!t.in18[std::size_t(i)] || fg[std::size_t(i)] || seen[std::size_t(i)]) continue;
      if (!t.face[std::size_t(i)]) continue;  // seed only from face-adjacent background
      if (seen[std::size_t(i)]) continue;
      ++components;
      if (components > 1) return false;
      int top = 0;
      stack[std::size_t(top++)] = i;
      seen[std::size_t(i)] = 1;
      while (top) {
        const int c = stack[std::size_t(--top)];
        for (int j = 0; j < 26; ++j)
          if (t.in18[std::size_t(j)] && !fg[std::size_t(j)] && !seen[std::size_t(j)] &&
              t.adj6[std::size_t(c)][std::size_t(j)]) {
            seen[std::size_t(j)] = 1;
            stack[std::size_t(top++)] = j;
          }
      }
    }
    if (components != 1) return false;
  }
  return true;
}

Mask3D skeletonize(const Mask3D& mask) {
  Mask3D out = mask;
  const Dims& d = out.dims;
  const auto& t = tables();

  static constexpr std::array<Offset, 6> directions{
      Offset{0, 0, 1}, Offset{0, 0, -1}, Offset{0, 1, 0},
      Offset{0, -1, 0}, Offset{1, 0, 0}, Offset{-1, 0, 0}};

  std::vector<std::int64_t> active;
  active.reserve(std::size_t(d.count()) / 8 + 16);
  for (std::int64_t i = 0; i < d.count(); ++i)
    if (out.data[std::size_t(i)]) active.push_back(i);

  std::vector<std::uint8_t> queued(std::size_t(d.count()), 0);
  std::vector<std::int64_t> candidates, next_active;

  while (true) {
    std::size_t deleted_this_pass = 0;
    next_active.clear();
    for (auto& q : queued) q = 0;

    for (const auto& dir : directions) {
      candidates.clear();
      for (const std::int64_t v : active) {
        if (!out.data[std::size_t(v)]) continue;
        const auto [x, y, z] = unravel(d, v);
        if (fg_at(out, x + dir.dx, y + dir.dy, z + dir.dz)) continue;  // not a border point here
        const int nb = count_fg_neighbors(out, x, y, z);
        if (nb == 1) continue;  // endpoint, keep
        if (!is_simple_point(out, x, y, z)) continue;
        candidates.push_back(v);
      }
      // Sequential deletion with re-check keeps the pass topology-safe even
      // though candidates were gathered in parallel-style.
      for (const std::int64_t v : candidates) {
        const auto [x, y, z] = unravel(d, v);
        if (count_fg_neighbors(out, x, y, z) == 1) continue;
        if (!is_simple_point(out, x, y, z)) continue;
        out.data[std::size_t(v)] = 0;
        ++deleted_this_pass;
        for (const auto& o : t.off26) {
          const int nx = x + o.dx, ny = y + o.dy, nz = z + o.dz;
          if (!d.contains(nx, ny, nz)) continue;
          const std::int64_t ni = linear_index(d, nx, ny, nz);
          if (out.data[std::size_t(ni)] && !queued[std::size_t(ni)]) {
            queued[std::size_t(ni)] = 1;
            next_active.push_back(ni);
          }
        }
      }
    }

    if (deleted_this_pass == 0) break;
    std::sort(next_active.begin(), next_active.end());
    active = next_active;
  }
  return out;
}

}  // namespace airwaycl::topo
