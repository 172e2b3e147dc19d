#pragma once

#include <cstdint>
#include <vector>

#include "airwaycl/types.hpp"

namespace airwaycl::topo {

/// Neighbor index offsets for 6/18/26 connectivity, as (dx, dy, dz) triples.
const std::vector<std::array<int, 3>>& neighbor_offsets(int connectivity);

struct ComponentLabels {
  std::vector<std::int32_t> labels;  // 0 = background, components numbered from 1
  std::vector<std::int64_t> sizes;   // sizes[k-1] = voxel count of component k
};

/// Raster-order BFS labeling; component k's seed (and therefore its smallest
/// linear index) precedes component k+1's.
ComponentLabels label_components(const Mask3D& mask, int connectivity = 26);

int component_count(const Mask3D& mask, int connectivity);

/// Keeps only the largest foreground component; ties broken by the component
/// with the smallest minimum linear voxel index. Empty in, empty out.
Mask3D largest_component(const Mask3D& mask, int connectivity = 26);

/// Euler characteristic of the foreground as a union of closed unit cubes
/// (the polyhedron matching 26-connected foreground / 6-connected
/// background): chi = V - E + F - C over the cells of the union.
std::int64_t euler_characteristic(const Mask3D& mask);

}  // namespace airwaycl::topo
