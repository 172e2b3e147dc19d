#pragma once

#include "airwaycl/types.hpp"

namespace airwaycl::topo {

/// True iff removing the foreground voxel at (x, y, z) preserves topology:
/// exactly one 26-component of foreground in the punctured 26-neighborhood,
/// and exactly one 6-component of background in the 18-neighborhood that is
/// face-adjacent to the voxel. Out-of-volume voxels count as background.
bool is_simple_point(const Mask3D& mask, int x, int y, int z);

/// Medial-axis thinning: iterative removal of simple, non-endpoint border
/// points in six directional subiterations per pass (up, down, north, south,
/// east, west), with sequential re-checking at deletion time. The result is a
/// thin centerline subset of the input foreground with the same number of
/// connected components, tunnels and cavities. Deterministic: candidates are
/// processed in ascending linear-index order.
Mask3D skeletonize(const Mask3D& mask);

}  // namespace airwaycl::topo
