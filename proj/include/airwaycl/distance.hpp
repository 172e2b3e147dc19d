#pragma once

#include <vector>

#include "airwaycl/types.hpp"

namespace airwaycl::topo {

/// Per-voxel Euclidean distance (mm) to the nearest background voxel center,
/// 0 on background. Everything outside the volume box counts as background,
/// so all-foreground masks still get finite distances. Exact under
/// anisotropic spacing (separable squared-distance transform per axis).
struct DistanceField {
  Dims dims;
  Spacing spacing;
  std::vector<double> data;

  double at(int x, int y, int z) const { return data[std::size_t(linear_index(dims, x, y, z))]; }
};

DistanceField distance_transform(const Mask3D& mask);

/// Squared Euclidean distance (mm^2) from every voxel to the nearest seed
/// voxel center; +inf where no seed exists. No implicit exterior here.
std::vector<double> squared_distance_to_seeds(const Dims& dims, const Spacing& spacing,
                                              const std::vector<std::uint8_t>& seeds);

}  // namespace airwaycl::topo
