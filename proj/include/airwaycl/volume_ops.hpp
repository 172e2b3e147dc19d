#pragma once

#include <cstdint>
#include <utility>

#include "airwaycl/types.hpp"

namespace airwaycl::volume {

/// Maps each HU value v to (clamp(v, lo, hi) - lo) / (hi - lo).
/// Requires an HU-kind input and lo < hi; the result is Normalized.
Volume3D clip_and_scale(const Volume3D& vol, float lo = -1000.0f, float hi = 600.0f);

/// Tight box around the mask foreground, extended by apex_pad slices in +z
/// (the superior direction of a conventional axial stack) and clamped to the
/// volume. Throws on an empty mask.
BoundingBox lung_bounding_box(const Mask3D& lung_mask, int apex_pad,
                              bool superior_is_positive_z = true);

Volume3D crop(const Volume3D& vol, const BoundingBox& box);
Mask3D crop(const Mask3D& mask, const BoundingBox& box);

struct PatchResult {
  Volume3D patch;
  /// Source region in the sampled volume. When the input was smaller than the
  /// patch and had to be zero-padded, coordinates refer to the padded volume.
  BoundingBox source_box;
  bool padded = false;
};

/// Seeded uniform patch extraction. The origin is drawn per axis (x, then y,
/// then z) from CounterRng stream rng_stream::patch_origin, so a given seed
/// always yields the same patch. Volumes smaller than the patch are
/// symmetrically zero-padded to patch size before origin sampling.
PatchResult random_patch(const Volume3D& vol, Dims size, std::uint64_t seed);

}  // namespace airwaycl::volume
