#pragma once

#include <string>

#include "airwaycl/types.hpp"

// NIfTI-1 single-file reader/writer (.nii, .nii.gz). Little- and big-endian
// files are handled via the dim[0] in [1,7] heuristic; gzip is detected by
// the 0x1f 0x8b magic. Data is interpreted in stored voxel order and only the
// pixdim spacing is consumed from the geometry fields.

namespace airwaycl::io {

/// Accepted datatypes: uint8, int16, uint16, int32, float32, float64.
/// scl_slope/scl_inter rescaling is applied when scl_slope != 0.
/// Throws std::runtime_error on missing file, malformed header, truncated
/// data, unsupported datatype, or a non-3D image.
Volume3D load_volume(const std::string& path);

/// As load_volume; any nonzero voxel becomes 1.
Mask3D load_mask(const std::string& path);

/// Writes float32 voxels. Paths ending in .gz are gzip-compressed with a
/// fixed stream header (mtime 0), so identical inputs give identical bytes.
void save_volume(const Volume3D& vol, const std::string& path);

/// Writes uint8 voxels.
void save_mask(const Mask3D& mask, const std::string& path);

/// "name" for /a/b/name.nii.gz (file name with .nii/.nii.gz/.gz stripped).
std::string scan_id_from_path(const std::string& path);

}  // namespace airwaycl::io
