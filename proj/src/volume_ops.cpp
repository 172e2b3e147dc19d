#include "airwaycl/volume_ops.hpp"

#include <algorithm>
#include <stdexcept>

#include "airwaycl/kernels/kernels.hpp"
#include "airwaycl/rng.hpp"

namespace airwaycl::volume {
namespace {

template <typename Vox>
void copy_box(const std::vector<Vox>& src, const Dims& sd, std::vector<Vox>& dst,
              const BoundingBox& box) {
  const Dims ext = box.extents();
  dst.resize(std::size_t(ext.count()));
  for (int z = 0; z < ext.nz; ++z)
    for (int y = 0; y < ext.ny; ++y) {
      const auto src_row = linear_index(sd, box.lo[0], box.lo[1] + y, box.lo[2] + z);
      const auto dst_row = linear_index(ext, 0, y, z);
      std::copy_n(src.begin() + src_row, ext.nx, dst.begin() + dst_row);
    }
}

void require_box(const Dims& d, const BoundingBox& box) {
  if (!box.valid_within(d)) throw std::invalid_argument("crop: box out of range");
}

}  // namespace

Volume3D clip_and_scale(const Volume3D& vol, float lo, float hi) {
  if (vol.kind != IntensityKind::HU)
    throw std::invalid_argument("clip_and_scale: input must be HU intensities");
  if (!(lo < hi)) throw std::invalid_argument("clip_and_scale: lo must be < hi");
  Volume3D out;
  out.dims = vol.dims;
  out.spacing = vol.spacing;
  out.kind = IntensityKind::Normalized;
  out.data.resize(vol.data.size());
  kernels::clip_scale(vol.data.data(), out.data.data(), vol.data.size(), lo, hi);
  return out;
}

BoundingBox lung_bounding_box(const Mask3D& lung_mask, int apex_pad, bool superior_is_positive_z) {
  const Dims& d = lung_mask.dims;
  BoundingBox box{{d.nx, d.ny, d.nz}, {-1, -1, -1}};
  std::int64_t i = 0;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x, ++i) {
        if (!lung_mask.data[std::size_t(i)]) continue;
        box.lo[0] = std::min(box.lo[0], x);
        box.lo[1] = std::min(box.lo[1], y);
        box.lo[2] = std::min(box.lo[2], z);
        box.hi[0] = std::max(box.hi[0], x);
        box.hi[1] = std::max(box.hi[1], y);
        box.hi[2] = std::max(box.hi[2], z);
      }
  if (box.hi[0] < 0) throw std::invalid_argument("lung_bounding_box: empty mask");
  if (superior_is_positive_z)
    box.hi[2] = std::min(d.nz - 1, box.hi[2] + apex_pad);
  else
    box.lo[2] = std::max(0, box.lo[2] - apex_pad);
  return box;
}

Volume3D crop(const Volume3D& vol, const BoundingBox& box) {
  require_box(vol.dims, box);
  Volume3D out;
  out.dims = box.extents();
  out.spacing = vol.spacing;
  out.kind = vol.kind;
  copy_box(vol.data, vol.dims, out.data, box);
  return out;
}

Mask3D crop(const Mask3D& mask, const BoundingBox& box) {
  require_box(mask.dims, box);
  Mask3D out;
  out.dims = box.extents();
  out.spacing = mask.spacing;
  copy_box(mask.data, mask.dims, out.data, box);
  return out;
}

PatchResult random_patch(const Volume3D& vol, Dims size, std::uint64_t seed) {
  if (size.nx < 1 || size.ny < 1 || size.nz < 1)
    throw std::invalid_argument("random_patch: patch size must be positive");

  const Volume3D* src = &vol;
  Volume3D padded;
  bool was_padded = false;
  if (vol.dims.nx < size.nx || vol.dims.ny < size.ny || vol.dims.nz < size.nz) {
    const Dims pd{std::max(vol.dims.nx, size.nx), std::max(vol.dims.ny, size.ny),
                  std::max(vol.dims.nz, size.nz)};
    padded = make_volume(pd, vol.spacing, 0.0f, vol.kind);
    const int ox = (pd.nx - vol.dims.nx) / 2;
    const int oy = (pd.ny - vol.dims.ny) / 2;
    const int oz = (pd.nz - vol.dims.nz) / 2;
    for (int z = 0; z < vol.dims.nz; ++z)
      for (int y = 0; y < vol.dims.ny; ++y) {
        const auto s = linear_index(vol.dims, 0, y, z);
        const auto t = linear_index(pd, ox, oy + y, oz + z);
        std::copy_n(vol.data.begin() + s, vol.dims.nx, padded.data.begin() + t);
      }
    src = &padded;
    was_padded = true;
  }

  CounterRng rng(seed, rng_stream::patch_origin);
  const int ox = int(rng.next_below(std::uint64_t(src->dims.nx - size.nx + 1)));
  const int oy = int(rng.next_below(std::uint64_t(src->dims.ny - size.ny + 1)));
  const int oz = int(rng.next_below(std::uint64_t(src->dims.nz - size.nz + 1)));

  BoundingBox box{{ox, oy, oz}, {ox + size.nx - 1, oy + size.ny - 1, oz + size.nz - 1}};
  PatchResult res;
  res.patch = crop(*src, box);
  res.source_box = box;
  res.padded = was_padded;
  return res;
}

}  // namespace airwaycl::volume
