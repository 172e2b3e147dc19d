#include "airwaycl/nifti.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "airwaycl/kernels/kernels.hpp"

namespace airwaycl::io {
namespace {

struct Nifti1Header {
  std::int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1, intent_p2, intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max, cal_min;
  float slice_duration;
  float toffset;
  std::int32_t glmax, glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code, sform_code;
  float quatern_b, quatern_c, quatern_d;
  float qoffset_x, qoffset_y, qoffset_z;
  float srow_x[4], srow_y[4], srow_z[4];
  char intent_name[16];
  char magic[4];
};
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must pack to 348 bytes");

constexpr std::int16_t DT_UINT8 = 2;
constexpr std::int16_t DT_INT16 = 4;
constexpr std::int16_t DT_INT32 = 8;
constexpr std::int16_t DT_FLOAT32 = 16;
constexpr std::int16_t DT_FLOAT64 = 64;
constexpr std::int16_t DT_UINT16 = 512;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("nifti: " + path + ": " + what);
}

void swap16(void* p) {
  auto* b = static_cast<std::uint8_t*>(p);
  std::swap(b[0], b[1]);
}
void swap32(void* p) {
  auto* b = static_cast<std::uint8_t*>(p);
  std::swap(b[0], b[3]);
  std::swap(b[1], b[2]);
}
void swap64(void* p) {
  auto* b = static_cast<std::uint8_t*>(p);
  std::swap(b[0], b[7]);
  std::swap(b[1], b[6]);
  std::swap(b[2], b[5]);
  std::swap(b[3], b[4]);
}

void swap_header(Nifti1Header& h) {
  swap32(&h.sizeof_hdr);
  swap32(&h.extents);
  swap16(&h.session_error);
  for (auto& d : h.dim) swap16(&d);
  swap32(&h.intent_p1);
  swap32(&h.intent_p2);
  swap32(&h.intent_p3);
  swap16(&h.intent_code);
  swap16(&h.datatype);
  swap16(&h.bitpix);
  swap16(&h.slice_start);
  for (auto& p : h.pixdim) swap32(&p);
  swap32(&h.vox_offset);
  swap32(&h.scl_slope);
  swap32(&h.scl_inter);
  swap16(&h.slice_end);
  swap32(&h.cal_max);
  swap32(&h.cal_min);
  swap32(&h.slice_duration);
  swap32(&h.toffset);
  swap32(&h.glmax);
  swap32(&h.glmin);
  swap16(&h.qform_code);
  swap16(&h.sform_code);
  swap32(&h.quatern_b);
  swap32(&h.quatern_c);
  swap32(&h.quatern_d);
  swap32(&h.qoffset_x);
  swap32(&h.qoffset_y);
  swap32(&h.qoffset_z);
  for (auto& v : h.srow_x) swap32(&v);
  for (auto& v : h.srow_y) swap32(&v);
  for (auto& v : h.srow_z) swap32(&v);
}

struct GzReader {
  gzFile f = nullptr;
  explicit GzReader(const std::string& path) { f = gzopen(path.c_str(), "rb"); }
  ~GzReader() {
    if (f) gzclose(f);
  }
  GzReader(const GzReader&) = delete;
  GzReader& operator=(const GzReader&) = delete;
  bool read_exact(void* dst, std::size_t n) {
    std::size_t got = 0;
    auto* p = static_cast<std::uint8_t*>(dst);
    while (got < n) {
      const unsigned chunk = unsigned(std::min<std::size_t>(n - got, 1u << 28));
      const int r = gzread(f, p + got, chunk);
      if (r <= 0) return false;
      got += std::size_t(r);
    }
    return true;
  }
  bool skip(std::size_t n) {
    std::uint8_t buf[4096];
    while (n > 0) {
      const std::size_t chunk = std::min(n, sizeof(buf));
      if (!read_exact(buf, chunk)) return false;
      n -= chunk;
    }
    return true;
  }
};

struct Loaded {
  Dims dims;
  Spacing spacing;
  std::vector<float> data;
};

template <typename T>
void convert(const std::vector<std::uint8_t>& raw, bool swapped, std::vector<float>& out) {
  const std::size_t n = out.size();
  const T* src = reinterpret_cast<const T*>(raw.data());
  if (!swapped || sizeof(T) == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = float(src[i]);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    T v = src[i];
    if constexpr (sizeof(T) == 2)
      swap16(&v);
    else if constexpr (sizeof(T) == 4)
      swap32(&v);
    else if constexpr (sizeof(T) == 8)
      swap64(&v);
    out[i] = float(v);
  }
}

Loaded load_raw(const std::string& path) {
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) fail(path, "file not found");
  }
  GzReader in(path);
  if (!in.f) fail(path, "file not found");

  Nifti1Header h{};
  if (!in.read_exact(&h, sizeof(h))) fail(path, "malformed header (short read)");

  bool swapped = false;
  if (h.dim[0] < 1 || h.dim[0] > 7) {
    swapped = true;
    swap_header(h);
    if (h.dim[0] < 1 || h.dim[0] > 7) fail(path, "malformed header (bad dim[0])");
  }
  if (h.sizeof_hdr != 348) fail(path, "malformed header (sizeof_hdr != 348)");
  if (std::strncmp(h.magic, "n+1", 3) != 0 || h.magic[3] != '\0')
    fail(path, "malformed header (bad magic)");

  if (h.dim[0] < 3) fail(path, "non-3D image");
  for (int k = 4; k <= h.dim[0]; ++k)
    if (h.dim[k] > 1) fail(path, "non-3D image (extra dimensions)");
  if (h.dim[1] < 1 || h.dim[2] < 1 || h.dim[3] < 1) fail(path, "malformed header (bad dims)");

  std::size_t bytes_per = 0;
  switch (h.datatype) {
    case DT_UINT8: bytes_per = 1; break;
    case DT_INT16:
    case DT_UINT16: bytes_per = 2; break;
    case DT_INT32:
    case DT_FLOAT32: bytes_per = 4; break;
    case DT_FLOAT64: bytes_per = 8; break;
    default: fail(path, "unsupported datatype " + std::to_string(h.datatype));
  }

  Loaded out;
  out.dims = Dims{h.dim[1], h.dim[2], h.dim[3]};
  auto spac = [&](int k) {
    const double s = std::fabs(double(h.pixdim[k]));
    if (!(s > 0.0) || !std::isfinite(s)) fail(path, "malformed header (bad pixdim)");
    return s;
  };
  out.spacing = Spacing{spac(1), spac(2), spac(3)};

  const std::size_t nvox = std::size_t(out.dims.count());
  std::int64_t offset = std::int64_t(h.vox_offset);
  if (offset < 348) fail(path, "malformed header (bad vox_offset)");
  if (!in.skip(std::size_t(offset - 348))) fail(path, "malformed (truncated before data)");

  std::vector<std::uint8_t> raw(nvox * bytes_per);
  if (!in.read_exact(raw.data(), raw.size())) fail(path, "malformed (truncated data)");

  out.data.resize(nvox);
  switch (h.datatype) {
    case DT_UINT8: convert<std::uint8_t>(raw, swapped, out.data); break;
    case DT_INT16: convert<std::int16_t>(raw, swapped, out.data); break;
    case DT_UINT16: convert<std::uint16_t>(raw, swapped, out.data); break;
    case DT_INT32: convert<std::int32_t>(raw, swapped, out.data); break;
    case DT_FLOAT32: convert<float>(raw, swapped, out.data); break;
    case DT_FLOAT64: {
      const double* src = reinterpret_cast<const double*>(raw.data());
      for (std::size_t i = 0; i < nvox; ++i) {
        double v = src[i];
        if (swapped) swap64(&v);
        out.data[i] = float(v);
      }
      break;
    }
  }

  if (h.scl_slope != 0.0f && (h.scl_slope != 1.0f || h.scl_inter != 0.0f)) {
    for (auto& v : out.data) v = v * h.scl_slope + h.scl_inter;
  }
  return out;
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::vector<std::uint8_t> gzip_deterministic(const std::uint8_t* src, std::size_t n) {
  z_stream zs{};
  if (deflateInit2(&zs, 6, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw std::runtime_error("nifti: deflateInit2 failed");
  gz_header gh{};
  gh.time = 0;  // fixed mtime keeps output bytes reproducible
  gh.os = 3;
  deflateSetHeader(&zs, &gh);

  std::vector<std::uint8_t> out(deflateBound(&zs, uLong(n)));
  zs.next_in = const_cast<std::uint8_t*>(src);
  zs.avail_in = uInt(n);
  zs.next_out = out.data();
  zs.avail_out = uInt(out.size());
  const int r = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (r != Z_STREAM_END) throw std::runtime_error("nifti: deflate failed");
  out.resize(out.size() - zs.avail_out);
  return out;
}

void write_file(const std::string& path, const Nifti1Header& h, const void* voxels,
                std::size_t nbytes) {
  std::vector<std::uint8_t> buf(352 + nbytes, 0);
  std::memcpy(buf.data(), &h, sizeof(h));
  std::memcpy(buf.data() + 352, voxels, nbytes);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  if (ends_with(path, ".gz")) {
    const auto gz = gzip_deterministic(buf.data(), buf.size());
    out.write(reinterpret_cast<const char*>(gz.data()), std::streamsize(gz.size()));
  } else {
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
  }
  if (!out) fail(path, "write failed");
}

Nifti1Header make_header(const Dims& d, const Spacing& s, std::int16_t datatype,
                         std::int16_t bitpix) {
  if (d.nx < 1 || d.ny < 1 || d.nz < 1 || d.nx > 32767 || d.ny > 32767 || d.nz > 32767)
    throw std::invalid_argument("nifti: dims must fit the header's int16 fields");
  Nifti1Header h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  h.dim[1] = std::int16_t(d.nx);
  h.dim[2] = std::int16_t(d.ny);
  h.dim[3] = std::int16_t(d.nz);
  for (int k = 4; k < 8; ++k) h.dim[k] = 1;
  h.datatype = datatype;
  h.bitpix = bitpix;
  h.pixdim[0] = 1.0f;
  h.pixdim[1] = float(s.sx);
  h.pixdim[2] = float(s.sy);
  h.pixdim[3] = float(s.sz);
  h.vox_offset = 352.0f;
  h.scl_slope = 0.0f;
  h.scl_inter = 0.0f;
  h.magic[0] = 'n';
  h.magic[1] = '+';
  h.magic[2] = '1';
  h.magic[3] = '\0';
  return h;
}

}  // namespace

Volume3D load_volume(const std::string& path) {
  Loaded raw = load_raw(path);
  Volume3D v;
  v.dims = raw.dims;
  v.spacing = raw.spacing;
  v.data = std::move(raw.data);
  v.kind = IntensityKind::HU;
  return v;
}

Mask3D load_mask(const std::string& path) {
  Loaded raw = load_raw(path);
  Mask3D m;
  m.dims = raw.dims;
  m.spacing = raw.spacing;
  m.data.resize(raw.data.size());
  kernels::nonzero_to_mask(raw.data.data(), m.data.data(), raw.data.size());
  return m;
}

void save_volume(const Volume3D& vol, const std::string& path) {
  const auto h = make_header(vol.dims, vol.spacing, DT_FLOAT32, 32);
  write_file(path, h, vol.data.data(), vol.data.size() * sizeof(float));
}

void save_mask(const Mask3D& mask, const std::string& path) {
  const auto h = make_header(mask.dims, mask.spacing, DT_UINT8, 8);
  write_file(path, h, mask.data.data(), mask.data.size());
}

std::string scan_id_from_path(const std::string& path) {
  std::string name = path;
  if (const auto pos = name.find_last_of("/\\"); pos != std::string::npos)
    name = name.substr(pos + 1);
  for (const char* suf : {".nii.gz", ".nii", ".gz"}) {
    if (ends_with(name, suf)) {
      name = name.substr(0, name.size() - std::strlen(suf));
      break;
    }
  }
  return name;
}

}  // namespace airwaycl::io
