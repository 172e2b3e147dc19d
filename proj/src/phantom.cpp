#include "airwaycl/phantom.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "airwaycl/rng.hpp"

namespace airwaycl::phantom {
namespace {

double point_segment_dist2(const std::array<double, 3>& p, const TubeSegment& s) {
  const double vx = s.end_mm[0] - s.start_mm[0];
  const double vy = s.end_mm[1] - s.start_mm[1];
  const double vz = s.end_mm[2] - s.start_mm[2];
  const double wx = p[0] - s.start_mm[0];
  const double wy = p[1] - s.start_mm[1];
  const double wz = p[2] - s.start_mm[2];
  const double vv = vx * vx + vy * vy + vz * vz;
  double t = vv > 0.0 ? (wx * vx + wy * vy + wz * vz) / vv : 0.0;
  t = std::min(1.0, std::max(0.0, t));
  const double dx = wx - t * vx, dy = wy - t * vy, dz = wz - t * vz;
  return dx * dx + dy * dy + dz * dz;
}

double segment_length(const TubeSegment& s) {
  const double dx = s.end_mm[0] - s.start_mm[0];
  const double dy = s.end_mm[1] - s.start_mm[1];
  const double dz = s.end_mm[2] - s.start_mm[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

Phantom generate_phantom(const PhantomSpec& spec, std::uint64_t seed) {
  if (spec.segments.empty()) throw std::invalid_argument("phantom: no tube segments");
  for (const auto& s : spec.segments)
    if (!(s.radius_mm > 0.0)) throw std::invalid_argument("phantom: radius must be positive");

  const Dims& d = spec.dims;
  const Spacing& sp = spec.spacing;
  const std::array<double, 3> extent{d.nx * sp.sx, d.ny * sp.sy, d.nz * sp.sz};
  const std::array<double, 3> center{extent[0] / 2, extent[1] / 2, extent[2] / 2};
  const std::array<double, 3> semi{0.48 * extent[0], 0.48 * extent[1], 0.48 * extent[2]};

  // capsules must fit inside the volume box
  for (const auto& s : spec.segments)
    for (const auto& pt : {s.start_mm, s.end_mm})
      for (int a = 0; a < 3; ++a)
        if (pt[a] - s.radius_mm < 0.0 || pt[a] + s.radius_mm > extent[std::size_t(a)])
          throw std::invalid_argument("phantom: segment outside volume");

  Phantom out;
  out.airway = make_mask(d, sp);
  out.lung = make_mask(d, sp);
  out.ct = make_volume(d, sp, float(spec.outside_hu), IntensityKind::HU);

  CounterRng rng(seed, rng_stream::with_index(rng_stream::phantom_noise, 0));

  std::int64_t i = 0;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x, ++i) {
        const std::array<double, 3> p{x * sp.sx, y * sp.sy, z * sp.sz};
        const double ex = (p[0] - center[0]) / semi[0];
        const double ey = (p[1] - center[1]) / semi[1];
        const double ez = (p[2] - center[2]) / semi[2];
        const bool in_lung = ex * ex + ey * ey + ez * ez <= 1.0;

        bool in_airway = false;
        for (const auto& s : spec.segments)
          if (point_segment_dist2(p, s) <= s.radius_mm * s.radius_mm) {
            in_airway = true;
            break;
          }

        if (in_airway) {
          if (!in_lung) throw std::invalid_argument("phantom: segment outside the lung ellipsoid");
          out.airway.data[std::size_t(i)] = 1;
          out.lung.data[std::size_t(i)] = 1;
          out.ct.data[std::size_t(i)] = float(spec.airway_hu);
        } else if (in_lung) {
          out.lung.data[std::size_t(i)] = 1;
          out.ct.data[std::size_t(i)] =
              float(spec.lung_hu + spec.noise_sigma_hu * rng.next_gaussian());
        }
      }

  out.truth.branch_count = int(spec.segments.size());
  for (const auto& s : spec.segments) {
    out.truth.total_length_mm += segment_length(s);
    out.truth.radii_mm.push_back(s.radius_mm);
  }
  return out;
}

std::string truth_to_json(const PhantomTruth& truth) {
  nlohmann::ordered_json j;
  j["branch_count"] = truth.branch_count;
  j["total_length_mm"] = truth.total_length_mm;
  j["radii_mm"] = truth.radii_mm;
  return j.dump(2) + "\n";
}

PhantomSpec straight_tube_spec(double length_mm, double radius_mm, Dims dims, Spacing spacing) {
  PhantomSpec spec;
  spec.dims = dims;
  spec.spacing = spacing;
  const double cx = dims.nx * spacing.sx / 2;
  const double cy = dims.ny * spacing.sy / 2;
  const double cz = dims.nz * spacing.sz / 2;
  spec.segments.push_back(
      {{cx, cy, cz - length_mm / 2}, {cx, cy, cz + length_mm / 2}, radius_mm});
  return spec;
}

PhantomSpec y_spec(Dims dims, Spacing spacing) {
  PhantomSpec spec;
  spec.dims = dims;
  spec.spacing = spacing;
  const double cx = dims.nx * spacing.sx / 2;
  const double cy = dims.ny * spacing.sy / 2;
  const double cz = dims.nz * spacing.sz / 2;
  const std::array<double, 3> hub{cx, cy, cz - 6.0};
  const double arm = 26.0, stem = 24.0, r = 2.0;
  const double ax = arm * std::sin(0.7), az = arm * std::cos(0.7);  // ~40 degrees
  spec.segments.push_back({hub, {cx, cy, hub[2] - stem}, r});
  spec.segments.push_back({hub, {cx - ax, cy, hub[2] + az}, r});
  spec.segments.push_back({hub, {cx + ax, cy, hub[2] + az}, r});
  return spec;
}

PhantomSpec bifurcating_tree_spec(int levels, Dims dims, Spacing spacing) {
  if (levels < 1 || levels > 5)
    throw std::invalid_argument("bifurcating_tree_spec: levels must be in [1, 5]");
  PhantomSpec spec;
  spec.dims = dims;
  spec.spacing = spacing;
  const double cx = dims.nx * spacing.sx / 2;
  const double cy = dims.ny * spacing.sy / 2;
  const double top = dims.nz * spacing.sz - 8.0;

  struct Stub {
    std::array<double, 3> from;
    double angle;  // direction from -z, in the x-z plane
    int level;
  };
  std::vector<Stub> queue{{{cx, cy, top}, 0.0, 0}};
  double len = 30.0, radius = 2.4;
  std::vector<double> level_len, level_radius;
  for (int l = 0; l < levels; ++l) {
    level_len.push_back(len);
    level_radius.push_back(radius);
    len *= 0.72;
    radius *= 0.78;
  }

  while (!queue.empty()) {
    const Stub s = queue.back();
    queue.pop_back();
    const double L = level_len[std::size_t(s.level)];
    const double R = level_radius[std::size_t(s.level)];
    const std::array<double, 3> to{s.from[0] + L * std::sin(s.angle), s.from[1],
                                   s.from[2] - L * std::cos(s.angle)};
    spec.segments.push_back({s.from, to, R});
    if (s.level + 1 < levels) {
      const double spread = 0.62;  // ~35.5 degrees per child
      queue.push_back({to, s.angle - spread, s.level + 1});
      queue.push_back({to, s.angle + spread, s.level + 1});
    }
  }
  return spec;
}

}  // namespace airwaycl::phantom
