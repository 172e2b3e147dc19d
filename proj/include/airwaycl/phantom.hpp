#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "airwaycl/types.hpp"

namespace airwaycl::phantom {

struct TubeSegment {
  std::array<double, 3> start_mm{};
  std::array<double, 3> end_mm{};
  double radius_mm = 1.0;
};

/// Synthetic airway phantom: a union of capsule tubes inside an ellipsoidal
/// lung, with a textured CT volume around them. Oracle source for the
/// topology and metric tests.
struct PhantomSpec {
  Dims dims{64, 64, 64};
  Spacing spacing{1.0, 1.0, 1.0};
  std::vector<TubeSegment> segments;
  double noise_sigma_hu = 40.0;  // Gaussian texture of the lung parenchyma
  double lung_hu = -850.0;
  double airway_hu = -1000.0;
  double outside_hu = 40.0;
};

struct PhantomTruth {
  int branch_count = 0;
  double total_length_mm = 0.0;
  std::vector<double> radii_mm;
};

struct Phantom {
  Volume3D ct;
  Mask3D airway;
  Mask3D lung;
  PhantomTruth truth;
};

/// Rasterizes the tubes (air lumen), an enclosing ellipsoid (lung) and a CT
/// volume with seeded parenchyma noise. Throws when a segment capsule leaves
/// the volume or the lung ellipsoid.
Phantom generate_phantom(const PhantomSpec& spec, std::uint64_t seed);

std::string truth_to_json(const PhantomTruth& truth);

/// Axis-aligned tube along z, centered in the volume.
PhantomSpec straight_tube_spec(double length_mm = 80.0, double radius_mm = 2.0,
                               Dims dims = {48, 48, 104}, Spacing spacing = {1, 1, 1});

/// Three arms meeting at one point: a stem down and two arms up at an angle.
PhantomSpec y_spec(Dims dims = {72, 48, 80}, Spacing spacing = {1, 1, 1});

/// Symmetric binary tree with `levels` levels (levels=3 gives 7 tubes).
PhantomSpec bifurcating_tree_spec(int levels = 3, Dims dims = {96, 48, 96},
                                  Spacing spacing = {1, 1, 1});

}  // namespace airwaycl::phantom
