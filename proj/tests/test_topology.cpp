#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "airwaycl/components.hpp"
#include "airwaycl/distance.hpp"
#include "airwaycl/graph.hpp"
#include "airwaycl/phantom.hpp"
#include "airwaycl/rng.hpp"
#include "airwaycl/skeleton.hpp"
#include "oracles.hpp"

using namespace airwaycl;

namespace {

Mask3D random_mask(Dims d, Spacing s, std::uint64_t seed, double density) {
  Mask3D m = make_mask(d, s);
  CounterRng rng(seed, 950);
  for (auto& v : m.data) v = rng.next_unit() < density ? 1 : 0;
  return m;
}

Mask3D pad_by_one(const Mask3D& m) {
  Mask3D out = make_mask(Dims{m.dims.nx + 2, m.dims.ny + 2, m.dims.nz + 2}, m.spacing);
  for (int z = 0; z < m.dims.nz; ++z)
    for (int y = 0; y < m.dims.ny; ++y)
      for (int x = 0; x < m.dims.nx; ++x)
        out.at(x + 1, y + 1, z + 1) = m.at(x, y, z);
  return out;
}

Mask3D complement(const Mask3D& m) {
  Mask3D out = m;
  for (auto& v : out.data) v = v ? 0 : 1;
  return out;
}

void check_topology_preserved(const Mask3D& mask, const Mask3D& skel) {
  // skeleton is a subset of the input foreground
  for (std::size_t i = 0; i < mask.data.size(); ++i)
    if (skel.data[i]) REQUIRE(mask.data[i] == 1);
  // foreground components (26), background components (6, with the exterior
  // as one region via padding), and the Euler characteristic all match
  CHECK(topo::component_count(skel, 26) == topo::component_count(mask, 26));
  CHECK(topo::component_count(complement(pad_by_one(skel)), 6) ==
        topo::component_count(complement(pad_by_one(mask)), 6));
  CHECK(topo::euler_characteristic(skel) == topo::euler_characteristic(mask));
}

}  // namespace

// ---------------------------------------------------------------------------
// distance transform
// ---------------------------------------------------------------------------

TEST_CASE("distance transform basic values") {
  SUBCASE("single foreground voxel") {
    Mask3D m = make_mask(Dims{5, 5, 5}, Spacing{1, 1, 1});
    m.at(2, 2, 2) = 1;
    const auto d = topo::distance_transform(m);
    CHECK(d.at(2, 2, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.at(0, 0, 0) == 0.0);
  }
  SUBCASE("5x5x5 solid cube center distance is 3") {
    Mask3D m = make_mask(Dims{5, 5, 5}, Spacing{1, 1, 1}, 1);
    const auto d = topo::distance_transform(m);
    const auto ref = oracle::distance_transform_bruteforce(m);
    CHECK(d.at(2, 2, 2) == doctest::Approx(3.0).epsilon(1e-12));
    for (std::size_t i = 0; i < ref.size(); ++i)
      CHECK(d.data[i] == doctest::Approx(ref[i]).epsilon(0).scale(1).epsilon(1e-9));
  }
  SUBCASE("anisotropic z pair") {
    Mask3D m = make_mask(Dims{5, 5, 5}, Spacing{1, 1, 2});
    m.at(2, 2, 2) = 1;
    m.at(2, 2, 3) = 1;
    const auto d = topo::distance_transform(m);
    const auto ref = oracle::distance_transform_bruteforce(m);
    for (std::size_t i = 0; i < ref.size(); ++i)
      CHECK(std::fabs(d.data[i] - ref[i]) < 1e-9);
  }
}

TEST_CASE("distance transform equals the brute-force oracle on random masks") {
  CounterRng dims_rng(2024, 1);
  for (int trial = 0; trial < 25; ++trial) {
    const Dims d{int(3 + dims_rng.next_below(10)), int(3 + dims_rng.next_below(10)),
                 int(3 + dims_rng.next_below(10))};
    const Spacing s{0.5 + dims_rng.next_unit() * 2.0, 0.5 + dims_rng.next_unit() * 2.0,
                    0.5 + dims_rng.next_unit() * 2.0};
    const auto m = random_mask(d, s, std::uint64_t(trial), 0.3 + 0.5 * dims_rng.next_unit());
    const auto dt = topo::distance_transform(m);
    const auto ref = oracle::distance_transform_bruteforce(m);
    double max_err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
      max_err = std::max(max_err, std::fabs(dt.data[i] - ref[i]));
    CHECK(max_err < 1e-9);
  }
}

TEST_CASE("distance transform is 1-Lipschitz on the lattice metric") {
  const auto m = random_mask(Dims{10, 10, 10}, Spacing{0.8, 1.0, 1.3}, 99, 0.6);
  const auto d = topo::distance_transform(m);
  const auto& offs = topo::neighbor_offsets(26);
  for (int z = 0; z < 10; ++z)
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) {
        if (!m.at(x, y, z)) continue;
        for (const auto& o : offs) {
          const int nx = x + o[0], ny = y + o[1], nz = z + o[2];
          if (!m.dims.contains(nx, ny, nz)) continue;
          const double step = std::sqrt(o[0] * o[0] * 0.8 * 0.8 + o[1] * o[1] * 1.0 +
                                        o[2] * o[2] * 1.3 * 1.3);
          CHECK(d.at(x, y, z) <= d.at(nx, ny, nz) + step + 1e-9);
        }
      }
}

// ---------------------------------------------------------------------------
// connected components
// ---------------------------------------------------------------------------

TEST_CASE("largest_component") {
  Mask3D m = make_mask(Dims{10, 4, 4}, Spacing{1, 1, 1});
  for (int x = 0; x < 10; ++x) m.at(x, 0, 0) = 1;           // 10-voxel line
  for (int x = 0; x < 3; ++x) m.at(x, 3, 3) = 1;            // 3-voxel line
  const auto lc = topo::largest_component(m, 26);
  CHECK(std::count(lc.data.begin(), lc.data.end(), 1) == 10);
  CHECK(lc.at(0, 0, 0) == 1);
  CHECK(lc.at(0, 3, 3) == 0);

  SUBCASE("idempotent") {
    const auto again = topo::largest_component(lc, 26);
    CHECK(again.data == lc.data);
  }
  SUBCASE("single component is identity") {
    Mask3D one = make_mask(Dims{4, 4, 4}, Spacing{1, 1, 1});
    one.at(1, 1, 1) = one.at(2, 1, 1) = 1;
    CHECK(topo::largest_component(one, 26).data == one.data);
  }
  SUBCASE("empty in, empty out") {
    Mask3D e = make_mask(Dims{3, 3, 3}, Spacing{1, 1, 1});
    const auto out = topo::largest_component(e, 26);
    CHECK(std::count(out.data.begin(), out.data.end(), 1) == 0);
  }
  SUBCASE("diagonal voxels: one 26-component, two 6-components") {
    Mask3D d2 = make_mask(Dims{4, 4, 4}, Spacing{1, 1, 1});
    d2.at(1, 1, 1) = 1;
    d2.at(2, 2, 2) = 1;
    CHECK(topo::component_count(d2, 26) == 1);
    CHECK(topo::component_count(d2, 6) == 2);
    CHECK(oracle::component_count_bruteforce(d2, 26) == 1);
    CHECK(oracle::component_count_bruteforce(d2, 6) == 2);
    const auto keep26 = topo::largest_component(d2, 26);
    CHECK(std::count(keep26.data.begin(), keep26.data.end(), 1) == 2);
    const auto keep6 = topo::largest_component(d2, 6);
    CHECK(std::count(keep6.data.begin(), keep6.data.end(), 1) == 1);
    CHECK(keep6.at(1, 1, 1) == 1);  // tie broken by smallest linear index
  }
  SUBCASE("component count matches the flood-fill oracle on random masks") {
    for (int t = 0; t < 10; ++t) {
      const auto r = random_mask(Dims{7, 7, 7}, Spacing{1, 1, 1}, 300 + std::uint64_t(t), 0.35);
      CHECK(topo::component_count(r, 26) == oracle::component_count_bruteforce(r, 26));
      CHECK(topo::component_count(r, 6) == oracle::component_count_bruteforce(r, 6));
    }
  }
}

TEST_CASE("euler characteristic of canonical shapes") {
  SUBCASE("single voxel and solid blocks are balls") {
    Mask3D m = make_mask(Dims{4, 4, 4}, Spacing{1, 1, 1});
    m.at(1, 1, 1) = 1;
    CHECK(topo::euler_characteristic(m) == 1);
    Mask3D solid = make_mask(Dims{4, 4, 4}, Spacing{1, 1, 1}, 1);
    CHECK(topo::euler_characteristic(solid) == 1);
  }
  SUBCASE("hollow cube has a cavity (chi = 2)") {
    Mask3D m = make_mask(Dims{5, 5, 5}, Spacing{1, 1, 1}, 1);
    m.at(2, 2, 2) = 0;
    CHECK(topo::euler_characteristic(m) == 2);
  }
  SUBCASE("square ring is a torus-like loop (chi = 0)") {
    Mask3D m = make_mask(Dims{5, 5, 3}, Spacing{1, 1, 1});
    for (int x = 0; x < 4; ++x) {
      m.at(x, 0, 1) = 1;
      m.at(x + 1, 4, 1) = 1;
    }
    for (int y = 0; y < 4; ++y) {
      m.at(0, y + 1, 1) = 1;
      m.at(4, y, 1) = 1;
    }
    CHECK(topo::component_count(m, 26) == 1);
    CHECK(topo::euler_characteristic(m) == 0);
  }
}

// ---------------------------------------------------------------------------
// skeletonization
// ---------------------------------------------------------------------------

TEST_CASE("skeletonize fixed points and empties") {
  SUBCASE("empty mask") {
    Mask3D e = make_mask(Dims{6, 6, 6}, Spacing{1, 1, 1});
    const auto s = topo::skeletonize(e);
    CHECK(std::count(s.data.begin(), s.data.end(), 1) == 0);
  }
  SUBCASE("a thin straight line is already a skeleton") {
    Mask3D m = make_mask(Dims{14, 5, 5}, Spacing{1, 1, 1});
    for (int x = 2; x < 12; ++x) m.at(x, 2, 2) = 1;
    const auto s = topo::skeletonize(m);
    CHECK(s.data == m.data);
  }
  SUBCASE("a single voxel survives") {
    Mask3D m = make_mask(Dims{4, 4, 4}, Spacing{1, 1, 1});
    m.at(2, 2, 2) = 1;
    const auto s = topo::skeletonize(m);
    CHECK(std::count(s.data.begin(), s.data.end(), 1) == 1);
    CHECK(s.at(2, 2, 2) == 1);
  }
}

TEST_CASE("skeletonize preserves topology on random blobs") {
  for (int t = 0; t < 12; ++t) {
    // union of random balls gives connected-ish blobby masks with occasional
    // tunnels and cavities
    Mask3D m = make_mask(Dims{14, 14, 14}, Spacing{1, 1, 1});
    CounterRng rng(4000 + std::uint64_t(t), 7);
    const int balls = 3 + int(rng.next_below(4));
    for (int b = 0; b < balls; ++b) {
      const int cx = 2 + int(rng.next_below(10));
      const int cy = 2 + int(rng.next_below(10));
      const int cz = 2 + int(rng.next_below(10));
      const double r = 1.5 + 2.0 * rng.next_unit();
      for (int z = 0; z < 14; ++z)
        for (int y = 0; y < 14; ++y)
          for (int x = 0; x < 14; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) + (z - cz) * (z - cz) <= r * r)
              m.at(x, y, z) = 1;
    }
    check_topology_preserved(m, topo::skeletonize(m));
  }
}

TEST_CASE("skeletonize preserves tunnels and cavities") {
  SUBCASE("thick torus keeps its tunnel (chi = 0)") {
    Mask3D m = make_mask(Dims{24, 24, 9}, Spacing{1, 1, 1});
    const double cx = 11.5, cy = 11.5, cz = 4.0, R = 7.0, r = 2.2;
    for (int z = 0; z < 9; ++z)
      for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 24; ++x) {
          const double rad = std::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy));
          const double d2 = (rad - R) * (rad - R) + (z - cz) * (z - cz);
          if (d2 <= r * r) m.at(x, y, z) = 1;
        }
    REQUIRE(topo::component_count(m, 26) == 1);
    REQUIRE(topo::euler_characteristic(m) == 0);
    const auto s = topo::skeletonize(m);
    CHECK(topo::euler_characteristic(s) == 0);
    CHECK(topo::component_count(s, 26) == 1);
  }
  SUBCASE("hollow ball keeps its cavity (chi = 2)") {
    Mask3D m = make_mask(Dims{19, 19, 19}, Spacing{1, 1, 1});
    const double c = 9.0;
    for (int z = 0; z < 19; ++z)
      for (int y = 0; y < 19; ++y)
        for (int x = 0; x < 19; ++x) {
          const double d2 = (x - c) * (x - c) + (y - c) * (y - c) + (z - c) * (z - c);
          if (d2 >= 4.0 * 4.0 && d2 <= 7.5 * 7.5) m.at(x, y, z) = 1;
        }
    REQUIRE(topo::component_count(m, 26) == 1);
    REQUIRE(topo::euler_characteristic(m) == 2);
    const auto s = topo::skeletonize(m);
    CHECK(topo::euler_characteristic(s) == 2);
    CHECK(topo::component_count(s, 26) == 1);
  }
}

TEST_CASE("skeletonize is idempotent") {
  for (const std::uint64_t seed : {51ull, 52ull}) {
    const auto ph = phantom::generate_phantom(phantom::y_spec(), seed);
    const auto once = topo::skeletonize(ph.airway);
    const auto twice = topo::skeletonize(once);
    CHECK(twice.data == once.data);
  }
}

TEST_CASE("skeletonize a solid cylinder to a near-axis single path") {
  const auto spec = phantom::straight_tube_spec(20, 3, Dims{32, 32, 40});
  const auto ph = phantom::generate_phantom(spec, 1);
  const auto skel = topo::skeletonize(ph.airway);
  check_topology_preserved(ph.airway, skel);

  // every skeleton voxel lies within one voxel of the cylinder axis
  const double ax = 32 / 2.0, ay = 32 / 2.0;
  for (int z = 0; z < 40; ++z)
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x)
        if (skel.at(x, y, z)) {
          CHECK(std::fabs(x - ax) <= 1.0);
          CHECK(std::fabs(y - ay) <= 1.0);
        }

  const auto g = topo::build_graph(skel, topo::distance_transform(ph.airway));
  CHECK(g.branches.size() == 1);
  int endpoints = 0;
  for (const auto& n : g.nodes) endpoints += n.kind == topo::NodeKind::endpoint;
  CHECK(endpoints == 2);
}

// ---------------------------------------------------------------------------
// graph construction
// ---------------------------------------------------------------------------

TEST_CASE("build_graph on a straight 10-voxel line") {
  Mask3D m = make_mask(Dims{14, 3, 3}, Spacing{1, 1, 1});
  for (int x = 2; x < 12; ++x) m.at(x, 1, 1) = 1;
  const auto g = topo::build_graph(m, topo::distance_transform(m));
  REQUIRE(g.branches.size() == 1);
  CHECK(g.branches[0].length_mm == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(g.branches[0].path.size() == 10);
  REQUIRE(g.nodes.size() == 2);
  CHECK(g.nodes[0].kind == topo::NodeKind::endpoint);
  CHECK(g.nodes[1].kind == topo::NodeKind::endpoint);
  CHECK(topo::tree_length(g) == doctest::Approx(9.0));
  CHECK(g.voxels.size() == 10);
}

TEST_CASE("build_graph on a thin voxel Y") {
  // stem down in -z, two diagonal arms up
  Mask3D m = make_mask(Dims{16, 5, 16}, Spacing{1, 1, 1});
  const int cx = 8, cy = 2, cz = 7;
  for (int k = 1; k <= 5; ++k) m.at(cx, cy, cz - k) = 1;
  for (int k = 1; k <= 5; ++k) m.at(cx - k, cy, cz + k) = 1;
  for (int k = 1; k <= 5; ++k) m.at(cx + k, cy, cz + k) = 1;
  m.at(cx, cy, cz) = 1;
  const auto g = topo::build_graph(m, topo::distance_transform(m));
  CHECK(g.branches.size() == 3);
  int endpoints = 0, bifurcations = 0;
  for (const auto& n : g.nodes)
    (n.kind == topo::NodeKind::endpoint ? endpoints : bifurcations)++;
  CHECK(endpoints == 3);
  CHECK(bifurcations == 1);

  // handshake: sum of incident branch counts = 2 x branches
  std::vector<int> incident(g.nodes.size(), 0);
  for (const auto& br : g.branches) {
    ++incident[std::size_t(br.node_a)];
    ++incident[std::size_t(br.node_b)];
  }
  int total = 0;
  for (const int c : incident) total += c;
  CHECK(total == 2 * int(g.branches.size()));

  // diagonal arms: length per step is sqrt(2)
  double len = topo::tree_length(g);
  CHECK(len == doctest::Approx(5.0 + 2 * 5.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("build_graph absorbs single-voxel nubs into the junction cluster") {
  // a long line with a single-voxel nub: the nub touches three line voxels,
  // so all four merge into one junction cluster
  Mask3D m = make_mask(Dims{16, 5, 5}, Spacing{1, 1, 1});
  for (int x = 2; x < 14; ++x) m.at(x, 2, 2) = 1;
  m.at(8, 3, 2) = 1;  // nub
  const auto g = topo::build_graph(m, topo::distance_transform(m));
  // the degree-2 junction is spliced through, leaving one clean branch
  CHECK(g.branches.size() == 1);
  CHECK(g.branches[0].path.size() == 12);
  for (const auto& n : g.nodes) CHECK(n.kind == topo::NodeKind::endpoint);
  CHECK(g.voxels.size() == 12);  // the nub voxel left the skeleton

  SUBCASE("without pruning the cluster stays, split into two branches") {
    const auto raw = topo::build_graph(m, topo::distance_transform(m), false);
    CHECK(raw.branches.size() == 2);
    CHECK(raw.voxels.size() == 13);
  }
}

TEST_CASE("build_graph prunes short spur branches once") {
  // a two-voxel spur hanging off the line: a real branch ending at an
  // endpoint, one step long, pruned by the spur rule
  Mask3D m = make_mask(Dims{16, 6, 5}, Spacing{1, 1, 1});
  for (int x = 2; x < 14; ++x) m.at(x, 2, 2) = 1;
  m.at(8, 3, 2) = 1;
  m.at(8, 4, 2) = 1;
  const auto g = topo::build_graph(m, topo::distance_transform(m));
  CHECK(g.branches.size() == 1);
  CHECK(g.voxels.size() == 12);
  for (const auto& n : g.nodes) CHECK(n.kind == topo::NodeKind::endpoint);

  SUBCASE("unpruned keeps the spur") {
    const auto raw = topo::build_graph(m, topo::distance_transform(m), false);
    CHECK(raw.branches.size() == 3);
    CHECK(raw.voxels.size() == 14);
  }
}

TEST_CASE("build_graph keeps two-voxel components intact") {
  Mask3D m = make_mask(Dims{5, 5, 5}, Spacing{1, 1, 1});
  m.at(1, 1, 1) = 1;
  m.at(2, 1, 1) = 1;
  const auto g = topo::build_graph(m, topo::distance_transform(m));
  CHECK(g.branches.size() == 1);
  CHECK(g.branches[0].path.size() == 2);
  CHECK(g.nodes.size() == 2);
}

TEST_CASE("build_graph closes pure cycles with a synthetic junction") {
  // diamond ring |dx|+|dy| = 2: eight voxels, each with exactly two diagonal
  // neighbors, so there are no natural nodes anywhere
  Mask3D m = make_mask(Dims{7, 7, 3}, Spacing{1, 1, 1});
  const int cx = 3, cy = 3;
  for (int dx = -2; dx <= 2; ++dx)
    for (int dy = -2; dy <= 2; ++dy)
      if (std::abs(dx) + std::abs(dy) == 2) m.at(cx + dx, cy + dy, 1) = 1;
  REQUIRE(topo::component_count(m, 26) == 1);
  const auto g = topo::build_graph(m, topo::distance_transform(m));
  REQUIRE(g.branches.size() == 1);
  REQUIRE(g.nodes.size() == 1);
  CHECK(g.branches[0].node_a == g.branches[0].node_b);
  CHECK(g.branches[0].path.front() == g.branches[0].path.back());  // closed walk
  CHECK(g.branches[0].path.size() == 9);                           // 8 voxels + repeat
  CHECK(g.branches[0].length_mm == doctest::Approx(8.0 * std::sqrt(2.0)).epsilon(1e-9));
  CHECK(g.voxels.size() == 8);
}

TEST_CASE("branch diameters come from the distance field") {
  const auto spec = phantom::straight_tube_spec(40, 3, Dims{24, 24, 56});
  const auto ph = phantom::generate_phantom(spec, 3);
  const auto g = topo::build_graph(topo::skeletonize(ph.airway),
                                   topo::distance_transform(ph.airway));
  REQUIRE(g.branches.size() == 1);
  // inscribed-sphere diameter of a radius-3 tube: close to 6 mm away from the
  // caps; the mean over the path sits a little under
  CHECK(g.branches[0].mean_diameter_mm > 4.5);
  CHECK(g.branches[0].mean_diameter_mm < 7.5);
}

TEST_CASE("empty skeleton gives an empty graph") {
  Mask3D e = make_mask(Dims{4, 4, 4}, Spacing{1, 1, 1});
  const auto g = topo::build_graph(e, topo::distance_transform(e));
  CHECK(g.empty());
  CHECK(g.branches.empty());
  CHECK(g.nodes.empty());
  CHECK(topo::tree_length(g) == 0.0);
}

// ---------------------------------------------------------------------------
// phantom-driven acceptance-style checks
// ---------------------------------------------------------------------------

TEST_CASE("phantom tube, Y and tree recover the generated structure") {
  SUBCASE("straight tube: one branch, length within 5 percent") {
    const auto ph = phantom::generate_phantom(phantom::straight_tube_spec(), 11);
    const auto skel = topo::skeletonize(ph.airway);
    check_topology_preserved(ph.airway, skel);
    const auto g = topo::build_graph(skel, topo::distance_transform(ph.airway));
    CHECK(g.branches.size() == 1);
    CHECK(topo::tree_length(g) ==
          doctest::Approx(ph.truth.total_length_mm).epsilon(0.05));
  }
  SUBCASE("Y phantom: 3 branches, 1 bifurcation, 3 endpoints") {
    const auto ph = phantom::generate_phantom(phantom::y_spec(), 12);
    const auto skel = topo::skeletonize(ph.airway);
    check_topology_preserved(ph.airway, skel);
    const auto g = topo::build_graph(skel, topo::distance_transform(ph.airway));
    CHECK(g.branches.size() == 3);
    int endpoints = 0, bifs = 0;
    for (const auto& n : g.nodes) (n.kind == topo::NodeKind::endpoint ? endpoints : bifs)++;
    CHECK(endpoints == 3);
    CHECK(bifs == 1);
  }
  SUBCASE("3-level tree: exactly 7 branches, length within 10 percent") {
    const auto ph = phantom::generate_phantom(phantom::bifurcating_tree_spec(3), 13);
    const auto skel = topo::skeletonize(ph.airway);
    check_topology_preserved(ph.airway, skel);
    const auto g = topo::build_graph(skel, topo::distance_transform(ph.airway));
    CHECK(int(g.branches.size()) == ph.truth.branch_count);
    CHECK(topo::tree_length(g) ==
          doctest::Approx(ph.truth.total_length_mm).epsilon(0.10));
  }
}

TEST_CASE("graph JSON dump parses and matches the graph") {
  const auto ph = phantom::generate_phantom(phantom::y_spec(), 5);
  const auto g =
      topo::build_graph(topo::skeletonize(ph.airway), topo::distance_transform(ph.airway));
  const std::string json = topo::graph_to_json(g);
  CHECK(json.find("\"branches\"") != std::string::npos);
  CHECK(json.find("\"length_mm\"") != std::string::npos);
  // node and branch counts appear as many times as expected
  std::size_t kinds = 0, pos = 0;
  while ((pos = json.find("\"kind\"", pos)) != std::string::npos) {
    ++kinds;
    pos += 6;
  }
  CHECK(kinds == g.nodes.size());
}
