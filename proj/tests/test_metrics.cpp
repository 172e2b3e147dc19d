#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "airwaycl/components.hpp"
#include "airwaycl/distance.hpp"
#include "airwaycl/graph.hpp"
#include "airwaycl/metrics.hpp"
#include "airwaycl/metrics_io.hpp"
#include "airwaycl/phantom.hpp"
#include "airwaycl/rng.hpp"
#include "airwaycl/skeleton.hpp"
#include "oracles.hpp"

using namespace airwaycl;
using metrics::ConfusionCounts;

namespace {

Mask3D mask_from_bits(Dims d, unsigned bits) {
  Mask3D m = make_mask(d, Spacing{1, 1, 1});
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = (bits >> i) & 1u;
  return m;
}

Mask3D line_mask(Dims d, int y, int z, int x0, int x1) {
  Mask3D m = make_mask(d, Spacing{1, 1, 1});
  for (int x = x0; x <= x1; ++x) m.at(x, y, z) = 1;
  return m;
}

topo::SkeletonGraph graph_of(const Mask3D& skel) {
  return topo::build_graph(skel, topo::distance_transform(skel));
}

}  // namespace

TEST_CASE("confusion basics") {
  Mask3D gt = make_mask(Dims{10, 10, 1}, Spacing{1, 1, 1});
  for (int i = 0; i < 10; ++i) gt.data[std::size_t(i)] = 1;

  SUBCASE("pred equals gt") {
    const auto c = metrics::confusion(gt, gt);
    CHECK(c.tp == 10);
    CHECK(c.tn == 90);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
  }
  SUBCASE("empty prediction") {
    const Mask3D empty = make_mask(gt.dims, gt.spacing);
    const auto c = metrics::confusion(empty, gt);
    CHECK(c.fn == 10);
    CHECK(c.tp == 0);
  }
  SUBCASE("dimension mismatch throws") {
    const Mask3D other = make_mask(Dims{9, 10, 1}, Spacing{1, 1, 1});
    CHECK_THROWS_AS(metrics::confusion(other, gt), std::invalid_argument);
  }
  SUBCASE("random 8^3 pair equals the brute-force tally") {
    Mask3D a = make_mask(Dims{8, 8, 8}, Spacing{1, 1, 1});
    Mask3D b = a;
    CounterRng rng(42, 3);
    for (auto& v : a.data) v = rng.next_unit() < 0.4;
    for (auto& v : b.data) v = rng.next_unit() < 0.6;
    const auto c = metrics::confusion(a, b);
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      tp += a.data[i] && b.data[i];
      fp += a.data[i] && !b.data[i];
      fn += !a.data[i] && b.data[i];
      tn += !a.data[i] && !b.data[i];
    }
    CHECK(c.tp == tp);
    CHECK(c.fp == fp);
    CHECK(c.fn == fn);
    CHECK(c.tn == tn);
  }
}

TEST_CASE("overlap metrics formulas and flags") {
  SUBCASE("identical masks score 1 everywhere") {
    const auto m = metrics::overlap_metrics(ConfusionCounts{10, 0, 90, 0});
    CHECK(*m.iou == 1.0);
    CHECK(*m.dice == 1.0);
    CHECK(*m.precision == 1.0);
    CHECK(*m.completeness == 1.0);
  }
  SUBCASE("tp=1 fp=1 fn=2") {
    const auto m = metrics::overlap_metrics(ConfusionCounts{1, 1, 0, 2});
    CHECK(*m.iou == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(*m.dice == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("both masks empty flags the overlap family undefined") {
    const auto m = metrics::overlap_metrics(ConfusionCounts{0, 0, 100, 0});
    CHECK_FALSE(m.iou.has_value());
    CHECK_FALSE(m.dice.has_value());
    CHECK_FALSE(m.precision.has_value());
    CHECK_FALSE(m.completeness.has_value());
    CHECK(m.tnr.has_value());  // background rates stay defined
  }
  SUBCASE("dice = 2 iou / (1 + iou) wherever both are defined") {
    CounterRng rng(7, 8);
    for (int t = 0; t < 300; ++t) {
      const ConfusionCounts c{rng.next_below(50), rng.next_below(50), rng.next_below(50),
                              rng.next_below(50)};
      const auto m = metrics::overlap_metrics(c);
      if (m.iou && m.dice)
        CHECK(*m.dice == doctest::Approx(2.0 * *m.iou / (1.0 + *m.iou)).epsilon(1e-12));
    }
  }
}

TEST_CASE("exhaustive 3x3x1 oracle equivalence over all mask pairs") {
  const Dims d{3, 3, 1};
  for (unsigned pa = 0; pa < 512; ++pa) {
    const Mask3D a = mask_from_bits(d, pa);
    for (unsigned pb = 0; pb < 512; ++pb) {
      const Mask3D b = mask_from_bits(d, pb);
      const auto c = metrics::confusion(a, b);
      std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
      for (int i = 0; i < 9; ++i) {
        const bool pav = (pa >> i) & 1u, pbv = (pb >> i) & 1u;
        tp += pav && pbv;
        fp += pav && !pbv;
        fn += !pav && pbv;
        tn += !pav && !pbv;
      }
      REQUIRE(c.tp == tp);
      REQUIRE(c.fp == fp);
      REQUIRE(c.fn == fn);
      REQUIRE(c.tn == tn);
      const auto m = metrics::overlap_metrics(c);
      if (tp + fp + fn > 0) {
        REQUIRE(*m.iou == double(tp) / double(tp + fp + fn));
        REQUIRE(*m.dice == 2.0 * double(tp) / double(2 * tp + fp + fn));
      } else {
        REQUIRE_FALSE(m.iou.has_value());
      }
    }
  }
}

TEST_CASE("detected length rate counts fully covered steps") {
  const Dims d{15, 3, 3};
  const Mask3D centerline = line_mask(d, 1, 1, 2, 12);  // 11 voxels, 10 steps
  const auto g = graph_of(centerline);
  REQUIRE(g.branches.size() == 1);

  SUBCASE("prediction covering everything scores 1") {
    Mask3D pred = make_mask(d, Spacing{1, 1, 1}, 1);
    CHECK(*metrics::detected_length_rate(g, pred) == 1.0);
  }
  SUBCASE("empty prediction scores 0") {
    const Mask3D pred = make_mask(d, Spacing{1, 1, 1});
    CHECK(*metrics::detected_length_rate(g, pred) == 0.0);
  }
  SUBCASE("6 consecutive covered voxels give 5 of 10 steps") {
    const Mask3D pred = line_mask(d, 1, 1, 4, 9);
    CHECK(*metrics::detected_length_rate(g, pred) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("empty graph is flagged") {
    const Mask3D empty = make_mask(d, Spacing{1, 1, 1});
    const auto eg = graph_of(empty);
    CHECK_FALSE(metrics::detected_length_rate(eg, empty).has_value());
  }
}

TEST_CASE("detected branch ratio thresholds per branch") {
  // thin Y: three branches
  Mask3D y = make_mask(Dims{16, 3, 16}, Spacing{1, 1, 1});
  const int cx = 8, cy = 1, cz = 7;
  y.at(cx, cy, cz) = 1;
  for (int k = 1; k <= 5; ++k) {
    y.at(cx, cy, cz - k) = 1;
    y.at(cx - k, cy, cz + k) = 1;
    y.at(cx + k, cy, cz + k) = 1;
  }
  const auto g = graph_of(y);
  REQUIRE(g.branches.size() == 3);

  SUBCASE("full coverage") {
    Mask3D pred = make_mask(y.dims, y.spacing, 1);
    CHECK(*metrics::detected_branch_ratio(g, pred) == 1.0);
  }
  SUBCASE("covering two arms fully gives 2/3") {
    Mask3D pred = y;
    for (int k = 1; k <= 5; ++k) pred.at(cx + k, cy, cz + k) = 0;  // kill one arm
    CHECK(*metrics::detected_branch_ratio(g, pred) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("half-covered branch is not detected at 0.8") {
    const Dims d{15, 3, 3};
    const Mask3D line = line_mask(d, 1, 1, 2, 11);  // 10 voxels
    const auto lg = graph_of(line);
    const Mask3D pred = line_mask(d, 1, 1, 2, 6);  // 5 of 10 voxels
    CHECK(*metrics::detected_branch_ratio(lg, pred, 0.8) == 0.0);
    CHECK(*metrics::detected_branch_ratio(lg, pred, 0.5) == 1.0);
  }
}

TEST_CASE("volume and centerline leakage") {
  const Dims d{10, 10, 1};
  Mask3D gt = make_mask(d, Spacing{1, 1, 1});
  for (int i = 0; i < 50; ++i) gt.data[std::size_t(i)] = 1;

  SUBCASE("pred equal or inside gt leaks nothing") {
    CHECK(*metrics::volume_leakage(gt, gt) == 0.0);
    Mask3D inside = gt;
    inside.data[0] = 0;
    CHECK(*metrics::volume_leakage(inside, gt) == 0.0);
  }
  SUBCASE("5 extra voxels over 50 leak 0.1") {
    Mask3D pred = gt;
    for (int i = 50; i < 55; ++i) pred.data[std::size_t(i)] = 1;
    CHECK(*metrics::volume_leakage(pred, gt) == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("empty gt is flagged") {
    const Mask3D empty = make_mask(d, Spacing{1, 1, 1});
    CHECK_FALSE(metrics::volume_leakage(gt, empty).has_value());
  }
  SUBCASE("centerline leakage counts skeleton voxels outside gt") {
    const Dims ld{14, 3, 3};
    const Mask3D cl = line_mask(ld, 1, 1, 2, 11);  // 10 voxels
    const auto g = graph_of(cl);
    Mask3D cover = line_mask(ld, 1, 1, 2, 8);  // misses 3 of 10
    CHECK(*metrics::centerline_leakage(g, cover) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(*metrics::centerline_leakage(g, cl) == 0.0);
    const Mask3D none = make_mask(ld, Spacing{1, 1, 1});
    CHECK(*metrics::centerline_leakage(g, none) == 1.0);
    const auto eg = graph_of(none);
    CHECK_FALSE(metrics::centerline_leakage(eg, cl).has_value());
  }
}

TEST_CASE("centerline distance") {
  SUBCASE("identical graphs have distance 0") {
    const Mask3D cl = line_mask(Dims{12, 3, 3}, 1, 1, 2, 9);
    const auto g = graph_of(cl);
    CHECK(*metrics::centerline_distance(g, g) == 0.0);
  }
  SUBCASE("two parallel lines 2 mm apart") {
    const Dims d{12, 8, 3};
    const auto a = graph_of(line_mask(d, 2, 1, 2, 9));
    const auto b = graph_of(line_mask(d, 4, 1, 2, 9));
    CHECK(*metrics::centerline_distance(a, b) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("random small sets match the brute-force oracle") {
    CounterRng rng(9, 4);
    for (int t = 0; t < 20; ++t) {
      const Dims d{10, 9, 8};
      const Spacing s{0.7 + rng.next_unit(), 0.7 + rng.next_unit(), 0.7 + rng.next_unit()};
      Mask3D ma = make_mask(d, s), mb = make_mask(d, s);
      for (int k = 0; k < 25; ++k) {
        ma.data[rng.next_below(std::uint64_t(d.count()))] = 1;
        mb.data[rng.next_below(std::uint64_t(d.count()))] = 1;
      }
      topo::SkeletonGraph ga, gb;
      ga.dims = gb.dims = d;
      ga.spacing = gb.spacing = s;
      for (std::int64_t i = 0; i < d.count(); ++i) {
        if (ma.data[std::size_t(i)]) ga.voxels.push_back(i);
        if (mb.data[std::size_t(i)]) gb.voxels.push_back(i);
      }
      const double got = *metrics::centerline_distance(ga, gb);
      const double want =
          oracle::symmetric_set_distance_bruteforce(d, s, ga.voxels, gb.voxels);
      CHECK(std::fabs(got - want) < 1e-9);
    }
  }
  SUBCASE("empty side is flagged") {
    const auto g = graph_of(line_mask(Dims{12, 3, 3}, 1, 1, 2, 9));
    const auto e = graph_of(make_mask(Dims{12, 3, 3}, Spacing{1, 1, 1}));
    CHECK_FALSE(metrics::centerline_distance(g, e).has_value());
    CHECK_FALSE(metrics::centerline_distance(e, g).has_value());
  }
}

TEST_CASE("airway size MSE over matched branches") {
  const auto make_line_graph = [](double diameter, int y) {
    topo::SkeletonGraph g;
    g.dims = Dims{12, 8, 3};
    g.spacing = Spacing{1, 1, 1};
    topo::Branch br;
    br.id = 0;
    for (int x = 2; x <= 9; ++x) br.path.push_back(linear_index(g.dims, x, y, 1));
    br.length_mm = 7.0;
    br.mean_diameter_mm = diameter;
    br.node_a = br.node_b = 0;
    g.branches.push_back(br);
    g.voxels = g.branches[0].path;
    return g;
  };

  SUBCASE("identical graphs give zero") {
    const auto g = make_line_graph(4.0, 2);
    const auto r = metrics::airway_size_mse(g, g);
    CHECK(*r.mse_mm2 == 0.0);
    CHECK(r.matched == 1);
    CHECK(r.unmatched == 0);
  }
  SUBCASE("4 mm vs 3 mm single branch gives 1 mm^2") {
    const auto r = metrics::airway_size_mse(make_line_graph(4.0, 2), make_line_graph(3.0, 2));
    CHECK(*r.mse_mm2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("diameter errors 1 and 2 give (1+4)/2") {
    auto pred = make_line_graph(4.0, 2);
    auto gt = make_line_graph(3.0, 2);
    topo::Branch b2 = pred.branches[0];
    b2.id = 1;
    for (auto& v : b2.path) v += linear_index(pred.dims, 0, 3, 0);  // shift to y=5
    b2.mean_diameter_mm = 6.0;
    pred.branches.push_back(b2);
    topo::Branch g2 = b2;
    g2.mean_diameter_mm = 4.0;
    gt.branches.push_back(g2);
    const auto r = metrics::airway_size_mse(pred, gt);
    CHECK(r.matched == 2);
    CHECK(*r.mse_mm2 == doctest::Approx(2.5).epsilon(1e-12));
  }
  SUBCASE("no branches flags undefined") {
    topo::SkeletonGraph e;
    e.dims = Dims{12, 8, 3};
    e.spacing = Spacing{1, 1, 1};
    const auto r = metrics::airway_size_mse(e, e);
    CHECK_FALSE(r.mse_mm2.has_value());
  }
}

TEST_CASE("full_report perfect scores on self-comparison") {
  for (int which = 0; which < 3; ++which) {
    phantom::PhantomSpec spec;
    if (which == 0) spec = phantom::straight_tube_spec(40, 2, Dims{32, 32, 64});
    if (which == 1) spec = phantom::y_spec();
    if (which == 2) spec = phantom::bifurcating_tree_spec(2);
    const auto ph = phantom::generate_phantom(spec, 21);
    const auto r = metrics::full_report(ph.airway, ph.airway);
    CHECK(*r.iou == 1.0);
    CHECK(*r.dice == 1.0);
    CHECK(*r.precision == 1.0);
    CHECK(*r.completeness == 1.0);
    CHECK(*r.dlr == 1.0);
    CHECK(*r.dbr == 1.0);
    CHECK(*r.volume_leakage == 0.0);
    CHECK(*r.centerline_leakage == 0.0);
    CHECK(*r.one_minus_leakage == 1.0);
    CHECK(*r.centerline_distance_mm == 0.0);
    CHECK(*r.airway_size_mse_mm2 == 0.0);
  }
}

TEST_CASE("full_report flags and degradations") {
  const auto ph = phantom::generate_phantom(phantom::y_spec(), 22);

  SUBCASE("empty prediction") {
    const Mask3D empty = make_mask(ph.airway.dims, ph.airway.spacing);
    const auto r = metrics::full_report(empty, ph.airway);
    CHECK(*r.iou == 0.0);
    CHECK(*r.dlr == 0.0);
    CHECK(*r.volume_leakage == 0.0);
    CHECK_FALSE(r.centerline_distance_mm.has_value());  // no prediction skeleton
  }
  SUBCASE("largest component of the prediction is evaluated") {
    Mask3D pred = ph.airway;
    // add a distant small blob: must be discarded before scoring
    for (int x = 1; x <= 2; ++x) pred.at(x, 1, 1) = 1;
    const auto r = metrics::full_report(pred, ph.airway);
    CHECK(*r.iou == 1.0);
    CHECK(*r.volume_leakage == 0.0);
  }
  SUBCASE("dimension mismatch throws") {
    const Mask3D other = make_mask(Dims{4, 4, 4}, ph.airway.spacing);
    CHECK_THROWS_AS(metrics::full_report(other, ph.airway), std::invalid_argument);
  }
}

TEST_CASE("full_report matches per-metric hand computation on a constructed pair") {
  // gt: thin line voxels x in [3, 17]; pred: the same line extended to [0, 17].
  // Thin lines are thinning fixed points, so every metric is hand-derivable.
  const Dims d{22, 5, 5};
  const Mask3D gt = line_mask(d, 2, 2, 3, 17);    // 15 voxels
  const Mask3D pred = line_mask(d, 2, 2, 0, 17);  // 18 voxels, 3 extra
  const auto r = metrics::full_report(pred, gt);

  const double n = double(d.count());
  CHECK(*r.iou == doctest::Approx(15.0 / 18.0).epsilon(1e-12));
  CHECK(*r.dice == doctest::Approx(30.0 / 33.0).epsilon(1e-12));
  CHECK(*r.precision == doctest::Approx(15.0 / 18.0).epsilon(1e-12));
  CHECK(*r.completeness == 1.0);
  CHECK(*r.tpr == 1.0);
  CHECK(*r.fnr == 0.0);
  CHECK(*r.tnr == doctest::Approx((n - 18.0) / (n - 15.0)).epsilon(1e-12));
  CHECK(*r.fpr == doctest::Approx(3.0 / (n - 15.0)).epsilon(1e-12));
  CHECK(*r.dlr == 1.0);  // the whole gt centerline is covered
  CHECK(*r.dbr == 1.0);
  CHECK(*r.volume_leakage == doctest::Approx(0.2).epsilon(1e-12));  // 3 / 15
  CHECK(*r.one_minus_leakage == doctest::Approx(0.8).epsilon(1e-12));
  // 3 of the 18 predicted centerline voxels sit outside gt
  CHECK(*r.centerline_leakage == doctest::Approx(3.0 / 18.0).epsilon(1e-12));
  // pred->gt: distances 3,2,1 for the overhang, 0 elsewhere -> 6/18; gt->pred: 0
  CHECK(*r.centerline_distance_mm == doctest::Approx(0.5 * 6.0 / 18.0).epsilon(1e-12));
  // both branches are 1-voxel-wide lines: distance field 1 everywhere on them,
  // so both diameters are exactly 2 mm and the matched MSE vanishes
  CHECK(*r.airway_size_mse_mm2 == 0.0);
}

TEST_CASE("leakage above one clamps 1-leakage to zero and flags it") {
  const Dims d{20, 20, 20};
  Mask3D gt = make_mask(d, Spacing{1, 1, 1});
  Mask3D pred = make_mask(d, Spacing{1, 1, 1});
  // tiny ground truth, huge connected over-segmentation around it
  for (int z = 9; z <= 10; ++z) gt.at(10, 10, z) = 1;
  for (int z = 2; z <= 17; ++z)
    for (int y = 6; y <= 13; ++y)
      for (int x = 6; x <= 13; ++x) pred.at(x, y, z) = 1;
  const auto r = metrics::full_report(pred, gt);
  REQUIRE(r.volume_leakage.has_value());
  CHECK(*r.volume_leakage > 1.0);
  CHECK(*r.one_minus_leakage == 0.0);
  CHECK(r.leakage_above_one);
}

TEST_CASE("rates are invariant under voxel permutation and spacing rescale") {
  const auto ph = phantom::generate_phantom(phantom::y_spec(), 23);
  Mask3D pred = ph.airway;
  CounterRng rng(5, 5);
  for (int k = 0; k < 40; ++k)  // poke some holes
    pred.data[rng.next_below(std::uint64_t(pred.dims.count()))] = 0;
  const auto r1 = metrics::full_report(pred, ph.airway);

  SUBCASE("doubling the spacing leaves rates alone, scales distances") {
    Mask3D pred2 = pred, gt2 = ph.airway;
    pred2.spacing = gt2.spacing = Spacing{2, 2, 2};
    const auto r2 = metrics::full_report(pred2, gt2);
    CHECK(*r2.iou == *r1.iou);
    CHECK(*r2.dbr == *r1.dbr);
    CHECK(*r2.dlr == doctest::Approx(*r1.dlr).epsilon(1e-12));
    CHECK(*r2.volume_leakage == *r1.volume_leakage);
    CHECK(*r2.centerline_distance_mm ==
          doctest::Approx(2.0 * *r1.centerline_distance_mm).epsilon(1e-12));
  }
  SUBCASE("confusion is invariant under a shared voxel permutation") {
    // permuting both masks the same way preserves all counts
    std::vector<std::size_t> perm(pred.data.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    CounterRng prng(6, 6);
    for (std::size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1], perm[prng.next_below(i)]);
    Mask3D pa = pred, pb = ph.airway;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      pa.data[i] = pred.data[perm[i]];
      pb.data[i] = ph.airway.data[perm[i]];
    }
    const auto ca = metrics::confusion(pred, ph.airway);
    const auto cb = metrics::confusion(pa, pb);
    CHECK(ca.tp == cb.tp);
    CHECK(ca.fp == cb.fp);
    CHECK(ca.fn == cb.fn);
    CHECK(ca.tn == cb.tn);
  }
}

TEST_CASE("forgetting rate") {
  const auto report_with = [](double iou, double dlr, double dbr, double prec, double oml) {
    metrics::MetricReport r;
    r.iou = iou;
    r.dlr = dlr;
    r.dbr = dbr;
    r.precision = prec;
    r.one_minus_leakage = oml;
    return r;
  };

  SUBCASE("identical reports forget nothing") {
    const auto r = report_with(0.8, 0.7, 0.6, 0.9, 0.95);
    CHECK(metrics::forgetting_rate({r, r}, {r, r}) == 0.0);
  }
  SUBCASE("uniform 0.05 drop is 5 percentage points") {
    std::vector<metrics::MetricReport> before, after;
    for (int i = 0; i < 3; ++i) {
      before.push_back(report_with(0.80, 0.70, 0.60, 0.90, 0.95));
      after.push_back(report_with(0.75, 0.65, 0.55, 0.85, 0.90));
    }
    CHECK(metrics::forgetting_rate(before, after) == doctest::Approx(5.0).epsilon(1e-9));
  }
  SUBCASE("single-scan mean of stated differences") {
    // before (0.80, 0.60, 0.50, 0.90, 0.95), after (0.70, 0.55, 0.45, 0.85, 0.90):
    // differences (0.10, 0.05, 0.05, 0.05, 0.05) average 0.06 -> 6 points
    const auto b = report_with(0.80, 0.60, 0.50, 0.90, 0.95);
    const auto a = report_with(0.70, 0.55, 0.45, 0.85, 0.90);
    CHECK(metrics::forgetting_rate({b}, {a}) == doctest::Approx(6.0).epsilon(1e-9));
  }
  SUBCASE("improvement is negative forgetting") {
    const auto b = report_with(0.70, 0.60, 0.50, 0.80, 0.90);
    const auto a = report_with(0.80, 0.70, 0.60, 0.90, 1.00);
    CHECK(metrics::forgetting_rate({b}, {a}) == doctest::Approx(-10.0).epsilon(1e-9));
  }
  SUBCASE("errors") {
    const auto r = report_with(0.8, 0.7, 0.6, 0.9, 0.95);
    CHECK_THROWS_AS(metrics::forgetting_rate({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(metrics::forgetting_rate({r}, {r, r}), std::invalid_argument);
    metrics::MetricReport incomplete;
    incomplete.iou = 0.5;
    CHECK_THROWS_AS(metrics::forgetting_rate({incomplete}, {incomplete}),
                    std::invalid_argument);
    CHECK_THROWS_AS(metrics::forgetting_rate({r}, {r}, {"not_a_metric"}),
                    std::invalid_argument);
  }
}

TEST_CASE("metric report CSV round trip") {
  const auto ph = phantom::generate_phantom(phantom::y_spec(), 24);
  Mask3D pred = ph.airway;
  for (int k = 0; k < 200; ++k) pred.data[std::size_t(300 + 7 * k)] = 0;
  const auto r1 = metrics::full_report(pred, ph.airway);
  const auto r2 = metrics::full_report(ph.airway, ph.airway);

  const std::string csv = metrics::report_table_to_csv({"a", "b"}, {r1, r2});
  const auto back = metrics::report_table_from_csv(csv);
  REQUIRE(back.ids == std::vector<std::string>{"a", "b"});
  // percentages are serialized at two decimals
  CHECK(*back.reports[0].iou == doctest::Approx(*r1.iou).epsilon(0.0001));
  CHECK(*back.reports[1].iou == 1.0);
  CHECK(*back.reports[1].centerline_distance_mm == 0.0);
  // mm quantities keep full precision
  CHECK(*back.reports[0].centerline_distance_mm ==
        doctest::Approx(*r1.centerline_distance_mm).epsilon(1e-12));

  SUBCASE("forgetting through the serialized form") {
    const auto rate = metrics::forgetting_rate(back.reports, back.reports);
    CHECK(rate == 0.0);
  }
  SUBCASE("json dump carries all fields") {
    const std::string j = metrics::report_to_json(r2);
    CHECK(j.find("\"iou\": 1.0") != std::string::npos);
    CHECK(j.find("\"airway_size_mse_mm2\": 0.0") != std::string::npos);
  }
}
