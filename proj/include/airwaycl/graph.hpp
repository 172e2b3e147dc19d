#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "airwaycl/distance.hpp"
#include "airwaycl/types.hpp"

namespace airwaycl::topo {

enum class NodeKind { endpoint, bifurcation };

struct SkeletonNode {
  std::int64_t voxel = 0;             // representative voxel (cluster centroid member)
  NodeKind kind = NodeKind::endpoint;
  std::vector<std::int64_t> cluster;  // all merged junction voxels (size 1 for endpoints)
};

struct Branch {
  int id = 0;
  std::vector<std::int64_t> path;  // ordered voxels including both terminal node voxels
  double length_mm = 0.0;          // sum of consecutive physical step lengths
  double mean_diameter_mm = 0.0;   // 2 x mean distance-field value along path
  int node_a = -1, node_b = -1;
};

/// Centerline voxels organized into nodes (endpoints / merged bifurcation
/// clusters) and node-to-node branches.
struct SkeletonGraph {
  Dims dims;
  Spacing spacing;
  std::vector<SkeletonNode> nodes;
  std::vector<Branch> branches;
  std::unordered_map<std::int64_t, int> voxel_to_branch;  // branch-interior voxels
  std::vector<std::int64_t> voxels;                       // all skeleton voxels, sorted

  bool empty() const { return voxels.empty(); }
};

/// Classifies skeleton voxels by 26-neighbor count (1 endpoint, 2 interior,
/// >= 3 junction; adjacent junction voxels merge into one node), traces
/// branches between nodes and computes per-branch length and diameter from
/// the distance field of the originating mask. Spur branches no longer than
/// one voxel step that hang off a junction are pruned once, and any junction
/// left with two branches is spliced through.
SkeletonGraph build_graph(const Mask3D& skeleton, const DistanceField& dist,
                          bool prune_spurs = true);

/// Total centerline length: sum of branch lengths, in mm.
double tree_length(const SkeletonGraph& graph);

/// Debug dump (nodes, branches, per-branch length/diameter) as a JSON string.
std::string graph_to_json(const SkeletonGraph& graph);

}  // namespace airwaycl::topo
