#include "airwaycl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "airwaycl/components.hpp"

namespace airwaycl::topo {
namespace {

double step_length(const Dims& d, const Spacing& s, std::int64_t a, std::int64_t b) {
  const auto pa = unravel(d, a), pb = unravel(d, b);
  const double dx = (pa[0] - pb[0]) * s.sx;
  const double dy = (pa[1] - pb[1]) * s.sy;
  const double dz = (pa[2] - pb[2]) * s.sz;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double path_length(const Dims& d, const Spacing& s, const std::vector<std::int64_t>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += step_length(d, s, path[i - 1], path[i]);
  return len;
}

double path_diameter(const DistanceField& dist, const std::vector<std::int64_t>& path) {
  if (path.empty()) return 0.0;
  double sum = 0.0;
  for (const auto v : path) sum += dist.data[std::size_t(v)];
  return 2.0 * sum / double(path.size());
}

struct Builder {
  const Mask3D& skel;
  const DistanceField& dist;
  const Dims& d;
  std::vector<std::array<int, 3>> offs = neighbor_offsets(26);

  std::unordered_map<std::int64_t, int> degree;       // skeleton voxel -> fg 26-neighbors
  std::unordered_map<std::int64_t, int> node_of;      // node voxel -> node id
  std::unordered_map<std::int64_t, std::uint8_t> used;  // consumed interior voxels
  std::set<std::pair<std::int64_t, std::int64_t>> direct_edges;
  SkeletonGraph g;

  explicit Builder(const Mask3D& s, const DistanceField& df) : skel(s), dist(df), d(s.dims) {
    g.dims = s.dims;
    g.spacing = s.spacing;
  }

  bool is_fg(int x, int y, int z) const {
    return d.contains(x, y, z) && skel.data[std::size_t(linear_index(d, x, y, z))] != 0;
  }

  std::vector<std::int64_t> fg_neighbors(std::int64_t v) const {
    const auto [x, y, z] = unravel(d, v);
    std::vector<std::int64_t> out;
    for (const auto& o : offs)
      if (is_fg(x + o[0], y + o[1], z + o[2]))
        out.push_back(linear_index(d, x + o[0], y + o[1], z + o[2]));
    return out;
  }

  void classify() {
    std::vector<std::int64_t> voxels;
    for (std::int64_t i = 0; i < d.count(); ++i)
      if (skel.data[std::size_t(i)]) voxels.push_back(i);

    for (const auto v : voxels) degree[v] = int(fg_neighbors(v).size());

    // merge 26-connected junction voxels into one node at the member nearest
    // the cluster centroid (ties to the smallest linear index)
    std::unordered_map<std::int64_t, std::uint8_t> in_cluster;
    for (const auto v : voxels) {
      if (degree[v] < 3 || in_cluster.count(v)) continue;
      std::vector<std::int64_t> cluster{v};
      in_cluster[v] = 1;
      for (std::size_t head = 0; head < cluster.size(); ++head) {
        for (const auto n : fg_neighbors(cluster[head]))
          if (degree[n] >= 3 && !in_cluster.count(n)) {
            in_cluster[n] = 1;
            cluster.push_back(n);
          }
      }
      std::sort(cluster.begin(), cluster.end());
      double cx = 0, cy = 0, cz = 0;
      for (const auto m : cluster) {
        const auto p = unravel(d, m);
        cx += p[0];
        cy += p[1];
        cz += p[2];
      }
      cx /= double(cluster.size());
      cy /= double(cluster.size());
      cz /= double(cluster.size());
      std::int64_t best = cluster[0];
      double best_d2 = 1e300;
      for (const auto m : cluster) {
        const auto p = unravel(d, m);
        const double d2 = (p[0] - cx) * (p[0] - cx) + (p[1] - cy) * (p[1] - cy) +
                          (p[2] - cz) * (p[2] - cz);
        if (d2 < best_d2 - 1e-12) {
          best_d2 = d2;
          best = m;
        }
      }
      const int id = int(g.nodes.size());
      g.nodes.push_back({best, NodeKind::bifurcation, cluster});
      for (const auto m : cluster) node_of[m] = id;
    }

    for (const auto v : voxels) {
      if (degree[v] != 1) continue;
      const int id = int(g.nodes.size());
      g.nodes.push_back({v, NodeKind::endpoint, {v}});
      node_of[v] = id;
    }
  }

  void add_branch(std::vector<std::int64_t> path, int a, int b) {
    Branch br;
    br.id = int(g.branches.size());
    br.node_a = a;
    br.node_b = b;
    br.length_mm = path_length(d, skel.spacing, path);
    br.mean_diameter_mm = path_diameter(dist, path);
    br.path = std::move(path);
    g.branches.push_back(std::move(br));
  }

  // walks from a node voxel into an interior voxel until another node voxel
  void trace_from(std::int64_t node_voxel, std::int64_t first) {
    std::vector<std::int64_t> path{node_voxel, first};
    used[first] = 1;
    std::int64_t prev = node_voxel, cur = first;
    while (true) {
      if (node_of.count(cur)) break;
      const auto nbrs = fg_neighbors(cur);
      std::int64_t next = -1;
      for (const auto n : nbrs)
        if (n != prev) {
          next = n;
          break;
        }
      if (next < 0) break;  // dead end without a node; degenerate, stop
      path.push_back(next);
      if (!node_of.count(next)) used[next] = 1;
      prev = cur;
      cur = next;
    }
    const int a = node_of.at(node_voxel);
    const int b = node_of.count(cur) ? node_of.at(cur) : -1;
    if (b < 0) return;
    add_branch(std::move(path), a, b);
  }

  void trace_all() {
    for (std::size_t id = 0; id < g.nodes.size(); ++id) {
      for (const auto member : g.nodes[id].cluster) {
        for (const auto n : fg_neighbors(member)) {
          if (const auto it = node_of.find(n); it != node_of.end()) {
            if (it->second == int(id)) continue;  // intra-cluster adjacency
            const auto key = std::minmax(member, n);
            if (!direct_edges.insert({key.first, key.second}).second) continue;
            add_branch({member, n}, int(id), it->second);
            continue;
          }
          if (used.count(n)) continue;  // already consumed by a trace
          trace_from(member, n);
        }
      }
    }
    // pure cycles (no node voxels): start a synthetic junction at the
    // smallest unconsumed interior voxel
    for (std::int64_t i = 0; i < d.count(); ++i) {
      if (!skel.data[std::size_t(i)]) continue;
      if (degree[i] != 2 || used.count(i) || node_of.count(i)) continue;
      const int id = int(g.nodes.size());
      g.nodes.push_back({i, NodeKind::bifurcation, {i}});
      node_of[i] = id;
      const auto nbrs = fg_neighbors(i);
      trace_from(i, nbrs[0]);
    }
  }

  void prune() {
    // one pass: drop one-step branches hanging off a junction at an endpoint
    std::vector<int> incident(g.nodes.size(), 0);
    for (const auto& br : g.branches) {
      ++incident[std::size_t(br.node_a)];
      ++incident[std::size_t(br.node_b)];
    }
    std::vector<std::uint8_t> drop_branch(g.branches.size(), 0);
    std::vector<std::uint8_t> drop_node(g.nodes.size(), 0);
    for (const auto& br : g.branches) {
      if (br.path.size() > 2) continue;
      const auto ka = g.nodes[std::size_t(br.node_a)].kind;
      const auto kb = g.nodes[std::size_t(br.node_b)].kind;
      const bool spur = (ka == NodeKind::endpoint && kb == NodeKind::bifurcation) ||
                        (kb == NodeKind::endpoint && ka == NodeKind::bifurcation);
      if (!spur) continue;
      drop_branch[std::size_t(br.id)] = 1;
      const int ep = ka == NodeKind::endpoint ? br.node_a : br.node_b;
      drop_node[std::size_t(ep)] = 1;
      --incident[std::size_t(br.node_a)];
      --incident[std::size_t(br.node_b)];
    }

    // splice junctions left with exactly two branches
    for (std::size_t id = 0; id < g.nodes.size(); ++id) {
      if (drop_node[id] || g.nodes[id].kind != NodeKind::bifurcation) continue;
      if (incident[id] != 2) continue;
      std::vector<int> at;
      for (const auto& br : g.branches)
        if (!drop_branch[std::size_t(br.id)] && (br.node_a == int(id) || br.node_b == int(id)))
          at.push_back(br.id);
      if (at.size() != 2 || at[0] == at[1]) continue;  // self-loop stays
      Branch& b1 = g.branches[std::size_t(at[0])];
      Branch& b2 = g.branches[std::size_t(at[1])];
      // orient b1 to end at the node, b2 to start at it
      if (b1.node_a == int(id)) {
        std::reverse(b1.path.begin(), b1.path.end());
        std::swap(b1.node_a, b1.node_b);
      }
      if (b2.node_b == int(id)) {
        std::reverse(b2.path.begin(), b2.path.end());
        std::swap(b2.node_a, b2.node_b);
      }
      std::vector<std::int64_t> merged = b1.path;
      // connect through the cluster if the two branches touch different members
      if (merged.back() != b2.path.front()) {
        const auto link = cluster_path(g.nodes[id], merged.back(), b2.path.front());
        merged.insert(merged.end(), link.begin() + 1, link.end());
      }
      merged.insert(merged.end(), b2.path.begin() + 1, b2.path.end());
      b1.path = std::move(merged);
      b1.node_b = b2.node_b;
      b1.length_mm = path_length(d, skel.spacing, b1.path);
      b1.mean_diameter_mm = path_diameter(dist, b1.path);
      drop_branch[std::size_t(at[1])] = 1;
      drop_node[id] = 1;
    }

    // demote junctions left with one branch, drop isolated ones
    for (std::size_t id = 0; id < g.nodes.size(); ++id) {
      if (drop_node[id] || g.nodes[id].kind != NodeKind::bifurcation) continue;
      int inc = 0;
      for (const auto& br : g.branches)
        if (!drop_branch[std::size_t(br.id)] && (br.node_a == int(id) || br.node_b == int(id)))
          inc += (br.node_a == int(id)) + (br.node_b == int(id));
      if (inc == 1) g.nodes[id].kind = NodeKind::endpoint;
      if (inc == 0) drop_node[id] = 1;
    }

    compact(drop_branch, drop_node);
  }

  // shortest 26-connected path between two members of a node cluster
  std::vector<std::int64_t> cluster_path(const SkeletonNode& node, std::int64_t from,
                                         std::int64_t to) const {
    if (from == to) return {from};
    std::unordered_map<std::int64_t, std::int64_t> parent;
    std::vector<std::int64_t> frontier{from};
    parent[from] = from;
    while (!frontier.empty() && !parent.count(to)) {
      std::vector<std::int64_t> next;
      std::sort(frontier.begin(), frontier.end());
      for (const auto c : frontier) {
        const auto pc = unravel(d, c);
        for (const auto m : node.cluster) {
          if (parent.count(m)) continue;
          const auto pm = unravel(d, m);
          if (std::max({std::abs(pc[0] - pm[0]), std::abs(pc[1] - pm[1]),
                        std::abs(pc[2] - pm[2])}) <= 1) {
            parent[m] = c;
            next.push_back(m);
          }
        }
      }
      frontier = std::move(next);
    }
    std::vector<std::int64_t> path;
    if (!parent.count(to)) return {from, to};  // disconnected cluster members; direct hop
    for (std::int64_t v = to; v != from; v = parent[v]) path.push_back(v);
    path.push_back(from);
    std::reverse(path.begin(), path.end());
    return path;
  }

  void compact(const std::vector<std::uint8_t>& drop_branch,
               const std::vector<std::uint8_t>& drop_node) {
    std::vector<int> node_remap(g.nodes.size(), -1);
    std::vector<SkeletonNode> nodes;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (drop_node[i]) continue;
      node_remap[i] = int(nodes.size());
      nodes.push_back(g.nodes[i]);
    }
    std::vector<Branch> branches;
    for (auto& br : g.branches) {
      if (drop_branch[std::size_t(br.id)]) continue;
      br.id = int(branches.size());
      br.node_a = node_remap[std::size_t(br.node_a)];
      br.node_b = node_remap[std::size_t(br.node_b)];
      branches.push_back(std::move(br));
    }
    g.nodes = std::move(nodes);
    g.branches = std::move(branches);
  }

  void finalize() {
    g.voxel_to_branch.clear();
    std::set<std::int64_t> vox;
    for (const auto& br : g.branches) {
      for (const auto v : br.path) vox.insert(v);
      for (std::size_t i = 1; i + 1 < br.path.size(); ++i)
        g.voxel_to_branch[br.path[i]] = br.id;
    }
    for (const auto& n : g.nodes)
      for (const auto m : n.cluster) vox.insert(m);
    // isolated voxels (no neighbors) are skeleton voxels without graph structure
    for (std::int64_t i = 0; i < d.count(); ++i)
      if (skel.data[std::size_t(i)] && degree.at(i) == 0) vox.insert(i);
    g.voxels.assign(vox.begin(), vox.end());
  }
};

}  // namespace

SkeletonGraph build_graph(const Mask3D& skeleton, const DistanceField& dist, bool prune_spurs) {
  require_same_grid(skeleton.dims, dist.dims, "build_graph");
  Builder b(skeleton, dist);
  b.classify();
  b.trace_all();
  if (prune_spurs) b.prune();
  b.finalize();
  return b.g;
}

double tree_length(const SkeletonGraph& graph) {
  double total = 0.0;
  for (const auto& br : graph.branches) total += br.length_mm;
  return total;
}

std::string graph_to_json(const SkeletonGraph& graph) {
  nlohmann::ordered_json j;
  j["dims"] = {graph.dims.nx, graph.dims.ny, graph.dims.nz};
  j["spacing"] = {graph.spacing.sx, graph.spacing.sy, graph.spacing.sz};
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : graph.nodes) {
    const auto p = unravel(graph.dims, n.voxel);
    j["nodes"].push_back({{"voxel", {p[0], p[1], p[2]}},
                          {"kind", n.kind == NodeKind::endpoint ? "endpoint" : "bifurcation"}});
  }
  j["branches"] = nlohmann::ordered_json::array();
  for (const auto& br : graph.branches) {
    nlohmann::ordered_json path = nlohmann::ordered_json::array();
    for (const auto v : br.path) {
      const auto p = unravel(graph.dims, v);
      path.push_back({p[0], p[1], p[2]});
    }
    j["branches"].push_back({{"id", br.id},
                             {"length_mm", br.length_mm},
                             {"mean_diameter_mm", br.mean_diameter_mm},
                             {"endpoints", {br.node_a, br.node_b}},
                             {"path", std::move(path)}});
  }
  return j.dump(2);
}

}  // namespace airwaycl::topo
