#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "perco/coupling.hpp"

namespace perco {

// vertices of cluster C at graph distance exactly 1 from cluster C2
// (asymmetric in general), sorted ascending
std::vector<std::uint32_t> touching_set(const ClusterLabeling& labeling,
                                        std::uint32_t C, std::uint32_t C2);
UnitRatio touching_weight(const ClusterLabeling& labeling, std::uint32_t C,
                          std::uint32_t C2);

enum class PickLaw { cluster_uniform, vertex_uniform };

// Per-vertex uniform pick of a neighboring cluster; two vertices share a
// class iff they share both their own cluster and their picked cluster.
// Vertices with no neighboring cluster form singleton classes.
struct TouchingPartition {
  std::vector<std::int64_t> picked;          // cluster index or -1
  std::vector<std::uint32_t> class_of;       // vertex -> class index
  std::vector<std::array<std::int64_t, 2>> class_key;  // canonical ids (own, picked|-1)
  std::uint32_t n_classes = 0;
};

TouchingPartition touching_partition(const ClusterLabeling& labeling,
                                     std::uint64_t seed,
                                     PickLaw law = PickLaw::cluster_uniform);

enum class NeighborRelation { nonempty, heavy_proxy_touch, finite_touch };

// cluster-level graph under a touching relation; relations derived from
// directed touching sets, symmetrized by OR
struct NeighborGraph {
  NeighborRelation relation;
  std::uint32_t n_clusters = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (ci, cj), ci < cj
  std::vector<std::uint32_t> degree;
  std::vector<std::uint8_t> heavy;
};

NeighborGraph neighbor_graph(const ClusterLabeling& labeling,
                             NeighborRelation relation, std::uint32_t collar,
                             std::uint64_t finite_threshold = 8);

struct RepulsionRow {
  std::uint32_t C, C2;  // canonical ids
  UnitRatio wC, wC2, wTau;
  std::uint64_t sizeTau = 0;
};

struct RepulsionTable {
  std::vector<RepulsionRow> rows;  // every ordered pair of distinct heavy clusters
  std::uint64_t n_nonempty = 0;
  // quantiles (min, q25, median, q75, max) of positive touching weights
  std::array<double, 5> wtau_quantiles{};
};

// require_rim_reach additionally demands max_depth == H (band-to-rim
// clusters), the regime the coexistence probes target
RepulsionTable repulsion_statistics(const ClusterLabeling& labeling,
                                    std::uint32_t collar,
                                    bool require_rim_reach = false);

struct MergingRow {
  std::uint32_t cluster;  // canonical id of the coarser-level cluster
  std::uint64_t count;    // distinct heavy finer-level clusters inside it
};

std::vector<MergingRow> merging_census(const GraphWindow& win,
                                       const EdgeCoupling& coupling, double p1,
                                       double p2, std::uint32_t collar);

}  // namespace perco
