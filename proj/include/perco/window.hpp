#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "perco/exact.hpp"

namespace perco {

// Finite windows of three one-ended graph families, all sharing the same
// vertex set: the descendant cone of an apex in the q-ary-branching tree,
// depths 0..H, in level order (q-ary heap indexing).
//
//   tree_with_end  (q+1)-regular tree, anchored at a distinguished end;
//                  vertex weight q^-depth relative to the apex
//   grandparent    same tree plus an edge from every depth>=2 vertex to its
//                  grandparent; same weights
//   unit_tree      same adjacency as tree_with_end but weight 1 everywhere
//                  (unimodular control)
enum class Family { tree_with_end, grandparent, unit_tree };

enum class EdgeKind : std::uint8_t { tree = 0, grandparent = 1 };

struct Edge {
  std::uint32_t u;  // ancestor endpoint (smaller id)
  std::uint32_t v;  // descendant endpoint
  EdgeKind kind;
};

struct WindowLimits {
  std::uint64_t max_vertices = 1ull << 24;
};

struct GraphWindow {
  Family family;
  std::uint32_t q;
  std::uint32_t H;
  std::uint32_t collar;  // top band half-open depth bound used by analyses
  std::uint32_t n_vertices;
  std::vector<Edge> edges;  // canonical order: sorted by (u, v, kind)
  std::vector<std::uint64_t> level_off;  // level d occupies [level_off[d], level_off[d+1])

  // CSR adjacency; parallel arrays of neighbor vertex and edge id
  std::vector<std::uint32_t> adj_off;
  std::vector<std::uint32_t> adj_vtx;
  std::vector<std::uint32_t> adj_eid;

  std::uint32_t depth(std::uint32_t v) const;
  std::uint32_t parent(std::uint32_t v) const { return (v - 1) / q; }
  std::uint32_t child(std::uint32_t v, std::uint32_t j) const { return q * v + 1 + j; }
  std::uint32_t meet(std::uint32_t x, std::uint32_t y) const;  // deepest common ancestor
  std::uint32_t tree_dist(std::uint32_t x, std::uint32_t y) const;

  // descendants of v exactly k generations down form a contiguous id range [lo, hi)
  std::pair<std::uint64_t, std::uint64_t> subtree_range(std::uint32_t v,
                                                        std::uint32_t k) const;

  // full family-graph neighborhood present in the window
  bool interior(std::uint32_t v) const;

  std::uint32_t degree(std::uint32_t v) const { return adj_off[v + 1] - adj_off[v]; }
  std::uint32_t max_degree() const;

  // exact vertex weight in fixed-point units; see weight_exp()
  u128 vertex_units(std::uint32_t v) const;
  // weights are integer multiples of q^-weight_exp(); H for the weighted
  // families, 0 for unit_tree
  std::uint32_t weight_exp() const { return family == Family::unit_tree ? 0 : H; }
};

GraphWindow build_window(Family family, std::uint32_t q, std::uint32_t H,
                         std::uint32_t collar, const WindowLimits& limits = {});

Family family_from_string(std::string_view name);
std::string family_name(Family family);

// log_q of the relative weight of y seen from x: depth(x) - depth(y)
// (0 on unit_tree)
std::int64_t cocycle_exp(const GraphWindow& win, std::uint32_t x, std::uint32_t y);
bigq cocycle_value(const GraphWindow& win, std::uint32_t x, std::uint32_t y);

// Independent oracle for the relative weight: the ratio |orbit of x under
// stab(y)| / |orbit of y under stab(x)| for the end-fixing automorphism
// group, counted by direct enumeration with the meet rule (z is in the
// stab(x)-orbit of y iff depth(z) = depth(y) and meet(x,z) is as deep as
// meet(x,y)). Counts are enumerated, never computed from a closed form.
std::pair<std::uint64_t, std::uint64_t> orbit_count_ratio(const GraphWindow& win,
                                                          std::uint32_t x,
                                                          std::uint32_t y);

std::string window_info_json(const GraphWindow& win);

}  // namespace perco
