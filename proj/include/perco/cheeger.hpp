#pragma once

#include <cstdint>
#include <vector>

#include "perco/coupling.hpp"

namespace perco {

// Window or open-subgraph-of-one-cluster view; all geometry operations run on
// either. In cluster mode adjacency follows open edges inside the cluster.
struct GraphView {
  const GraphWindow* win = nullptr;
  const ClusterLabeling* lab = nullptr;
  std::uint32_t cluster = 0;

  bool restricted() const { return lab != nullptr; }
  bool contains(std::uint32_t v) const {
    return !restricted() || lab->cluster_of[v] == cluster;
  }
  template <class Fn>
  void for_neighbors(std::uint32_t v, Fn&& fn) const {
    for (std::uint32_t a = win->adj_off[v]; a < win->adj_off[v + 1]; ++a) {
      if (restricted() && !lab->edge_open(win->adj_eid[a])) continue;
      fn(win->adj_vtx[a], win->adj_eid[a]);
    }
  }
};

GraphView full_view(const GraphWindow& win);
GraphView cluster_view(const ClusterLabeling& labeling, std::uint32_t cluster);

// w(vertex boundary of F) / w(F); boundary counts in-view neighbors only.
// rim_censored reports whether F touches vertices whose window neighborhood
// is truncated, i.e. the quotient underestimates the untruncated one.
UnitRatio vertex_boundary_ratio(const GraphView& view,
                                const std::vector<std::uint32_t>& F,
                                bool* rim_censored = nullptr);

struct CheegerReport {
  std::uint32_t root = 0;
  std::uint32_t k = 0;
  UnitRatio phi_k;                     // min ratio over connected F containing root, |F| <= k
  std::vector<std::uint32_t> witness;  // a minimizing F
  bool rim_censored = false;
  bool budget_exhausted = false;       // enumeration cap hit; phi_k is partial
  std::uint64_t subsets_enumerated = 0;
  UnitRatio phi_ball;                  // min w(S_{n+1}) / w(B_n) over n < n_ball
  std::uint32_t n_ball = 0;
};

CheegerReport weighted_cheeger_restricted(const GraphView& view, std::uint32_t root,
                                          std::uint32_t k, std::uint32_t k_max = 12,
                                          std::uint64_t subset_budget = 5000000);
CheegerReport weighted_cheeger_restricted(const GraphWindow& win, std::uint32_t root,
                                          std::uint32_t k, std::uint32_t k_max = 12,
                                          std::uint64_t subset_budget = 5000000);

// cheeger * w_o * (1 + cheeger)^(n-1)
bigq growth_lower_bound(const bigq& cheeger, const bigq& w_o, std::uint32_t n);

struct GrowthProfile {
  std::uint32_t root = 0;
  std::uint32_t n_max = 0;
  std::vector<u128> sphere_units;  // index 0..n_max; sphere_units[0] = w(root)
  std::vector<u128> ball_units;
};

// sphere/ball weights around root; in window mode every vertex within
// n_max - 1 must have an untruncated neighborhood ("boundary intrusion")
GrowthProfile growth_profile(const GraphView& view, std::uint32_t root,
                             std::uint32_t n_max);

struct GrowthCheck {
  GrowthProfile profile;
  UnitRatio phi_ball;
  std::vector<std::uint8_t> pass;  // index 1..n_max
  bool all_pass = false;
};

// checks w(S_n) >= growth_lower_bound(phi_ball, w(root), n) for 1 <= n <= n_max
GrowthCheck verify_growth(const GraphView& view, std::uint32_t root,
                          std::uint32_t n_max);
GrowthCheck verify_growth(const GraphWindow& win, std::uint32_t root,
                          std::uint32_t n_max);

struct AnnuliProfile {
  std::uint32_t root = 0;
  std::uint32_t N = 1;
  std::uint32_t n_max = 0;
  std::vector<std::uint64_t> m;          // m[1..n_max], m_{n+1} = N*m_n + 1
  std::vector<std::uint64_t> d_ell;      // labeled distance from root (UINT64_MAX unreachable)
  std::vector<std::int32_t> annulus_of;  // -1 if in no annulus
  std::vector<std::uint64_t> annulus_size;
  std::vector<u128> annulus_units;
  bool disjoint = false;
  bool contains_spheres = false;  // graph sphere of radius m_n embeds in annulus n
};

// labels: one value in 1..N per edge id
AnnuliProfile labeled_annuli(const GraphView& view,
                             const std::vector<std::uint8_t>& labels,
                             std::uint32_t root, std::uint32_t N,
                             std::uint32_t n_max);
AnnuliProfile labeled_annuli(const GraphWindow& win,
                             const std::vector<std::uint8_t>& labels,
                             std::uint32_t root, std::uint32_t N,
                             std::uint32_t n_max);

// edge labels for the cluster-metric experiment: open edges get 1, closed
// same-cluster edges the in-cluster hop distance capped at N, cross-cluster
// edges N
std::vector<std::uint8_t> cluster_metric_labels(const ClusterLabeling& labeling,
                                                std::uint32_t N);

}  // namespace perco
