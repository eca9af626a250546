#include "perco/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "perco/parallel.hpp"

namespace perco {

EdgeCoupling sample_coupling(const GraphWindow& win, std::uint64_t seed) {
  if (win.n_vertices == 0) throw std::invalid_argument("window not built");
  return EdgeCoupling{seed};
}

namespace {

// union-find with union by size; scalar aggregates merged at union time so a
// full sweep stays O(alpha) per edge
struct Dsu {
  const GraphWindow* win;
  std::uint32_t collar;
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> rank_size;  // cluster size at roots (32-bit ok: |V| < 2^32)
  std::vector<ClusterAgg> agg;           // valid at roots
  std::uint64_t n_clusters = 0, n_heavy = 0, n_spanning = 0;
  u128 max_weight = 0;
  std::uint64_t max_size = 0;

  explicit Dsu(const GraphWindow& w) : win(&w), collar(w.collar) {
    std::uint32_t n = w.n_vertices;
    parent.resize(n);
    rank_size.assign(n, 1);
    agg.resize(n);
    n_clusters = n;
    for (std::uint32_t v = 0; v < n; ++v) {
      parent[v] = v;
      std::uint32_t d = w.depth(v);
      agg[v] = {1, d, d, w.vertex_units(v)};
      if (d <= collar) ++n_heavy;
      max_weight = std::max(max_weight, agg[v].weight_units);
    }
    max_size = 1;
    // a singleton can never both meet the band and reach the rim (collar < H)
  }

  std::uint32_t find(std::uint32_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }

  bool is_heavy(const ClusterAgg& a) const { return a.min_depth <= collar; }
  bool is_spanning(const ClusterAgg& a) const {
    return a.min_depth <= collar && a.max_depth == win->H;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_size[a] < rank_size[b]) std::swap(a, b);
    const ClusterAgg& aa = agg[a];
    const ClusterAgg& ab = agg[b];
    int heavy_delta = -static_cast<int>(is_heavy(aa)) - static_cast<int>(is_heavy(ab));
    int span_delta =
        -static_cast<int>(is_spanning(aa)) - static_cast<int>(is_spanning(ab));
    ClusterAgg merged{aa.size + ab.size, std::min(aa.min_depth, ab.min_depth),
                      std::max(aa.max_depth, ab.max_depth),
                      aa.weight_units + ab.weight_units};
    parent[b] = a;
    rank_size[a] += rank_size[b];
    agg[a] = merged;
    --n_clusters;
    n_heavy += heavy_delta + static_cast<int>(is_heavy(merged));
    n_spanning += span_delta + static_cast<int>(is_spanning(merged));
    max_weight = std::max(max_weight, merged.weight_units);
    max_size = std::max(max_size, merged.size);
  }
};

}  // namespace

ClusterLabeling clusters_at(const GraphWindow& win, const EdgeCoupling& coupling,
                            double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
  Dsu dsu(win);
  for (std::uint32_t id = 0; id < win.edges.size(); ++id)
    if (coupling.label(id) < p) dsu.unite(win.edges[id].u, win.edges[id].v);

  ClusterLabeling lab;
  lab.win = &win;
  lab.seed = coupling.seed;
  lab.p = p;
  std::uint32_t n = win.n_vertices;
  lab.cluster_of.resize(n);
  std::vector<std::uint32_t> index_of_root(n, UINT32_MAX);
  // ascending scan: the first vertex seen in a cluster is its minimum id
  for (std::uint32_t v = 0; v < n; ++v) {
    std::uint32_t r = dsu.find(v);
    if (index_of_root[r] == UINT32_MAX) {
      index_of_root[r] = static_cast<std::uint32_t>(lab.canonical_id.size());
      lab.canonical_id.push_back(v);
      lab.agg.push_back(dsu.agg[r]);
    }
    lab.cluster_of[v] = index_of_root[r];
  }
  std::uint32_t k = lab.n_clusters();
  lab.heavy.resize(k);
  for (std::uint32_t c = 0; c < k; ++c)
    lab.heavy[c] = lab.agg[c].min_depth <= win.collar;
  lab.mem_off.assign(k + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v) ++lab.mem_off[lab.cluster_of[v] + 1];
  std::partial_sum(lab.mem_off.begin(), lab.mem_off.end(), lab.mem_off.begin());
  lab.members.resize(n);
  std::vector<std::uint64_t> cursor(lab.mem_off.begin(), lab.mem_off.end() - 1);
  for (std::uint32_t v = 0; v < n; ++v)
    lab.members[cursor[lab.cluster_of[v]]++] = v;
  return lab;
}

std::vector<std::uint64_t> ClusterLabeling::level_histogram(
    std::uint32_t cluster) const {
  if (cluster >= n_clusters()) throw std::invalid_argument("bad cluster index");
  std::vector<std::uint64_t> h(win->H + 1, 0);
  for (std::uint64_t i = mem_off[cluster]; i < mem_off[cluster + 1]; ++i)
    ++h[win->depth(members[i])];
  return h;
}

UnitRatio ClusterLabeling::cluster_weight(std::uint32_t cluster) const {
  if (cluster >= n_clusters()) throw std::invalid_argument("bad cluster index");
  return {agg[cluster].weight_units, ipow128(win->q, win->weight_exp())};
}

std::vector<std::uint32_t> classify_heavy_proxy(const ClusterLabeling& labeling,
                                                std::uint32_t collar) {
  if (collar >= labeling.win->H) throw std::invalid_argument("collar must be < height");
  std::vector<std::uint32_t> out;
  for (std::uint32_t c = 0; c < labeling.n_clusters(); ++c)
    if (labeling.agg[c].min_depth <= collar) out.push_back(c);
  return out;
}

PhaseScanResult phase_scan(const GraphWindow& win, const std::vector<double>& p_grid,
                           std::uint64_t replicas, std::uint64_t seed,
                           std::uint32_t threads) {
  if (p_grid.empty()) throw std::invalid_argument("empty p grid");
  if (!std::is_sorted(p_grid.begin(), p_grid.end()))
    throw std::invalid_argument("p grid must be sorted");
  if (p_grid.front() < 0.0 || p_grid.back() > 1.0)
    throw std::invalid_argument("p grid must lie in [0,1]");
  if (replicas == 0) throw std::invalid_argument("replicas must be >= 1");

  PhaseScanResult res;
  res.p_grid = p_grid;
  std::size_t np = p_grid.size();
  res.records.resize(np * replicas);

  parallel_for(replicas, threads, [&](std::uint64_t r) {
    EdgeCoupling coupling{replica_seed(seed, r)};
    std::uint32_t ne = static_cast<std::uint32_t>(win.edges.size());
    // one ascending sweep per replica: adding edges in label order visits all
    // levels of the coupling with O(1) work per grid point
    std::vector<std::pair<double, std::uint32_t>> order(ne);
    for (std::uint32_t id = 0; id < ne; ++id) order[id] = {coupling.label(id), id};
    std::sort(order.begin(), order.end());
    Dsu dsu(win);
    std::uint32_t i = 0;
    for (std::size_t pi = 0; pi < np; ++pi) {
      double p = p_grid[pi];
      while (i < ne && order[i].first < p) {
        const Edge& e = win.edges[order[i].second];
        dsu.unite(e.u, e.v);
        ++i;
      }
      res.records[pi * replicas + r] =
          PhaseScanRecord{p,        r,           dsu.n_clusters, dsu.n_heavy,
                          dsu.n_spanning, dsu.max_weight, dsu.max_size};
    }
  });

  res.frac_ge1.resize(np);
  res.frac_ge2.resize(np);
  res.frac_eq1.resize(np);
  for (std::size_t pi = 0; pi < np; ++pi) {
    std::uint64_t ge1 = 0, ge2 = 0, eq1 = 0;
    for (std::uint64_t r = 0; r < replicas; ++r) {
      std::uint64_t s = res.records[pi * replicas + r].n_spanning;
      ge1 += s >= 1;
      ge2 += s >= 2;
      eq1 += s == 1;
    }
    res.frac_ge1[pi] = static_cast<double>(ge1) / static_cast<double>(replicas);
    res.frac_ge2[pi] = static_cast<double>(ge2) / static_cast<double>(replicas);
    res.frac_eq1[pi] = static_cast<double>(eq1) / static_cast<double>(replicas);
    if (!res.has_pc && res.frac_ge1[pi] >= 0.5) {
      res.has_pc = true;
      res.p_c_hat = p_grid[pi];
    }
    if (!res.has_ph && res.frac_ge2[pi] >= 0.5) {
      res.has_ph = true;
      res.p_h_hat = p_grid[pi];
    }
    if (!res.has_pu && res.frac_eq1[pi] >= 0.5) {
      res.has_pu = true;
      res.p_u_hat = p_grid[pi];
    }
  }
  return res;
}

}  // namespace perco
