#include "perco/touching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace perco {

std::vector<std::uint32_t> touching_set(const ClusterLabeling& labeling,
                                        std::uint32_t C, std::uint32_t C2) {
  if (C >= labeling.n_clusters() || C2 >= labeling.n_clusters())
    throw std::invalid_argument("bad cluster index");
  if (C == C2) throw std::invalid_argument("touching set needs distinct clusters");
  const GraphWindow& win = *labeling.win;
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = labeling.mem_off[C]; i < labeling.mem_off[C + 1]; ++i) {
    std::uint32_t v = labeling.members[i];
    for (std::uint32_t a = win.adj_off[v]; a < win.adj_off[v + 1]; ++a) {
      if (labeling.cluster_of[win.adj_vtx[a]] == C2) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;  // ascending: members are stored sorted
}

UnitRatio touching_weight(const ClusterLabeling& labeling, std::uint32_t C,
                          std::uint32_t C2) {
  const GraphWindow& win = *labeling.win;
  u128 units = 0;
  for (std::uint32_t v : touching_set(labeling, C, C2)) units += win.vertex_units(v);
  return {units, ipow128(win.q, win.weight_exp())};
}

TouchingPartition touching_partition(const ClusterLabeling& labeling,
                                     std::uint64_t seed, PickLaw law) {
  const GraphWindow& win = *labeling.win;
  std::uint32_t n = win.n_vertices;
  TouchingPartition part;
  part.picked.assign(n, -1);
  part.class_of.resize(n);

  std::uint64_t pick_stream = rng::mix(seed, rng::TAG_PICK);
  std::vector<std::uint32_t> local;
  for (std::uint32_t v = 0; v < n; ++v) {
    local.clear();
    if (law == PickLaw::cluster_uniform) {
      // uniform over the set of distinct neighboring clusters
      for (std::uint32_t a = win.adj_off[v]; a < win.adj_off[v + 1]; ++a) {
        std::uint32_t c = labeling.cluster_of[win.adj_vtx[a]];
        if (c != labeling.cluster_of[v]) local.push_back(c);
      }
      std::sort(local.begin(), local.end());
      local.erase(std::unique(local.begin(), local.end()), local.end());
    } else {
      // uniform over neighboring vertices in foreign clusters
      // (multiplicity-weighted cluster pick)
      for (std::uint32_t a = win.adj_off[v]; a < win.adj_off[v + 1]; ++a) {
        std::uint32_t u = win.adj_vtx[a];
        if (labeling.cluster_of[u] != labeling.cluster_of[v]) local.push_back(u);
      }
      std::sort(local.begin(), local.end());
    }
    if (local.empty()) continue;
    std::uint64_t h = rng::mix(pick_stream, v);
    std::uint32_t chosen = local[rng::bounded(h, local.size())];
    part.picked[v] =
        law == PickLaw::cluster_uniform ? chosen : labeling.cluster_of[chosen];
  }

  std::map<std::pair<std::int64_t, std::int64_t>, std::uint32_t> class_index;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (part.picked[v] < 0) {
      // singleton class
      part.class_of[v] = part.n_classes++;
      part.class_key.push_back(
          {static_cast<std::int64_t>(labeling.canonical_id[labeling.cluster_of[v]]),
           -1});
      continue;
    }
    std::pair<std::int64_t, std::int64_t> key{labeling.cluster_of[v],
                                              part.picked[v]};
    auto it = class_index.find(key);
    if (it == class_index.end()) {
      it = class_index.emplace(key, part.n_classes++).first;
      part.class_key.push_back(
          {static_cast<std::int64_t>(labeling.canonical_id[key.first]),
           static_cast<std::int64_t>(labeling.canonical_id[key.second])});
    }
    part.class_of[v] = it->second;
  }
  return part;
}

namespace {

// all directed touches (C, C2, vertex of C) found by one sweep over
// mixed-endpoint edges
std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>>
directed_touches(const ClusterLabeling& labeling) {
  const GraphWindow& win = *labeling.win;
  std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> t;
  for (const Edge& e : win.edges) {
    std::uint32_t cu = labeling.cluster_of[e.u], cv = labeling.cluster_of[e.v];
    if (cu == cv) continue;
    t.emplace_back(cu, cv, e.u);
    t.emplace_back(cv, cu, e.v);
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

}  // namespace

NeighborGraph neighbor_graph(const ClusterLabeling& labeling,
                             NeighborRelation relation, std::uint32_t collar,
                             std::uint64_t finite_threshold) {
  const GraphWindow& win = *labeling.win;
  if (collar >= win.H) throw std::invalid_argument("collar must be < height");
  NeighborGraph g;
  g.relation = relation;
  g.n_clusters = labeling.n_clusters();
  g.degree.assign(g.n_clusters, 0);
  g.heavy.resize(g.n_clusters);
  for (std::uint32_t c = 0; c < g.n_clusters; ++c)
    g.heavy[c] = labeling.agg[c].min_depth <= collar;

  auto touches = directed_touches(labeling);
  // per directed pair: touch count and band intersection
  std::size_t i = 0;
  std::map<std::pair<std::uint32_t, std::uint32_t>,
           std::pair<std::uint64_t, bool>>
      dir;
  while (i < touches.size()) {
    auto [c, c2, v0] = touches[i];
    std::uint64_t count = 0;
    bool band = false;
    while (i < touches.size() && std::get<0>(touches[i]) == c &&
           std::get<1>(touches[i]) == c2) {
      ++count;
      band = band || win.depth(std::get<2>(touches[i])) <= collar;
      ++i;
    }
    (void)v0;
    dir[{c, c2}] = {count, band};
  }
  for (const auto& [key, val] : dir) {
    auto [c, c2] = key;
    if (c > c2) continue;  // handle each unordered pair once
    auto rev = dir.at({c2, c});
    bool keep = false;
    switch (relation) {
      case NeighborRelation::nonempty: keep = true; break;
      case NeighborRelation::heavy_proxy_touch:
        keep = val.second || rev.second;
        break;
      case NeighborRelation::finite_touch:
        keep = val.first <= finite_threshold || rev.first <= finite_threshold;
        break;
    }
    if (keep) {
      g.edges.emplace_back(c, c2);
      ++g.degree[c];
      ++g.degree[c2];
    }
  }
  return g;
}

RepulsionTable repulsion_statistics(const ClusterLabeling& labeling,
                                    std::uint32_t collar, bool require_rim_reach) {
  const GraphWindow& win = *labeling.win;
  if (collar >= win.H) throw std::invalid_argument("collar must be < height");
  std::vector<std::uint32_t> heavies;
  for (std::uint32_t c = 0; c < labeling.n_clusters(); ++c) {
    if (labeling.agg[c].min_depth > collar) continue;
    if (require_rim_reach && labeling.agg[c].max_depth != win.H) continue;
    heavies.push_back(c);
  }

  // directed touching weights/sizes restricted to the heavy set
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<u128, std::uint64_t>>
      tau;
  std::vector<std::uint8_t> is_heavy(labeling.n_clusters(), 0);
  for (std::uint32_t c : heavies) is_heavy[c] = 1;
  for (const auto& [c, c2, v] : directed_touches(labeling))
    if (is_heavy[c] && is_heavy[c2]) {
      auto& slot = tau[{c, c2}];
      slot.first += win.vertex_units(v);
      slot.second += 1;
    }

  RepulsionTable table;
  u128 den = ipow128(win.q, win.weight_exp());
  std::vector<double> pos;
  for (std::uint32_t c : heavies)
    for (std::uint32_t c2 : heavies) {
      if (c == c2) continue;
      RepulsionRow row;
      row.C = labeling.canonical_id[c];
      row.C2 = labeling.canonical_id[c2];
      row.wC = {labeling.agg[c].weight_units, den};
      row.wC2 = {labeling.agg[c2].weight_units, den};
      auto it = tau.find({c, c2});
      if (it != tau.end()) {
        row.wTau = {it->second.first, den};
        row.sizeTau = it->second.second;
        ++table.n_nonempty;
        pos.push_back(to_double(row.wTau));
      } else {
        row.wTau = {0, den};
      }
      table.rows.push_back(row);
    }

  if (!pos.empty()) {
    std::sort(pos.begin(), pos.end());
    auto quantile = [&](double f) {
      double idx = f * static_cast<double>(pos.size() - 1);
      std::size_t lo = static_cast<std::size_t>(idx);
      std::size_t hi = std::min(lo + 1, pos.size() - 1);
      double frac = idx - static_cast<double>(lo);
      return pos[lo] * (1.0 - frac) + pos[hi] * frac;
    };
    table.wtau_quantiles = {quantile(0.0), quantile(0.25), quantile(0.5),
                            quantile(0.75), quantile(1.0)};
  }
  return table;
}

std::vector<MergingRow> merging_census(const GraphWindow& win,
                                       const EdgeCoupling& coupling, double p1,
                                       double p2, std::uint32_t collar) {
  if (p1 > p2) throw std::invalid_argument("merging census requires p1 <= p2");
  ClusterLabeling lab1 = clusters_at(win, coupling, p1);
  ClusterLabeling lab2 = clusters_at(win, coupling, p2);
  std::vector<std::uint32_t> heavy1 = classify_heavy_proxy(lab1, collar);
  std::vector<std::uint32_t> heavy2 = classify_heavy_proxy(lab2, collar);
  std::vector<std::uint64_t> count(lab2.n_clusters(), 0);
  for (std::uint32_t c1 : heavy1) {
    std::uint32_t v = lab1.members[lab1.mem_off[c1]];  // any member
    ++count[lab2.cluster_of[v]];
  }
  std::vector<MergingRow> rows;
  rows.reserve(heavy2.size());
  for (std::uint32_t c2 : heavy2)
    rows.push_back({lab2.canonical_id[c2], count[c2]});
  return rows;
}

}  // namespace perco
