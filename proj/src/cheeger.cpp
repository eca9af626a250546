#include "perco/cheeger.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace perco {

GraphView full_view(const GraphWindow& win) { return GraphView{&win, nullptr, 0}; }

GraphView cluster_view(const ClusterLabeling& labeling, std::uint32_t cluster) {
  if (cluster >= labeling.n_clusters())
    throw std::invalid_argument("bad cluster index");
  return GraphView{labeling.win, &labeling, cluster};
}

UnitRatio vertex_boundary_ratio(const GraphView& view,
                                const std::vector<std::uint32_t>& F,
                                bool* rim_censored) {
  const GraphWindow& win = *view.win;
  if (F.empty()) throw std::invalid_argument("empty subset");
  std::vector<std::uint8_t> in_f(win.n_vertices, 0);
  for (std::uint32_t v : F) {
    if (v >= win.n_vertices || !view.contains(v))
      throw std::invalid_argument("subset vertex outside view");
    in_f[v] = 1;
  }
  bool censored = false;
  u128 wf = 0, wb = 0;
  std::vector<std::uint8_t> seen(win.n_vertices, 0);
  for (std::uint32_t v : F) {
    wf += win.vertex_units(v);
    if (!win.interior(v)) censored = true;
    view.for_neighbors(v, [&](std::uint32_t u, std::uint32_t) {
      if (!in_f[u] && !seen[u]) {
        seen[u] = 1;
        wb += win.vertex_units(u);
      }
    });
  }
  if (rim_censored) *rim_censored = censored;
  return {wb, wf};
}

namespace {

struct SubsetEnumerator {
  const GraphView& view;
  const GraphWindow& win;
  std::uint32_t k;
  std::uint64_t budget;
  std::uint64_t visited = 0;
  bool exhausted = false;

  std::vector<std::uint32_t> current;
  u128 w_current = 0;

  // epoch-marked scratch for boundary accounting
  std::vector<std::uint32_t> mark;
  std::uint32_t epoch = 0;
  std::vector<std::uint8_t> in_set;

  UnitRatio best{0, 0};  // den 0 = unset
  std::vector<std::uint32_t> best_set;
  double best_ld = 0;

  SubsetEnumerator(const GraphView& v, std::uint32_t k_, std::uint64_t budget_)
      : view(v), win(*v.win), k(k_), budget(budget_) {
    mark.assign(win.n_vertices, 0);
    in_set.assign(win.n_vertices, 0);
  }

  void consider() {
    ++visited;
    ++epoch;
    u128 wb = 0;
    for (std::uint32_t v : current)
      view.for_neighbors(v, [&](std::uint32_t u, std::uint32_t) {
        if (!in_set[u] && mark[u] != epoch) {
          mark[u] = epoch;
          wb += win.vertex_units(u);
        }
      });
    double ratio_ld = static_cast<double>(static_cast<long double>(wb) /
                                          static_cast<long double>(w_current));
    if (best.den != 0 && ratio_ld > best_ld * (1.0 + 1e-9)) return;
    UnitRatio ratio{wb, w_current};
    if (best.den == 0 || cmp(ratio, best) < 0) {
      best = ratio;
      best_set = current;
      best_ld = to_double(ratio);
    }
  }

  // connected-subset enumeration: candidates are processed in ascending id
  // order and excluded afterwards, so every subset appears exactly once
  void extend(std::vector<std::uint32_t> cand, std::vector<std::uint8_t>& excluded) {
    if (exhausted) return;
    consider();
    if (visited >= budget) {
      exhausted = true;
      return;
    }
    if (current.size() == k) return;
    std::vector<std::uint32_t> newly_excluded;
    while (!cand.empty() && !exhausted) {
      std::uint32_t v = cand.back();
      cand.pop_back();
      current.push_back(v);
      in_set[v] = 1;
      w_current += win.vertex_units(v);
      std::vector<std::uint32_t> next = cand;
      view.for_neighbors(v, [&](std::uint32_t u, std::uint32_t) {
        if (!in_set[u] && !excluded[u] &&
            std::find(next.begin(), next.end(), u) == next.end())
          next.push_back(u);
      });
      extend(std::move(next), excluded);
      w_current -= win.vertex_units(v);
      in_set[v] = 0;
      current.pop_back();
      excluded[v] = 1;
      newly_excluded.push_back(v);
    }
    for (std::uint32_t v : newly_excluded) excluded[v] = 0;
  }
};

// multi-source BFS distance from root to the nearest rim vertex in the view
std::uint32_t dist_to_rim(const GraphView& view, std::uint32_t root) {
  const GraphWindow& win = *view.win;
  if (!win.interior(root)) return 0;
  std::queue<std::pair<std::uint32_t, std::uint32_t>> q;
  std::vector<std::uint8_t> seen(win.n_vertices, 0);
  q.push({root, 0});
  seen[root] = 1;
  while (!q.empty()) {
    auto [v, d] = q.front();
    q.pop();
    if (!win.interior(v)) return d;
    view.for_neighbors(v, [&](std::uint32_t u, std::uint32_t) {
      if (!seen[u]) {
        seen[u] = 1;
        q.push({u, d + 1});
      }
    });
  }
  return UINT32_MAX;  // view exhausted before any rim vertex
}

GrowthProfile profile_impl(const GraphView& view, std::uint32_t root,
                           std::uint32_t n_max, bool window_intrusion_check) {
  const GraphWindow& win = *view.win;
  if (root >= win.n_vertices || !view.contains(root))
    throw std::invalid_argument("root outside view");
  GrowthProfile prof;
  prof.root = root;
  prof.n_max = n_max;
  prof.sphere_units.assign(n_max + 1, 0);
  prof.ball_units.assign(n_max + 1, 0);

  std::vector<std::uint32_t> dist(win.n_vertices, UINT32_MAX);
  std::queue<std::uint32_t> q;
  dist[root] = 0;
  q.push(root);
  while (!q.empty()) {
    std::uint32_t v = q.front();
    q.pop();
    std::uint32_t d = dist[v];
    if (window_intrusion_check && d + 1 <= n_max && !win.interior(v) && n_max >= 1)
      throw std::invalid_argument(
          "boundary intrusion: sphere radius exceeds the window interior");
    prof.sphere_units[d] += win.vertex_units(v);
    if (d == n_max) continue;
    view.for_neighbors(v, [&](std::uint32_t u, std::uint32_t) {
      if (dist[u] == UINT32_MAX) {
        dist[u] = d + 1;
        q.push(u);
      }
    });
  }
  u128 acc = 0;
  for (std::uint32_t n = 0; n <= n_max; ++n) {
    acc += prof.sphere_units[n];
    prof.ball_units[n] = acc;
  }
  return prof;
}

}  // namespace

CheegerReport weighted_cheeger_restricted(const GraphView& view, std::uint32_t root,
                                          std::uint32_t k, std::uint32_t k_max,
                                          std::uint64_t subset_budget) {
  const GraphWindow& win = *view.win;
  if (root >= win.n_vertices || !view.contains(root))
    throw std::invalid_argument("root outside view");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (k > k_max) throw std::invalid_argument("k exceeds k_max");

  CheegerReport rep;
  rep.root = root;
  rep.k = k;

  SubsetEnumerator en(view, k, subset_budget);
  std::vector<std::uint8_t> excluded(win.n_vertices, 0);
  en.current.push_back(root);
  en.in_set[root] = 1;
  en.w_current = win.vertex_units(root);
  std::vector<std::uint32_t> cand;
  view.for_neighbors(root, [&](std::uint32_t u, std::uint32_t) {
    if (std::find(cand.begin(), cand.end(), u) == cand.end()) cand.push_back(u);
  });
  // descending here so the while loop pops ascending ids
  std::sort(cand.rbegin(), cand.rend());
  en.extend(std::move(cand), excluded);

  rep.phi_k = en.best;
  rep.witness = en.best_set;
  rep.budget_exhausted = en.exhausted;
  rep.subsets_enumerated = en.visited;
  bool censored = false;
  for (std::uint32_t v : rep.witness)
    if (!win.interior(v)) censored = true;
  rep.rim_censored = censored;

  // ball quotient: largest radius whose sphere data is untruncated (window
  // mode) or nonempty (cluster mode)
  std::uint32_t limit;
  if (view.restricted()) {
    GrowthProfile ecc = profile_impl(view, root, win.n_vertices, false);
    std::uint32_t e = 0;
    for (std::uint32_t n = 0; n < ecc.sphere_units.size(); ++n)
      if (ecc.sphere_units[n] > 0) e = n;
    limit = e;
  } else {
    limit = dist_to_rim(view, root);
  }
  if (limit != UINT32_MAX && limit >= 1) {
    rep.n_ball = limit - 1;
    GrowthProfile prof = profile_impl(view, root, limit, false);
    UnitRatio best{0, 0};
    for (std::uint32_t n = 0; n + 1 <= limit; ++n) {
      UnitRatio r{prof.sphere_units[n + 1], prof.ball_units[n]};
      if (best.den == 0 || cmp(r, best) < 0) best = r;
    }
    if (best.den != 0) rep.phi_ball = best;
  }
  return rep;
}

CheegerReport weighted_cheeger_restricted(const GraphWindow& win, std::uint32_t root,
                                          std::uint32_t k, std::uint32_t k_max,
                                          std::uint64_t subset_budget) {
  return weighted_cheeger_restricted(full_view(win), root, k, k_max, subset_budget);
}

bigq growth_lower_bound(const bigq& cheeger, const bigq& w_o, std::uint32_t n) {
  if (cheeger <= 0) throw std::invalid_argument("cheeger bound must be positive");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  bigq grow = 1;
  bigq base = 1 + cheeger;
  for (std::uint32_t i = 1; i < n; ++i) grow *= base;
  return cheeger * w_o * grow;
}

GrowthProfile growth_profile(const GraphView& view, std::uint32_t root,
                             std::uint32_t n_max) {
  return profile_impl(view, root, n_max, !view.restricted());
}

GrowthCheck verify_growth(const GraphView& view, std::uint32_t root,
                          std::uint32_t n_max) {
  GrowthCheck check;
  check.profile = growth_profile(view, root, n_max);
  check.pass.assign(n_max + 1, 1);
  if (n_max == 0) {  // degenerate: nothing to bound
    check.phi_ball = {0, 1};
    check.all_pass = true;
    return check;
  }
  UnitRatio best{0, 0};
  for (std::uint32_t n = 0; n + 1 <= n_max; ++n) {
    UnitRatio r{check.profile.sphere_units[n + 1], check.profile.ball_units[n]};
    if (best.den == 0 || cmp(r, best) < 0) best = r;
  }
  check.phi_ball = best;
  check.all_pass = true;
  bigq phi = to_bigq(best);
  bigq w_o = to_bigz(check.profile.sphere_units[0]);
  if (phi > 0) {
    for (std::uint32_t n = 1; n <= n_max; ++n) {
      bigq lower = growth_lower_bound(phi, w_o, n);
      bool ok = bigq(to_bigz(check.profile.sphere_units[n])) >= lower;
      check.pass[n] = ok;
      check.all_pass = check.all_pass && ok;
    }
  }
  return check;
}

GrowthCheck verify_growth(const GraphWindow& win, std::uint32_t root,
                          std::uint32_t n_max) {
  return verify_growth(full_view(win), root, n_max);
}

AnnuliProfile labeled_annuli(const GraphView& view,
                             const std::vector<std::uint8_t>& labels,
                             std::uint32_t root, std::uint32_t N,
                             std::uint32_t n_max) {
  const GraphWindow& win = *view.win;
  if (root >= win.n_vertices || !view.contains(root))
    throw std::invalid_argument("root outside view");
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (n_max < 1 || n_max > 60) throw std::invalid_argument("n_max must be in 1..60");
  if (labels.size() != win.edges.size())
    throw std::invalid_argument("one label per edge required");
  for (std::uint8_t l : labels)
    if (l < 1 || l > N) throw std::invalid_argument("label out of range");

  AnnuliProfile prof;
  prof.root = root;
  prof.N = N;
  prof.n_max = n_max;
  prof.m.assign(n_max + 1, 0);
  prof.m[1] = 1;
  constexpr std::uint64_t m_cap = 1ull << 62;  // beyond any window distance
  for (std::uint32_t i = 1; i < n_max; ++i)
    prof.m[i + 1] = prof.m[i] >= m_cap / N ? m_cap : N * prof.m[i] + 1;

  // labeled shortest-path distances (small integer weights)
  prof.d_ell.assign(win.n_vertices, UINT64_MAX);
  using Item = std::pair<std::uint64_t, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  prof.d_ell[root] = 0;
  heap.push({0, root});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d != prof.d_ell[v]) continue;
    view.for_neighbors(v, [&](std::uint32_t u, std::uint32_t eid) {
      std::uint64_t nd = d + labels[eid];
      if (nd < prof.d_ell[u]) {
        prof.d_ell[u] = nd;
        heap.push({nd, u});
      }
    });
  }

  prof.annulus_of.assign(win.n_vertices, -1);
  prof.annulus_size.assign(n_max + 1, 0);
  prof.annulus_units.assign(n_max + 1, 0);
  prof.disjoint = true;
  for (std::uint32_t v = 0; v < win.n_vertices; ++v) {
    if (!view.contains(v) || prof.d_ell[v] == UINT64_MAX) continue;
    std::uint32_t hits = 0;
    for (std::uint32_t nn = 1; nn <= n_max; ++nn) {
      if (prof.m[nn] <= prof.d_ell[v] && prof.d_ell[v] <= N * prof.m[nn]) {
        ++hits;
        prof.annulus_of[v] = static_cast<std::int32_t>(nn);
        prof.annulus_size[nn] += 1;
        prof.annulus_units[nn] += win.vertex_units(v);
      }
    }
    if (hits > 1) prof.disjoint = false;
  }

  // graph spheres of radius m_n must land inside annulus n
  std::vector<std::uint32_t> gdist(win.n_vertices, UINT32_MAX);
  std::queue<std::uint32_t> q;
  gdist[root] = 0;
  q.push(root);
  while (!q.empty()) {
    std::uint32_t v = q.front();
    q.pop();
    view.for_neighbors(v, [&](std::uint32_t u, std::uint32_t) {
      if (gdist[u] == UINT32_MAX) {
        gdist[u] = gdist[v] + 1;
        q.push(u);
      }
    });
  }
  prof.contains_spheres = true;
  for (std::uint32_t v = 0; v < win.n_vertices; ++v) {
    if (!view.contains(v) || gdist[v] == UINT32_MAX) continue;
    for (std::uint32_t nn = 1; nn <= n_max; ++nn) {
      if (gdist[v] == prof.m[nn]) {
        bool inside =
            prof.m[nn] <= prof.d_ell[v] && prof.d_ell[v] <= N * prof.m[nn];
        prof.contains_spheres = prof.contains_spheres && inside;
      }
    }
  }
  return prof;
}

AnnuliProfile labeled_annuli(const GraphWindow& win,
                             const std::vector<std::uint8_t>& labels,
                             std::uint32_t root, std::uint32_t N,
                             std::uint32_t n_max) {
  return labeled_annuli(full_view(win), labels, root, N, n_max);
}

std::vector<std::uint8_t> cluster_metric_labels(const ClusterLabeling& labeling,
                                                std::uint32_t N) {
  const GraphWindow& win = *labeling.win;
  if (N < 1 || N > 255) throw std::invalid_argument("N must be in 1..255");
  std::vector<std::uint8_t> labels(win.edges.size(), static_cast<std::uint8_t>(N));
  std::vector<std::uint32_t> dist(win.n_vertices, UINT32_MAX);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t id = 0; id < win.edges.size(); ++id) {
    const Edge& e = win.edges[id];
    if (labeling.edge_open(id)) {
      labels[id] = 1;
      continue;
    }
    if (labeling.cluster_of[e.u] != labeling.cluster_of[e.v]) continue;
    // closed edge inside one cluster: in-cluster hop distance capped at N
    touched.clear();
    dist[e.u] = 0;
    touched.push_back(e.u);
    std::uint32_t found = N;
    std::size_t head = 0;
    while (head < touched.size()) {
      std::uint32_t v = touched[head++];
      if (dist[v] >= N) break;
      bool done = false;
      for (std::uint32_t a = win.adj_off[v]; a < win.adj_off[v + 1] && !done; ++a) {
        if (!labeling.edge_open(win.adj_eid[a])) continue;
        std::uint32_t u = win.adj_vtx[a];
        if (dist[u] != UINT32_MAX) continue;
        dist[u] = dist[v] + 1;
        touched.push_back(u);
        if (u == e.v) {
          found = std::min<std::uint32_t>(N, dist[u]);
          done = true;
        }
      }
      if (done) break;
    }
    labels[id] = static_cast<std::uint8_t>(found);
    for (std::uint32_t v : touched) dist[v] = UINT32_MAX;
  }
  return labels;
}

}  // namespace perco
