#include "perco/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perco/parallel.hpp"

namespace perco {

std::string KernelSpec::name() const {
  switch (kind) {
    case Kind::to_parent: return "to_parent";
    case Kind::to_children: return "to_children";
    case Kind::to_grandparent: return "to_grandparent";
    case Kind::sphere_uniform: return "sphere_uniform:" + std::to_string(r);
    case Kind::open_neighbors: return "open_neighbors";
  }
  throw std::invalid_argument("bad kernel kind");
}

KernelSpec KernelSpec::parse(std::string_view name) {
  if (name == "to_parent") return {Kind::to_parent, 0};
  if (name == "to_children") return {Kind::to_children, 0};
  if (name == "to_grandparent") return {Kind::to_grandparent, 0};
  if (name == "open_neighbors") return {Kind::open_neighbors, 0};
  constexpr std::string_view prefix = "sphere_uniform:";
  if (name.substr(0, prefix.size()) == prefix) {
    int r = std::stoi(std::string(name.substr(prefix.size())));
    if (r < 1 || r > 16) throw std::invalid_argument("sphere radius must be in 1..16");
    return {Kind::sphere_uniform, static_cast<std::uint32_t>(r)};
  }
  throw std::invalid_argument("unknown kernel: " + std::string(name));
}

namespace {

// depth interval on which the kernel's support and any sphere sizes it reads
// are exactly the untruncated ones
std::pair<std::int64_t, std::int64_t> required_depths(const GraphWindow& win,
                                                      const KernelSpec& spec) {
  std::int64_t H = win.H;
  switch (spec.kind) {
    case KernelSpec::Kind::to_parent:
    case KernelSpec::Kind::to_children: return {1, H - 1};
    case KernelSpec::Kind::to_grandparent: return {2, H - 2};
    case KernelSpec::Kind::sphere_uniform: return {2 * spec.r, H - 2 * spec.r};
    case KernelSpec::Kind::open_neighbors:
      return win.family == Family::grandparent ? std::pair<std::int64_t, std::int64_t>{2, H - 2}
                                               : std::pair<std::int64_t, std::int64_t>{1, H - 1};
  }
  throw std::invalid_argument("bad kernel kind");
}

// number of vertices at ancestry distance exactly r from x (untruncated by
// the margin contract)
std::uint64_t tree_sphere_size(const GraphWindow& win, std::uint32_t x,
                               std::uint32_t r) {
  std::uint32_t dx = win.depth(x);
  std::uint64_t n = 0;
  std::uint32_t anc = x;
  for (std::uint32_t a = 0; a <= std::min(r, dx); ++a) {
    std::uint32_t k = r - a;  // descend k generations below the a-th ancestor
    if (a == r) {
      n += 1;
    } else {
      auto [lo, hi] = win.subtree_range(anc, k);
      std::uint64_t below = hi - lo;
      if (a > 0) {
        // exclude the branch leading back toward x
        std::uint32_t toward = x;
        for (std::uint32_t s = 1; s < a; ++s) toward = win.parent(toward);
        auto [elo, ehi] = win.subtree_range(toward, k - 1);
        below -= ehi - elo;
      }
      n += below;
    }
    if (a < std::min(r, dx)) anc = win.parent(anc);
  }
  return n;
}

bigq weight_rel(const GraphWindow& win, std::uint32_t x, std::uint32_t y) {
  return cocycle_value(win, x, y);  // w^x(y)
}

// deterministic kernel value as an exact rational
bigq kernel_value(const GraphWindow& win, const KernelSpec& spec, std::uint32_t x,
                  std::uint32_t y) {
  switch (spec.kind) {
    case KernelSpec::Kind::to_parent:
      return (x != 0 && win.parent(x) == y) ? 1 : 0;
    case KernelSpec::Kind::to_children:
      return (y != 0 && win.parent(y) == x) ? 1 : 0;
    case KernelSpec::Kind::to_grandparent:
      return (win.depth(x) >= 2 && win.parent(win.parent(x)) == y) ? 1 : 0;
    case KernelSpec::Kind::sphere_uniform: {
      if (win.tree_dist(x, y) != spec.r) return 0;
      return bigq(1, tree_sphere_size(win, x, spec.r));
    }
    case KernelSpec::Kind::open_neighbors: break;
  }
  throw std::invalid_argument("kernel is not deterministic");
}

}  // namespace

std::uint32_t tmtp_eval_vertex(const GraphWindow& win, const KernelSpec& spec) {
  auto [lo, hi] = required_depths(win, spec);
  if (lo > hi)
    throw std::invalid_argument("no interior vertex for range: window too shallow");
  std::int64_t d = std::clamp<std::int64_t>((win.H + 1) / 2, lo, hi);
  return static_cast<std::uint32_t>(win.level_off[static_cast<std::size_t>(d)]);
}

TMTPReport check_tmtp(const GraphWindow& win, const KernelSpec& spec, double p,
                      std::uint64_t seed, std::uint64_t replicas) {
  TMTPReport rep;
  rep.kernel = spec.name();
  rep.deterministic = spec.deterministic();
  rep.p = p;
  std::uint32_t rho = tmtp_eval_vertex(win, spec);
  rep.rho = rho;

  if (spec.deterministic()) {
    // both sums range over the ancestry ball that supports the kernel
    std::uint32_t range = spec.kind == KernelSpec::Kind::sphere_uniform ? spec.r
                          : spec.kind == KernelSpec::Kind::to_grandparent ? 2
                                                                          : 1;
    std::uint32_t d_rho = win.depth(rho);
    bigq lhs = 0, rhs = 0;
    std::uint32_t d_lo = d_rho > range ? d_rho - range : 0;
    std::uint32_t d_hi = std::min(win.H, d_rho + range);
    for (std::uint32_t d = d_lo; d <= d_hi; ++d) {
      for (std::uint64_t z = win.level_off[d]; z < win.level_off[d + 1]; ++z) {
        std::uint32_t v = static_cast<std::uint32_t>(z);
        if (win.tree_dist(rho, v) > range) continue;
        lhs += kernel_value(win, spec, rho, v);
        bigq fin = kernel_value(win, spec, v, rho);
        if (fin != 0) rhs += fin * weight_rel(win, rho, v);
      }
    }
    rep.lhs = lhs;
    rep.rhs = rhs;
    return rep;
  }

  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
  if (replicas == 0) throw std::invalid_argument("replicas must be >= 1");
  rep.replicas = replicas;
  // mass 1 to each open graph neighbor: per replica only the labels of the
  // edges at rho are needed
  double sum_l = 0, sum_l2 = 0, sum_r = 0, sum_r2 = 0, sum_d = 0, sum_d2 = 0;
  for (std::uint64_t rep_i = 0; rep_i < replicas; ++rep_i) {
    EdgeCoupling coupling{replica_seed(seed, rep_i)};
    double l = 0, rr = 0;
    for (std::uint32_t a = win.adj_off[rho]; a < win.adj_off[rho + 1]; ++a) {
      if (coupling.label(win.adj_eid[a]) < p) {
        l += 1.0;
        rr += weight_rel(win, rho, win.adj_vtx[a]).convert_to<double>();
      }
    }
    double d = l - rr;
    sum_l += l;
    sum_l2 += l * l;
    sum_r += rr;
    sum_r2 += rr * rr;
    sum_d += d;
    sum_d2 += d * d;
  }
  double n = static_cast<double>(replicas);
  auto se = [&](double s, double s2) {
    double var = std::max(0.0, (s2 - s * s / n) / (n - 1));
    return std::sqrt(var / n);
  };
  rep.mean_lhs = sum_l / n;
  rep.mean_rhs = sum_r / n;
  rep.se_lhs = se(sum_l, sum_l2);
  rep.se_rhs = se(sum_r, sum_r2);
  rep.mean_diff = sum_d / n;
  rep.se_diff = se(sum_d, sum_d2);
  return rep;
}

TransportFlows geodesic_transport(const ClusterLabeling& labeling) {
  const GraphWindow& win = *labeling.win;
  std::uint32_t n = win.n_vertices;

  // cost control: one in-cluster search per transport target
  std::uint64_t work = 0;
  for (std::uint32_t y = 0; y < n; ++y) {
    bool is_target = false;
    for (std::uint32_t a = win.adj_off[y]; a < win.adj_off[y + 1] && !is_target; ++a)
      is_target = labeling.cluster_of[win.adj_vtx[a]] == labeling.cluster_of[y];
    if (is_target) work += labeling.agg[labeling.cluster_of[y]].size;
  }
  if (work > 200000000ull)
    throw BudgetError("geodesic transport work budget exceeded");

  TransportFlows flows;
  flows.sent.assign(n, 0);
  flows.received.assign(n, 0);

  constexpr std::uint32_t INF = UINT32_MAX;
  std::vector<std::uint32_t> dist(n, INF);
  std::vector<std::uint32_t> queue, touched;
  std::vector<std::uint32_t> path;

  for (std::uint32_t y = 0; y < n; ++y) {
    std::uint32_t cl = labeling.cluster_of[y];
    std::vector<std::uint32_t> senders;
    for (std::uint32_t a = win.adj_off[y]; a < win.adj_off[y + 1]; ++a)
      if (labeling.cluster_of[win.adj_vtx[a]] == cl) senders.push_back(win.adj_vtx[a]);
    if (senders.empty()) continue;

    // BFS inside the cluster from the receiving endpoint
    queue.clear();
    touched.clear();
    dist[y] = 0;
    queue.push_back(y);
    touched.push_back(y);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      std::uint32_t u = queue[head];
      for (std::uint32_t a = win.adj_off[u]; a < win.adj_off[u + 1]; ++a) {
        if (!labeling.edge_open(win.adj_eid[a])) continue;
        std::uint32_t z = win.adj_vtx[a];
        if (dist[z] == INF) {
          dist[z] = dist[u] + 1;
          queue.push_back(z);
          touched.push_back(z);
        }
      }
    }

    for (std::uint32_t x : senders) {
      // lexicographically minimal shortest path x -> y: greedily take the
      // smallest open neighbor that stays on a shortest path
      path.clear();
      std::uint32_t cur = x;
      path.push_back(cur);
      while (cur != y) {
        std::uint32_t best = INF;
        for (std::uint32_t a = win.adj_off[cur]; a < win.adj_off[cur + 1]; ++a) {
          if (!labeling.edge_open(win.adj_eid[a])) continue;
          std::uint32_t z = win.adj_vtx[a];
          if (dist[z] != INF && dist[z] + 1 == dist[cur]) best = std::min(best, z);
        }
        cur = best;
        path.push_back(cur);
      }
      for (std::size_t k = 1; k <= path.size(); ++k) {
        bigq m(1, static_cast<std::int64_t>(k) * static_cast<std::int64_t>(k));
        flows.sent[x] += m;
        flows.received[path[k - 1]] += m;
      }
    }

    for (std::uint32_t v : touched) dist[v] = INF;
  }

  flows.sent_by_depth.assign(win.H + 1, 0);
  flows.received_by_depth.assign(win.H + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    std::uint32_t d = win.depth(v);
    flows.sent_by_depth[d] += flows.sent[v];
    flows.received_by_depth[d] += flows.received[v];
    flows.total_sent += flows.sent[v];
    flows.total_received += flows.received[v];
  }
  flows.conserved = flows.total_sent == flows.total_received;
  return flows;
}

SubsamplingTrial subsampling_trial(std::string_view weights_spec, double c,
                                   std::uint64_t N, std::uint64_t replicas,
                                   std::uint64_t seed, std::uint32_t threads) {
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("c must be in (0,1]");
  if (N == 0 || replicas == 0)
    throw std::invalid_argument("N and replicas must be >= 1");
  bool harmonic;
  if (weights_spec == "harmonic") {
    harmonic = true;
  } else if (weights_spec == "constant") {
    harmonic = false;
  } else {
    throw std::invalid_argument("unknown weights spec: " +
                                std::string(weights_spec));
  }

  long double weight_sum = 0;
  for (std::uint64_t k = 1; k <= N; ++k)
    weight_sum += harmonic ? 1.0L / static_cast<long double>(k) : 1.0L;
  double threshold = static_cast<double>(c * weight_sum / 2.0L);

  std::vector<std::uint8_t> tail(replicas, 0);
  parallel_for(replicas, threads, [&](std::uint64_t r) {
    std::uint64_t stream = rng::mix(replica_seed(seed, r), rng::TAG_SUBSAMPLE);
    long double w = 0;
    for (std::uint64_t k = 1; k <= N; ++k) {
      if (rng::to_unit(rng::mix(stream, k)) < c)
        w += harmonic ? 1.0L / static_cast<long double>(k) : 1.0L;
    }
    tail[r] = static_cast<double>(w) < threshold;
  });

  SubsamplingTrial trial;
  trial.weights = std::string(weights_spec);
  trial.c = c;
  trial.N = N;
  trial.replicas = replicas;
  trial.weight_sum = static_cast<double>(weight_sum);
  trial.expected_sum = static_cast<double>(c * weight_sum);
  trial.bound = static_cast<double>(4.0L * (1.0L - c) / weight_sum);
  for (std::uint8_t t : tail) trial.tail_count += t;
  trial.freq = static_cast<double>(trial.tail_count) / static_cast<double>(replicas);
  trial.mc_se = std::sqrt(trial.freq * (1.0 - trial.freq) /
                          static_cast<double>(replicas));
  return trial;
}

}  // namespace perco
