#include "perco/window.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace perco {

std::uint32_t GraphWindow::depth(std::uint32_t v) const {
  auto it = std::upper_bound(level_off.begin(), level_off.end(), v);
  return static_cast<std::uint32_t>(it - level_off.begin()) - 1;
}

std::uint32_t GraphWindow::meet(std::uint32_t x, std::uint32_t y) const {
  while (x != y) {
    if (x > y)
      x = parent(x);
    else
      y = parent(y);
  }
  return x;
}

std::uint32_t GraphWindow::tree_dist(std::uint32_t x, std::uint32_t y) const {
  std::uint32_t m = meet(x, y);
  return depth(x) + depth(y) - 2 * depth(m);
}

std::pair<std::uint64_t, std::uint64_t> GraphWindow::subtree_range(
    std::uint32_t v, std::uint32_t k) const {
  std::uint64_t lo = v, hi = v;
  for (std::uint32_t i = 0; i < k; ++i) {
    lo = static_cast<std::uint64_t>(q) * lo + 1;
    hi = static_cast<std::uint64_t>(q) * hi + q;
  }
  return {lo, hi + 1};
}

bool GraphWindow::interior(std::uint32_t v) const {
  std::uint32_t d = depth(v);
  if (family == Family::grandparent) return d >= 2 && d + 2 <= H;
  return d >= 1 && d + 1 <= H;
}

std::uint32_t GraphWindow::max_degree() const {
  std::uint32_t m = 0;
  for (std::uint32_t v = 0; v < n_vertices; ++v) m = std::max(m, degree(v));
  return m;
}

u128 GraphWindow::vertex_units(std::uint32_t v) const {
  if (family == Family::unit_tree) return 1;
  return ipow128(q, H - depth(v));
}

GraphWindow build_window(Family family, std::uint32_t q, std::uint32_t H,
                         std::uint32_t collar, const WindowLimits& limits) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  if (H < 1) throw std::invalid_argument("height must be >= 1");
  if (collar >= H) throw std::invalid_argument("collar must be < height");

  GraphWindow w;
  w.family = family;
  w.q = q;
  w.H = H;
  w.collar = collar;

  w.level_off.assign(H + 2, 0);
  std::uint64_t level = 1, total = 0;
  for (std::uint32_t d = 0; d <= H; ++d) {
    w.level_off[d] = total;
    if (level > limits.max_vertices - total)
      throw BudgetError("window too large: vertex budget exceeded");
    total += level;
    if (d < H) level *= q;
  }
  w.level_off[H + 1] = total;
  w.n_vertices = static_cast<std::uint32_t>(total);

  if (family != Family::unit_tree) {
    // reject configurations whose total weight (H+1) * q^H units overflows
    // the 2^100 fixed-point budget
    bigz total_units = bigz(H + 1) * boost::multiprecision::pow(bigz(q), H);
    if (total_units > (bigz(1) << 100))
      throw BudgetError("weight precision budget exceeded: (H+1)*q^H > 2^100");
  }

  std::uint64_t n_tree = total - 1;
  std::uint64_t n_gp =
      family == Family::grandparent && H >= 2 ? total - w.level_off[2] : 0;
  w.edges.reserve(n_tree + n_gp);
  for (std::uint32_t v = 1; v < w.n_vertices; ++v)
    w.edges.push_back({w.parent(v), v, EdgeKind::tree});
  if (family == Family::grandparent) {
    for (std::uint32_t v = static_cast<std::uint32_t>(w.level_off[2]);
         v < w.n_vertices; ++v)
      w.edges.push_back({w.parent(w.parent(v)), v, EdgeKind::grandparent});
  }
  std::sort(w.edges.begin(), w.edges.end(), [](const Edge& a, const Edge& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    return a.kind < b.kind;
  });

  w.adj_off.assign(w.n_vertices + 1, 0);
  for (const Edge& e : w.edges) {
    ++w.adj_off[e.u + 1];
    ++w.adj_off[e.v + 1];
  }
  std::partial_sum(w.adj_off.begin(), w.adj_off.end(), w.adj_off.begin());
  w.adj_vtx.resize(2 * w.edges.size());
  w.adj_eid.resize(2 * w.edges.size());
  std::vector<std::uint32_t> cursor(w.adj_off.begin(), w.adj_off.end() - 1);
  for (std::uint32_t id = 0; id < w.edges.size(); ++id) {
    const Edge& e = w.edges[id];
    w.adj_vtx[cursor[e.u]] = e.v;
    w.adj_eid[cursor[e.u]++] = id;
    w.adj_vtx[cursor[e.v]] = e.u;
    w.adj_eid[cursor[e.v]++] = id;
  }
  return w;
}

Family family_from_string(std::string_view name) {
  if (name == "tree" || name == "tree_with_end" || name == "tree-with-end")
    return Family::tree_with_end;
  if (name == "grandparent") return Family::grandparent;
  if (name == "unit-tree" || name == "unit_tree") return Family::unit_tree;
  throw std::invalid_argument("unknown family: " + std::string(name));
}

std::string family_name(Family family) {
  switch (family) {
    case Family::tree_with_end: return "tree";
    case Family::grandparent: return "grandparent";
    case Family::unit_tree: return "unit-tree";
  }
  throw std::invalid_argument("bad family enum");
}

static void check_vertex(const GraphWindow& win, std::uint32_t v) {
  if (v >= win.n_vertices) throw std::invalid_argument("vertex out of range");
}

std::int64_t cocycle_exp(const GraphWindow& win, std::uint32_t x, std::uint32_t y) {
  check_vertex(win, x);
  check_vertex(win, y);
  if (win.family == Family::unit_tree) return 0;
  return static_cast<std::int64_t>(win.depth(x)) -
         static_cast<std::int64_t>(win.depth(y));
}

bigq cocycle_value(const GraphWindow& win, std::uint32_t x, std::uint32_t y) {
  std::int64_t e = cocycle_exp(win, x, y);
  bigz p = boost::multiprecision::pow(bigz(win.q),
                                      static_cast<unsigned>(e < 0 ? -e : e));
  return e >= 0 ? bigq(p) : bigq(1, p);
}

std::pair<std::uint64_t, std::uint64_t> orbit_count_ratio(const GraphWindow& win,
                                                          std::uint32_t x,
                                                          std::uint32_t y) {
  check_vertex(win, x);
  check_vertex(win, y);
  std::uint32_t m_depth = win.depth(win.meet(x, y));

  // z ranges over one full window level per count; keep that enumerable
  auto level_size = [&](std::uint32_t d) {
    return win.level_off[d + 1] - win.level_off[d];
  };
  if (level_size(win.depth(x)) > 100000000ull ||
      level_size(win.depth(y)) > 100000000ull)
    throw BudgetError("orbit enumeration too large");

  auto count_orbit = [&](std::uint32_t anchor, std::uint32_t target) {
    // |stab(anchor)-orbit of target| by the meet rule
    std::uint32_t td = win.depth(target);
    std::uint64_t n = 0;
    for (std::uint64_t z = win.level_off[td]; z < win.level_off[td + 1]; ++z)
      if (win.depth(win.meet(anchor, static_cast<std::uint32_t>(z))) == m_depth)
        ++n;
    return n;
  };
  std::uint64_t num = count_orbit(y, x);  // |stab(y)-orbit of x|
  std::uint64_t den = count_orbit(x, y);  // |stab(x)-orbit of y|
  std::uint64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

std::string window_info_json(const GraphWindow& win) {
  nlohmann::json j;
  j["family"] = family_name(win.family);
  j["q"] = win.q;
  j["H"] = win.H;
  j["collar"] = win.collar;
  j["n_vertices"] = win.n_vertices;
  j["n_edges"] = win.edges.size();
  return j.dump();
}

}  // namespace perco
