#include "perco/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "perco/cheeger.hpp"
#include "perco/coupling.hpp"
#include "perco/errors.hpp"
#include "perco/parallel.hpp"
#include "perco/rng.hpp"
#include "perco/transport.hpp"

namespace perco {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string bigq_str(const bigq& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  os.flush();
  if (!os) throw IoError("write failed: " + path);
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::uint32_t resolve_root(const GraphWindow& win, const std::string& spec,
                           bool want_interior) {
  if (spec == "auto") {
    if (!want_interior) return 0;
    std::uint32_t lo = win.family == Family::grandparent ? 2u : 1u;
    if (win.H < 2 * lo) throw std::invalid_argument("window has no interior vertex");
    std::uint32_t d = std::clamp((win.H + 1) / 2, lo, win.H - lo);
    return static_cast<std::uint32_t>(win.level_off[d]);
  }
  std::uint64_t v = 0;
  auto res = std::from_chars(spec.data(), spec.data() + spec.size(), v);
  if (res.ec != std::errc{} || res.ptr != spec.data() + spec.size() ||
      v >= win.n_vertices)
    throw std::invalid_argument("bad root: " + spec);
  return static_cast<std::uint32_t>(v);
}

json window_meta(const ExperimentConfig& cfg) {
  return json{{"family", cfg.family},
              {"q", cfg.q},
              {"H", cfg.height},
              {"collar", cfg.collar}};
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<double> parse_p_grid(const std::string& spec) {
  double a = 0, b = 0, step = 0;
  std::size_t c1 = spec.find(':');
  std::size_t c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
  auto field = [&](std::size_t lo, std::size_t hi, double& out) {
    auto res = std::from_chars(spec.data() + lo, spec.data() + hi, out);
    if (res.ec != std::errc{} || res.ptr != spec.data() + hi)
      throw std::invalid_argument("bad p grid: " + spec);
  };
  if (c2 == std::string::npos) throw std::invalid_argument("p grid must be a:b:step");
  field(0, c1, a);
  field(c1 + 1, c2, b);
  field(c2 + 1, spec.size(), step);
  if (!(a >= 0 && b <= 1 && a <= b && step > 0))
    throw std::invalid_argument("p grid out of range: " + spec);
  std::vector<double> grid;
  std::size_t count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) grid.push_back(a + static_cast<double>(i) * step);
  if (grid.back() > b) grid.back() = b;
  return grid;
}

std::string ExperimentConfig::to_json() const {
  json j{{"subcommand", subcommand},
         {"family", family},
         {"q", q},
         {"height", height},
         {"collar", collar},
         {"p", p},
         {"p_grid", p_grid},
         {"p1", p1},
         {"p2", p2},
         {"seed", seed},
         {"replicas", replicas},
         {"kernels", kernels},
         {"k", k},
         {"N", N},
         {"n_max", n_max},
         {"labels_mode", labels_mode},
         {"weights", weights},
         {"c", c},
         {"n_terms", n_terms},
         {"root", root},
         {"pick_law", pick_law},
         {"finite_threshold", finite_threshold},
         {"spanning_only", spanning_only},
         {"out", out},
         {"threads", threads},
         {"max_vertices", max_vertices}};
  return j.dump();
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config json: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    auto get = [&](const char* key, auto& slot) {
      if (j.contains(key)) j.at(key).get_to(slot);
    };
    get("subcommand", cfg.subcommand);
    get("family", cfg.family);
    get("q", cfg.q);
    get("height", cfg.height);
    get("collar", cfg.collar);
    get("p", cfg.p);
    get("p_grid", cfg.p_grid);
    get("p1", cfg.p1);
    get("p2", cfg.p2);
    get("seed", cfg.seed);
    get("replicas", cfg.replicas);
    get("kernels", cfg.kernels);
    get("k", cfg.k);
    get("N", cfg.N);
    get("n_max", cfg.n_max);
    get("labels_mode", cfg.labels_mode);
    get("weights", cfg.weights);
    get("c", cfg.c);
    get("n_terms", cfg.n_terms);
    get("root", cfg.root);
    get("pick_law", cfg.pick_law);
    get("finite_threshold", cfg.finite_threshold);
    get("spanning_only", cfg.spanning_only);
    get("out", cfg.out);
    get("threads", cfg.threads);
    get("max_vertices", cfg.max_vertices);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config field: ") + e.what());
  }
  return cfg;
}

namespace {

struct RunState {
  const ExperimentConfig& cfg;
  json extras;
  std::vector<std::pair<std::string, std::string>> files;  // path suffix ignored; (path, bytes)
  std::string printed;  // empty: print manifest
};

void emit_csv(RunState& st, const std::string& bytes) {
  if (st.cfg.out.empty()) throw std::invalid_argument("--out is required for " + st.cfg.subcommand);
  st.files.emplace_back(st.cfg.out, bytes);
}

std::string scan_csv(const PhaseScanResult& res, std::uint64_t replicas,
                     std::uint32_t weight_exp) {
  std::string csv = "p,replica,n_clusters,n_heavy_proxy,max_weight_num,max_weight_den_exp,max_size\n";
  for (std::size_t pi = 0; pi < res.p_grid.size(); ++pi) {
    for (std::uint64_t r = 0; r < replicas; ++r) {
      const auto& rec = res.records[pi * replicas + r];
      csv += fmt_double(rec.p);
      csv += ',';
      csv += std::to_string(rec.replica);
      csv += ',';
      csv += std::to_string(rec.n_clusters);
      csv += ',';
      csv += std::to_string(rec.n_heavy);
      csv += ',';
      csv += u128_str(rec.max_weight_units);
      csv += ',';
      csv += std::to_string(weight_exp);
      csv += ',';
      csv += std::to_string(rec.max_size);
      csv += '\n';
    }
  }
  return csv;
}

void run_scan(RunState& st, const GraphWindow& win, const std::vector<double>& grid) {
  const auto& cfg = st.cfg;
  PhaseScanResult res = phase_scan(win, grid, cfg.replicas, cfg.seed, cfg.threads);
  emit_csv(st, scan_csv(res, cfg.replicas, win.weight_exp()));
  json fr{{"ge1", res.frac_ge1}, {"ge2", res.frac_ge2}, {"eq1", res.frac_eq1}};
  json cross;
  cross["p_c"] = res.has_pc ? json(res.p_c_hat) : json();
  cross["p_h"] = res.has_ph ? json(res.p_h_hat) : json();
  cross["p_u"] = res.has_pu ? json(res.p_u_hat) : json();
  st.extras["spanning_fractions"] = fr;
  st.extras["crossovers"] = cross;
}

PickLaw pick_law_from_string(const std::string& s) {
  if (s == "cluster") return PickLaw::cluster_uniform;
  if (s == "vertex") return PickLaw::vertex_uniform;
  throw std::invalid_argument("bad pick law: " + s);
}

void run_repulsion(RunState& st, const GraphWindow& win) {
  const auto& cfg = st.cfg;
  if (!(cfg.p >= 0 && cfg.p <= 1)) throw std::invalid_argument("p out of [0,1]");
  if (cfg.replicas == 0) throw std::invalid_argument("replicas must be >= 1");
  PickLaw law = pick_law_from_string(cfg.pick_law);
  std::vector<std::string> blocks(cfg.replicas);
  std::vector<std::uint64_t> nonempty(cfg.replicas, 0);
  std::vector<std::uint64_t> classes(cfg.replicas, 0);
  std::vector<std::uint64_t> finite_edges(cfg.replicas, 0);
  parallel_for(cfg.replicas, resolve_threads(cfg.threads), [&](std::size_t r) {
    EdgeCoupling cpl{replica_seed(cfg.seed, r)};
    ClusterLabeling lab = clusters_at(win, cpl, cfg.p);
    RepulsionTable tab = repulsion_statistics(lab, cfg.collar, cfg.spanning_only);
    std::string& csv = blocks[r];
    for (const auto& row : tab.rows) {
      csv += fmt_double(cfg.p);
      csv += ',';
      csv += std::to_string(r);
      csv += ',';
      csv += std::to_string(row.C);
      csv += ',';
      csv += std::to_string(row.C2);
      csv += ',';
      csv += u128_str(row.wC.num);
      csv += ',';
      csv += u128_str(row.wC2.num);
      csv += ',';
      csv += u128_str(row.wTau.num);
      csv += ',';
      csv += std::to_string(row.sizeTau);
      csv += '\n';
    }
    nonempty[r] = tab.n_nonempty;
    classes[r] = touching_partition(lab, replica_seed(cfg.seed, r), law).n_classes;
    finite_edges[r] = neighbor_graph(lab, NeighborRelation::finite_touch, cfg.collar,
                                     cfg.finite_threshold)
                          .edges.size();
  });
  std::string csv = "p,replica,C,C_prime,wC,wC_prime,wTau,sizeTau\n";
  std::uint64_t rows = 0, ne = 0;
  double mean_classes = 0, mean_finite = 0;
  for (std::uint64_t r = 0; r < cfg.replicas; ++r) {
    rows += static_cast<std::uint64_t>(std::count(blocks[r].begin(), blocks[r].end(), '\n'));
    ne += nonempty[r];
    mean_classes += static_cast<double>(classes[r]);
    mean_finite += static_cast<double>(finite_edges[r]);
    csv += blocks[r];
  }
  emit_csv(st, csv);
  st.extras["rows"] = rows;
  st.extras["nonempty_touching"] = ne;
  st.extras["weight_den_exp"] = win.weight_exp();
  st.extras["pick_law"] = cfg.pick_law;
  st.extras["mean_partition_classes"] = mean_classes / static_cast<double>(cfg.replicas);
  st.extras["mean_finite_touch_edges"] = mean_finite / static_cast<double>(cfg.replicas);
}

void run_merging(RunState& st, const GraphWindow& win) {
  const auto& cfg = st.cfg;
  if (cfg.replicas == 0) throw std::invalid_argument("replicas must be >= 1");
  std::vector<std::string> blocks(cfg.replicas);
  parallel_for(cfg.replicas, resolve_threads(cfg.threads), [&](std::size_t r) {
    EdgeCoupling cpl{replica_seed(cfg.seed, r)};
    auto rows = merging_census(win, cpl, cfg.p1, cfg.p2, cfg.collar);
    std::string& csv = blocks[r];
    for (const auto& row : rows) {
      csv += fmt_double(cfg.p1);
      csv += ',';
      csv += fmt_double(cfg.p2);
      csv += ',';
      csv += std::to_string(r);
      csv += ',';
      csv += std::to_string(row.cluster);
      csv += ',';
      csv += std::to_string(row.count);
      csv += '\n';
    }
  });
  std::string csv = "p1,p2,replica,cluster,count\n";
  for (auto& b : blocks) csv += b;
  emit_csv(st, csv);
}

void run_tmtp(RunState& st, const GraphWindow& win) {
  const auto& cfg = st.cfg;
  std::vector<std::string> names = cfg.kernels;
  if (names.empty()) {
    names = {"to_parent", "to_children", "sphere_uniform:1", "open_neighbors"};
    if (win.family == Family::grandparent) names.insert(names.begin() + 2, "to_grandparent");
  }
  json arr = json::array();
  for (const auto& name : names) {
    KernelSpec spec = KernelSpec::parse(name);
    TMTPReport rep = check_tmtp(win, spec, cfg.p, cfg.seed, cfg.replicas);
    json j{{"kernel", rep.kernel}, {"rho", rep.rho}, {"deterministic", rep.deterministic}};
    if (rep.deterministic) {
      j["lhs"] = bigq_str(rep.lhs);
      j["rhs"] = bigq_str(rep.rhs);
      j["equal"] = rep.lhs == rep.rhs;
    } else {
      j["p"] = rep.p;
      j["replicas"] = rep.replicas;
      j["mean_lhs"] = rep.mean_lhs;
      j["mean_rhs"] = rep.mean_rhs;
      j["mean_diff"] = rep.mean_diff;
      j["se_diff"] = rep.se_diff;
    }
    arr.push_back(std::move(j));
  }
  json doc{{"window", window_meta(cfg)}, {"checks", arr}};
  st.printed = doc.dump(2) + "\n";
  if (!cfg.out.empty()) st.files.emplace_back(cfg.out, st.printed);
}

void run_cheeger(RunState& st, const GraphWindow& win) {
  const auto& cfg = st.cfg;
  std::uint32_t root = resolve_root(win, cfg.root, true);
  CheegerReport rep = weighted_cheeger_restricted(win, root, cfg.k);
  json j{{"window", window_meta(cfg)},
         {"root", rep.root},
         {"k", rep.k},
         {"phi_k_num_units", u128_str(rep.phi_k.num)},
         {"phi_k_den_units", u128_str(rep.phi_k.den)},
         {"phi_k", to_double(rep.phi_k)},
         {"witness", rep.witness},
         {"rim_censored", rep.rim_censored},
         {"budget_exhausted", rep.budget_exhausted},
         {"subsets_enumerated", rep.subsets_enumerated},
         {"n_ball", rep.n_ball}};
  j["phi_ball"] = rep.n_ball > 0 ? json(to_double(rep.phi_ball)) : json();
  st.printed = j.dump(2) + "\n";
  if (!cfg.out.empty()) st.files.emplace_back(cfg.out, st.printed);
}

void run_annuli(RunState& st, const GraphWindow& win) {
  const auto& cfg = st.cfg;
  std::uint32_t root = resolve_root(win, cfg.root, false);
  if (cfg.N < 1) throw std::invalid_argument("N must be >= 1");
  std::vector<std::uint8_t> labels(win.edges.size(), 1);
  if (cfg.labels_mode.rfind("all:", 0) == 0) {
    std::uint64_t k = 0;
    const std::string tail = cfg.labels_mode.substr(4);
    auto res = std::from_chars(tail.data(), tail.data() + tail.size(), k);
    if (res.ec != std::errc{} || res.ptr != tail.data() + tail.size() || k < 1 || k > cfg.N)
      throw std::invalid_argument("bad labels mode: " + cfg.labels_mode);
    std::fill(labels.begin(), labels.end(), static_cast<std::uint8_t>(k));
  } else if (cfg.labels_mode == "random") {
    std::uint64_t stream = rng::mix(cfg.seed, rng::TAG_GENERIC);
    for (std::size_t e = 0; e < labels.size(); ++e)
      labels[e] = static_cast<std::uint8_t>(
          1 + rng::bounded(rng::mix(stream, e), std::min<std::uint32_t>(cfg.N, 255)));
  } else if (cfg.labels_mode == "from-cluster-metric") {
    ClusterLabeling lab = clusters_at(win, EdgeCoupling{cfg.seed}, cfg.p);
    labels = cluster_metric_labels(lab, cfg.N);
  } else {
    throw std::invalid_argument("bad labels mode: " + cfg.labels_mode);
  }
  std::uint32_t n_max = cfg.n_max;
  if (n_max == 0) {
    std::uint64_t reach = static_cast<std::uint64_t>(cfg.N) * (2ull * win.H + 2);
    std::uint64_t m = 1;
    n_max = 1;
    while (n_max < 60 && m <= reach / cfg.N) {
      m = static_cast<std::uint64_t>(cfg.N) * m + 1;
      if (m > reach) break;
      ++n_max;
    }
  }
  AnnuliProfile prof = labeled_annuli(win, labels, root, cfg.N, n_max);
  json sizes = json::array(), units = json::array(), mseq = json::array();
  for (std::uint32_t n = 1; n <= prof.n_max; ++n) {
    mseq.push_back(prof.m[n]);
    sizes.push_back(prof.annulus_size[n]);
    units.push_back(u128_str(prof.annulus_units[n]));
  }
  json j{{"window", window_meta(cfg)},
         {"root", prof.root},
         {"N", prof.N},
         {"n_max", prof.n_max},
         {"labels_mode", cfg.labels_mode},
         {"m", mseq},
         {"annulus_size", sizes},
         {"annulus_units", units},
         {"disjoint", prof.disjoint},
         {"contains_spheres", prof.contains_spheres},
         {"weight_den_exp", win.weight_exp()}};
  st.printed = j.dump(2) + "\n";
  if (!cfg.out.empty()) st.files.emplace_back(cfg.out, st.printed);
}

void run_subsample(RunState& st) {
  const auto& cfg = st.cfg;
  SubsamplingTrial trial = subsampling_trial(cfg.weights, cfg.c, cfg.n_terms,
                                             cfg.replicas, cfg.seed, cfg.threads);
  json j{{"weights", cfg.weights},
         {"c", trial.c},
         {"n_terms", trial.N},
         {"replicas", trial.replicas},
         {"weight_sum", trial.weight_sum},
         {"expected_sum", trial.expected_sum},
         {"bound", trial.bound},
         {"tail_count", trial.tail_count},
         {"freq", trial.freq},
         {"mc_se", trial.mc_se},
         {"bound_holds", trial.freq <= trial.bound}};
  st.printed = j.dump(2) + "\n";
  if (!cfg.out.empty()) st.files.emplace_back(cfg.out, st.printed);
}

}  // namespace

RunManifest run(const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  WindowLimits limits;
  limits.max_vertices = cfg.max_vertices;

  RunState st{cfg, json::object(), {}, {}};
  std::vector<double> grid;

  if (cfg.subcommand == "subsample") {
    run_subsample(st);
  } else {
    GraphWindow win = build_window(family_from_string(cfg.family), cfg.q,
                                   cfg.height, cfg.collar, limits);
    if (cfg.subcommand == "window-info") {
      st.printed = window_info_json(win) + "\n";
      if (!cfg.out.empty()) st.files.emplace_back(cfg.out, st.printed);
    } else if (cfg.subcommand == "simulate") {
      if (!(cfg.p >= 0 && cfg.p <= 1)) throw std::invalid_argument("p out of [0,1]");
      grid = {cfg.p};
      run_scan(st, win, grid);
    } else if (cfg.subcommand == "phase-scan") {
      grid = parse_p_grid(cfg.p_grid);
      run_scan(st, win, grid);
    } else if (cfg.subcommand == "repulsion") {
      run_repulsion(st, win);
    } else if (cfg.subcommand == "merging") {
      run_merging(st, win);
    } else if (cfg.subcommand == "tmtp") {
      run_tmtp(st, win);
    } else if (cfg.subcommand == "cheeger") {
      run_cheeger(st, win);
    } else if (cfg.subcommand == "annuli") {
      run_annuli(st, win);
    } else {
      throw std::invalid_argument("unknown subcommand: " + cfg.subcommand);
    }
  }

  RunManifest man;
  man.tool_version = kToolVersion;
  json outputs = json::array();
  for (const auto& [path, bytes] : st.files) {
    write_file(path, bytes);
    OutputFile of;
    of.path = path;
    of.bytes = bytes.size();
    of.digest = hex64(fnv1a64(bytes));
    outputs.push_back(json{{"path", of.path}, {"bytes", of.bytes}, {"fnv1a64", of.digest}});
    man.outputs.push_back(std::move(of));
  }
  auto t1 = std::chrono::steady_clock::now();
  man.wall_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());

  json doc{{"tool_version", man.tool_version},
           {"seed", cfg.seed},
           {"family", cfg.family},
           {"q", cfg.q},
           {"H", cfg.height},
           {"collar", cfg.collar},
           {"replicas", cfg.replicas},
           {"config", json::parse(cfg.to_json())},
           {"outputs", outputs},
           {"wall_ms", man.wall_ms}};
  if (!grid.empty()) doc["p_grid"] = grid;
  if (!st.extras.empty()) doc["extras"] = st.extras;
  man.manifest_json = doc.dump(2) + "\n";
  man.printed = st.printed.empty() ? man.manifest_json : st.printed;
  if (!cfg.out.empty()) write_file(cfg.out + ".manifest.json", man.manifest_json);
  return man;
}

}  // namespace perco
