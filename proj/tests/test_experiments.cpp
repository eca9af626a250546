#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "perco/errors.hpp"
#include "perco/experiments.hpp"

using namespace perco;
using nlohmann::json;

namespace {

struct TempOut {
  std::string path;
  explicit TempOut(std::string p) : path(std::move(p)) {}
  ~TempOut() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    std::filesystem::remove(path + ".manifest.json", ec);
  }
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string hex16(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

TEST_CASE("p grids parse exactly") {
  CHECK(parse_p_grid("0:1:0.25") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(parse_p_grid("0.3:0.3:0.1") == std::vector<double>{0.3});
  CHECK(parse_p_grid("0.5:0.75:0.25") == std::vector<double>{0.5, 0.75});
  CHECK_THROWS_AS(parse_p_grid("0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_p_grid("a:b:c"), std::invalid_argument);
  CHECK_THROWS_AS(parse_p_grid("0:2:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_p_grid("-0.1:0.5:0.1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_p_grid("0.5:0.2:0.1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_p_grid("0:1:0"), std::invalid_argument);
}

TEST_CASE("the output digest is plain fnv-1a") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("configs survive a json round trip") {
  ExperimentConfig cfg;
  cfg.subcommand = "tmtp";
  cfg.family = "grandparent";
  cfg.q = 3;
  cfg.height = 9;
  cfg.collar = 2;
  cfg.p = 0.35;
  cfg.p_grid = "0:1:0.5";
  cfg.p1 = 0.1;
  cfg.p2 = 0.9;
  cfg.seed = 77;
  cfg.replicas = 12;
  cfg.kernels = {"to_parent", "sphere_uniform:2"};
  cfg.k = 5;
  cfg.N = 4;
  cfg.n_max = 6;
  cfg.labels_mode = "all:2";
  cfg.weights = "constant";
  cfg.c = 0.25;
  cfg.n_terms = 100;
  cfg.root = "7";
  cfg.pick_law = "vertex_uniform";
  cfg.finite_threshold = 3;
  cfg.spanning_only = true;
  cfg.out = "x.csv";
  cfg.threads = 2;
  cfg.max_vertices = 12345;
  CHECK(ExperimentConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());

  ExperimentConfig defaults = ExperimentConfig::from_json("{}");
  CHECK(defaults.q == 2);
  CHECK(defaults.family == "tree");
  CHECK_THROWS_AS(ExperimentConfig::from_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"q": "two"})"), std::invalid_argument);
}

TEST_CASE("window-info prints the window descriptor") {
  ExperimentConfig cfg;
  cfg.subcommand = "window-info";
  cfg.family = "tree";
  cfg.q = 2;
  cfg.height = 2;
  RunManifest man = run(cfg);
  json j = json::parse(man.printed);
  CHECK(j["family"] == "tree");
  CHECK(j["n_vertices"] == 7);
  CHECK(j["n_edges"] == 6);
  CHECK(j["collar"] == 0);
  CHECK(man.outputs.empty());
  json manifest = json::parse(man.manifest_json);
  CHECK(manifest["tool_version"] == kToolVersion);
  CHECK(manifest["config"]["subcommand"] == "window-info");
  CHECK(manifest["outputs"].empty());
}

TEST_CASE("simulate writes one labeled row per replica") {
  TempOut out("tmp_exp_simulate.csv");
  ExperimentConfig cfg;
  cfg.subcommand = "simulate";
  cfg.q = 2;
  cfg.height = 2;
  cfg.p = 0.0;
  cfg.replicas = 3;
  cfg.out = out.path;
  cfg.threads = 1;
  RunManifest man = run(cfg);
  std::string bytes = read_file(out.path);
  std::istringstream is(bytes);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "p,replica,n_clusters,n_heavy_proxy,max_weight_num,max_weight_den_exp,max_size");
  // p=0: every vertex is its own cluster; the apex (4 units of 2^-2) is the
  // only band cluster
  CHECK(lines[1] == "0,0,7,1,4,2,1");
  CHECK(lines[3].substr(0, 4) == "0,2,");

  REQUIRE(man.outputs.size() == 1);
  CHECK(man.outputs[0].bytes == bytes.size());
  CHECK(man.outputs[0].digest == hex16(fnv1a64(bytes)));
  json manifest = json::parse(read_file(out.path + ".manifest.json"));
  CHECK(manifest["p_grid"] == json::array({0.0}));
  CHECK(manifest["outputs"][0]["fnv1a64"] == man.outputs[0].digest);
  CHECK(manifest["extras"]["spanning_fractions"]["ge1"] == json::array({0.0}));
  CHECK(manifest["extras"]["crossovers"]["p_c"].is_null());
}

TEST_CASE("csv subcommands require an output path") {
  ExperimentConfig cfg;
  cfg.subcommand = "simulate";
  cfg.height = 2;
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
  cfg.subcommand = "no-such-thing";
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
  cfg.subcommand = "simulate";
  cfg.out = "tmp_exp_never.csv";
  cfg.p = 1.5;
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}

TEST_CASE("result files are byte-stable across reruns and worker counts") {
  TempOut a("tmp_exp_scan_a.csv");
  TempOut b("tmp_exp_scan_b.csv");
  ExperimentConfig cfg;
  cfg.subcommand = "phase-scan";
  cfg.family = "grandparent";
  cfg.q = 2;
  cfg.height = 5;
  cfg.collar = 1;
  cfg.p_grid = "0:1:0.25";
  cfg.replicas = 6;
  cfg.seed = 5;
  cfg.out = a.path;
  cfg.threads = 1;
  RunManifest first = run(cfg);
  cfg.out = b.path;
  cfg.threads = 8;
  RunManifest second = run(cfg);
  REQUIRE(first.outputs.size() == 1);
  REQUIRE(second.outputs.size() == 1);
  CHECK(first.outputs[0].digest == second.outputs[0].digest);
  CHECK(read_file(a.path) == read_file(b.path));
  cfg.out = a.path;
  cfg.threads = 1;
  RunManifest again = run(cfg);
  CHECK(again.outputs[0].digest == first.outputs[0].digest);
}

TEST_CASE("merging runs emit host counts and reject inverted levels") {
  TempOut out("tmp_exp_merge.csv");
  ExperimentConfig cfg;
  cfg.subcommand = "merging";
  cfg.family = "grandparent";
  cfg.q = 2;
  cfg.height = 4;
  cfg.collar = 1;
  cfg.p1 = 0.3;
  cfg.p2 = 0.6;
  cfg.replicas = 2;
  cfg.seed = 11;
  cfg.out = out.path;
  cfg.threads = 1;
  run(cfg);
  std::istringstream is(read_file(out.path));
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "p1,p2,replica,cluster,count");
  while (std::getline(is, line))
    CHECK(std::count(line.begin(), line.end(), ',') == 4);

  cfg.p1 = 0.7;
  cfg.p2 = 0.2;
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}

TEST_CASE("repulsion runs tabulate ordered heavy pairs") {
  TempOut out("tmp_exp_rep.csv");
  ExperimentConfig cfg;
  cfg.subcommand = "repulsion";
  cfg.family = "grandparent";
  cfg.q = 2;
  cfg.height = 4;
  cfg.collar = 1;
  cfg.p = 0.0;
  cfg.replicas = 3;
  cfg.seed = 2;
  cfg.out = out.path;
  cfg.threads = 1;
  run(cfg);
  std::istringstream is(read_file(out.path));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) lines.push_back(line);
  // p=0: singleton clusters, band clusters {0},{1},{2}, six ordered pairs each
  REQUIRE(lines.size() == 19);
  CHECK(lines[0] == "p,replica,C,C_prime,wC,wC_prime,wTau,sizeTau");
  json manifest = json::parse(read_file(out.path + ".manifest.json"));
  CHECK(manifest["extras"]["rows"] == 18);
  CHECK(manifest["extras"]["nonempty_touching"] == 12);  // siblings 1,2 never touch
  CHECK(manifest["extras"]["weight_den_exp"] == 4);
  CHECK(manifest["extras"]["pick_law"] == "cluster");
  // singletons: one partition class per vertex, one finite-touch pair per edge
  CHECK(manifest["extras"]["mean_partition_classes"] == 31.0);
  CHECK(manifest["extras"]["mean_finite_touch_edges"] == 58.0);

  cfg.pick_law = "vertex";
  run(cfg);
  cfg.pick_law = "junk";
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}

TEST_CASE("the mass-transport battery balances every exact kernel") {
  ExperimentConfig cfg;
  cfg.subcommand = "tmtp";
  cfg.family = "grandparent";
  cfg.q = 2;
  cfg.height = 6;
  cfg.p = 0.4;
  cfg.replicas = 60;
  RunManifest man = run(cfg);
  json doc = json::parse(man.printed);
  REQUIRE(doc["checks"].size() == 5);
  std::vector<std::string> names;
  for (const auto& c : doc["checks"]) names.push_back(c["kernel"]);
  CHECK(names == std::vector<std::string>{"to_parent", "to_children", "to_grandparent",
                                          "sphere_uniform:1", "open_neighbors"});
  for (const auto& c : doc["checks"]) {
    if (c["deterministic"].get<bool>()) {
      CHECK(c["equal"] == true);
    } else {
      CHECK(c["replicas"] == 60);
      CHECK(c["se_diff"].get<double>() >= 0);
    }
  }

  cfg.family = "tree";
  json tree_doc = json::parse(run(cfg).printed);
  CHECK(tree_doc["checks"].size() == 4);

  cfg.kernels = {"to_parent"};
  json one = json::parse(run(cfg).printed);
  REQUIRE(one["checks"].size() == 1);
  CHECK(one["checks"][0]["equal"] == true);
}

TEST_CASE("expansion runs pick an interior root and report the quotient") {
  ExperimentConfig cfg;
  cfg.subcommand = "cheeger";
  cfg.family = "tree";
  cfg.q = 2;
  cfg.height = 6;
  cfg.k = 6;
  RunManifest man = run(cfg);
  json doc = json::parse(man.printed);
  CHECK(doc["root"] == 7);  // first vertex at mid depth 3
  CHECK(doc["k"] == 6);
  CHECK(doc["phi_k"].get<double>() > 0);
  CHECK(doc["witness"].size() >= 1);
  CHECK(doc["n_ball"] == 2);  // rim and apex both sit three steps away
  CHECK_FALSE(doc["phi_ball"].is_null());

  // a window too shallow to have interior vertices is refused
  ExperimentConfig shallow;
  shallow.subcommand = "cheeger";
  shallow.family = "grandparent";
  shallow.height = 2;
  CHECK_THROWS_AS(run(shallow), std::invalid_argument);
}

TEST_CASE("annulus runs expose the threshold sequence and shell data") {
  ExperimentConfig cfg;
  cfg.subcommand = "annuli";
  cfg.family = "tree";
  cfg.q = 2;
  cfg.height = 4;
  cfg.N = 1;
  cfg.n_max = 3;
  cfg.labels_mode = "all:1";
  RunManifest man = run(cfg);
  json doc = json::parse(man.printed);
  CHECK(doc["root"] == 0);
  CHECK(doc["m"] == json::array({1, 2, 3}));
  CHECK(doc["annulus_size"] == json::array({2, 4, 8}));
  // every depth shell of the weighted tree carries the same total weight
  CHECK(doc["annulus_units"] == json::array({"16", "16", "16"}));
  CHECK(doc["disjoint"] == true);
  CHECK(doc["contains_spheres"] == true);
  CHECK(doc["weight_den_exp"] == 4);

  cfg.labels_mode = "random";
  cfg.N = 3;
  json r1 = json::parse(run(cfg).printed);
  json r2 = json::parse(run(cfg).printed);
  CHECK(r1["annulus_size"] == r2["annulus_size"]);
  CHECK(r1["disjoint"] == true);

  cfg.labels_mode = "from-cluster-metric";
  cfg.p = 0.5;
  json cm = json::parse(run(cfg).printed);
  CHECK(cm["disjoint"] == true);

  cfg.labels_mode = "nonsense";
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
  cfg.labels_mode = "all:5";
  cfg.N = 2;
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
  cfg.labels_mode = "all:1";
  cfg.root = "31";
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
  cfg.root = "abc";
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}

TEST_CASE("subsampling runs report the tail bound") {
  ExperimentConfig cfg;
  cfg.subcommand = "subsample";
  cfg.weights = "harmonic";
  cfg.c = 0.5;
  cfg.n_terms = 100;
  cfg.replicas = 400;
  cfg.seed = 3;
  RunManifest man = run(cfg);
  json doc = json::parse(man.printed);
  CHECK(doc["replicas"] == 400);
  double h100 = 0;
  for (int k = 1; k <= 100; ++k) h100 += 1.0 / k;
  CHECK(doc["bound"].get<double>() == doctest::Approx(2.0 / h100));
  CHECK(doc["freq"].get<double>() <= 1.0);
  CHECK(doc["bound_holds"].is_boolean());

  cfg.c = 1.0;
  json full = json::parse(run(cfg).printed);
  CHECK(full["tail_count"] == 0);
  CHECK(full["bound"].get<double>() == 0.0);
  CHECK(full["bound_holds"] == true);
}

TEST_CASE("unwritable output paths surface as io errors") {
  ExperimentConfig cfg;
  cfg.subcommand = "simulate";
  cfg.height = 2;
  cfg.p = 0.5;
  cfg.out = "/nonexistent_dir_perco/out.csv";
  CHECK_THROWS_AS(run(cfg), IoError);
}
