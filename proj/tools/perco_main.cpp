#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "perco/experiments.hpp"
#include "perco/perco_c.h"

namespace {

using perco::ExperimentConfig;

void add_window_options(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--family", cfg.family, "tree | grandparent | unit-tree")
      ->capture_default_str();
  sub->add_option("--q", cfg.q, "branching factor, >= 2")->capture_default_str();
  sub->add_option("--height", cfg.height, "window height H")->capture_default_str();
  sub->add_option("--collar", cfg.collar, "band depth for the heavy proxy")
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  sub->add_option("--out", cfg.out, "output path");
  sub->add_option("--threads", cfg.threads, "worker threads (0: PERCO_THREADS or hardware)")
      ->capture_default_str();
  sub->add_option("--max-vertices", cfg.max_vertices, "window vertex budget")
      ->capture_default_str();
}

void add_p(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--p", cfg.p, "open probability")->capture_default_str();
}

void add_replicas(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--replicas", cfg.replicas, "independent replicas")
      ->capture_default_str();
}

int dispatch(const ExperimentConfig& cfg) {
  char* out = nullptr;
  int32_t rc = perco_run_json(cfg.to_json().c_str(), &out);
  if (rc != PERCO_OK) {
    std::fprintf(stderr, "perco: %s\n", perco_last_error());
    return static_cast<int>(rc);
  }
  auto doc = nlohmann::json::parse(out);
  perco_free(out);
  std::fputs(doc.at("printed").get<std::string>().c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"percolation experiments on weighted tree windows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", perco_version());

  ExperimentConfig cfg;

  auto* info = app.add_subcommand("window-info", "print the window descriptor");
  add_window_options(info, cfg);

  auto* sim = app.add_subcommand("simulate", "cluster census at one p");
  add_window_options(sim, cfg);
  add_p(sim, cfg);
  add_replicas(sim, cfg);

  auto* scan = app.add_subcommand("phase-scan", "cluster census across a p grid");
  add_window_options(scan, cfg);
  add_replicas(scan, cfg);
  scan->add_option("--p-grid", cfg.p_grid, "grid as a:b:step")->required();

  auto* rep = app.add_subcommand("repulsion", "touching-set table over heavy cluster pairs");
  add_window_options(rep, cfg);
  add_p(rep, cfg);
  add_replicas(rep, cfg);
  rep->add_flag("--spanning-only", cfg.spanning_only,
                "restrict to band clusters that also reach the rim");
  rep->add_option("--pick-law", cfg.pick_law, "cluster | vertex")->capture_default_str();
  rep->add_option("--finite-threshold", cfg.finite_threshold,
                  "size cutoff for the finite-touch relation")
      ->capture_default_str();

  auto* tmtp = app.add_subcommand("tmtp", "mass-transport balance checks at a vertex");
  add_window_options(tmtp, cfg);
  add_p(tmtp, cfg);
  add_replicas(tmtp, cfg);
  tmtp->add_option("--kernel", cfg.kernels,
                   "kernel name, repeatable (default: a standard battery)");

  auto* chg = app.add_subcommand("cheeger", "weighted vertex expansion around a root");
  add_window_options(chg, cfg);
  chg->add_option("--k", cfg.k, "max subset size")->capture_default_str();
  chg->add_option("--root", cfg.root, "root vertex id, or auto")->capture_default_str();

  auto* ann = app.add_subcommand("annuli", "geometric annuli under edge-labeled lengths");
  add_window_options(ann, cfg);
  add_p(ann, cfg);
  ann->add_option("--N", cfg.N, "label bound")->capture_default_str();
  ann->add_option("--n-max", cfg.n_max, "number of annuli (0: fit to window)")
      ->capture_default_str();
  ann->add_option("--labels", cfg.labels_mode, "all:k | random | from-cluster-metric")
      ->capture_default_str();
  ann->add_option("--root", cfg.root, "root vertex id, or auto")->capture_default_str();

  auto* mrg = app.add_subcommand("merging", "heavy clusters merged between two levels");
  add_window_options(mrg, cfg);
  add_replicas(mrg, cfg);
  mrg->add_option("--p1", cfg.p1, "lower level")->capture_default_str();
  mrg->add_option("--p2", cfg.p2, "upper level")->capture_default_str();

  auto* sub = app.add_subcommand("subsample", "random subsampling of a weight series");
  add_window_options(sub, cfg);
  add_replicas(sub, cfg);
  sub->add_option("--weights", cfg.weights, "harmonic | constant")->capture_default_str();
  sub->add_option("--c", cfg.c, "keep probability")->capture_default_str();
  sub->add_option("--n-terms", cfg.n_terms, "series length")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "perco: %s\n", e.what());
    return PERCO_ERR_INVALID;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  return dispatch(cfg);
}
