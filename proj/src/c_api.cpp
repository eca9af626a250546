#include "perco/perco_c.h"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "perco/coupling.hpp"
#include "perco/errors.hpp"
#include "perco/experiments.hpp"
#include "perco/window.hpp"

namespace {

thread_local std::string g_error;

void set_error(const char* what) { g_error = what ? what : "unknown error"; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
int32_t guarded(Fn&& fn) {
  try {
    fn();
    g_error.clear();
    return PERCO_OK;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return PERCO_ERR_INVALID;
  } catch (const perco::BudgetError& e) {
    set_error(e.what());
    return PERCO_ERR_BUDGET;
  } catch (const perco::IoError& e) {
    set_error(e.what());
    return PERCO_ERR_IO;
  } catch (const std::exception& e) {
    set_error(e.what());
    return PERCO_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return PERCO_ERR_INTERNAL;
  }
}

const perco::GraphWindow* unwrap(const perco_window* win) {
  if (!win) throw std::invalid_argument("null window handle");
  return reinterpret_cast<const perco::GraphWindow*>(win);
}

}  // namespace

extern "C" {

int32_t perco_abi_version(void) { return 1; }

const char* perco_version(void) { return perco::kToolVersion; }

const char* perco_last_error(void) { return g_error.c_str(); }

void perco_clear_error(void) { g_error.clear(); }

int32_t perco_window_create(const char* family, uint32_t q, uint32_t height,
                            uint32_t collar, perco_window** out) {
  return guarded([&] {
    if (!family || !out) throw std::invalid_argument("null argument");
    auto* win = new perco::GraphWindow(perco::build_window(
        perco::family_from_string(family), q, height, collar));
    *out = reinterpret_cast<perco_window*>(win);
  });
}

void perco_window_destroy(perco_window* win) {
  delete reinterpret_cast<perco::GraphWindow*>(win);
}

int32_t perco_window_counts(const perco_window* win, uint64_t* n_vertices,
                            uint64_t* n_edges) {
  return guarded([&] {
    const auto* w = unwrap(win);
    if (!n_vertices || !n_edges) throw std::invalid_argument("null argument");
    *n_vertices = w->n_vertices;
    *n_edges = w->edges.size();
  });
}

int32_t perco_window_info_json(const perco_window* win, char** out) {
  return guarded([&] {
    const auto* w = unwrap(win);
    if (!out) throw std::invalid_argument("null argument");
    *out = dup_string(perco::window_info_json(*w));
  });
}

int32_t perco_vertex_depth(const perco_window* win, uint64_t v, uint32_t* out) {
  return guarded([&] {
    const auto* w = unwrap(win);
    if (!out) throw std::invalid_argument("null argument");
    if (v >= w->n_vertices) throw std::invalid_argument("vertex out of range");
    *out = w->depth(static_cast<std::uint32_t>(v));
  });
}

int32_t perco_cocycle_exponent(const perco_window* win, uint64_t x, uint64_t y,
                               int64_t* out) {
  return guarded([&] {
    const auto* w = unwrap(win);
    if (!out) throw std::invalid_argument("null argument");
    if (x >= w->n_vertices || y >= w->n_vertices)
      throw std::invalid_argument("vertex out of range");
    *out = perco::cocycle_exp(*w, static_cast<std::uint32_t>(x),
                              static_cast<std::uint32_t>(y));
  });
}

int32_t perco_orbit_count_ratio(const perco_window* win, uint64_t x, uint64_t y,
                                uint64_t* num, uint64_t* den) {
  return guarded([&] {
    const auto* w = unwrap(win);
    if (!num || !den) throw std::invalid_argument("null argument");
    if (x >= w->n_vertices || y >= w->n_vertices)
      throw std::invalid_argument("vertex out of range");
    auto ratio = perco::orbit_count_ratio(*w, static_cast<std::uint32_t>(x),
                                          static_cast<std::uint32_t>(y));
    *num = ratio.first;
    *den = ratio.second;
  });
}

int32_t perco_edge_label(const perco_window* win, uint64_t seed,
                         uint64_t edge_id, double* out) {
  return guarded([&] {
    const auto* w = unwrap(win);
    if (!out) throw std::invalid_argument("null argument");
    if (edge_id >= w->edges.size()) throw std::invalid_argument("edge out of range");
    *out = perco::EdgeCoupling{seed}.label(edge_id);
  });
}

int32_t perco_cluster_count(const perco_window* win, uint64_t seed, double p,
                            uint64_t* out) {
  return guarded([&] {
    const auto* w = unwrap(win);
    if (!out) throw std::invalid_argument("null argument");
    auto lab = perco::clusters_at(*w, perco::EdgeCoupling{seed}, p);
    *out = lab.n_clusters();
  });
}

int32_t perco_run_json(const char* config_json, char** out) {
  return guarded([&] {
    if (!config_json || !out) throw std::invalid_argument("null argument");
    auto cfg = perco::ExperimentConfig::from_json(config_json);
    perco::RunManifest man = perco::run(cfg);
    nlohmann::json doc{{"manifest", nlohmann::json::parse(man.manifest_json)},
                       {"printed", man.printed}};
    *out = dup_string(doc.dump());
  });
}

void perco_free(void* ptr) { std::free(ptr); }

}  // extern "C"
