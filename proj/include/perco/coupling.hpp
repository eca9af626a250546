#pragma once

#include <cstdint>
#include <vector>

#include "perco/exact.hpp"
#include "perco/rng.hpp"
#include "perco/window.hpp"

namespace perco {

// Monotone coupling of every percolation level at once: each edge carries a
// deterministic uniform label, and the level-p configuration keeps exactly the
// edges with label < p (strict, so p=0 is the empty configuration). Labels are
// pure functions of (seed, edge id): nothing is stored per replica.
struct EdgeCoupling {
  std::uint64_t seed = 0;
  double label(std::uint32_t edge_id) const {
    return rng::to_unit(rng::mix(rng::mix(seed, rng::TAG_EDGE), edge_id));
  }
};

EdgeCoupling sample_coupling(const GraphWindow& win, std::uint64_t seed);

inline std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) {
  return rng::mix(seed, replica);
}

struct ClusterAgg {
  std::uint64_t size = 0;
  std::uint32_t min_depth = 0;
  std::uint32_t max_depth = 0;
  u128 weight_units = 0;
};

struct ClusterLabeling {
  const GraphWindow* win = nullptr;
  std::uint64_t seed = 0;
  double p = 0;

  // clusters are indexed in increasing order of canonical id (their minimum
  // vertex id)
  std::vector<std::uint32_t> cluster_of;     // vertex -> cluster index
  std::vector<std::uint32_t> canonical_id;   // cluster index -> min vertex id
  std::vector<ClusterAgg> agg;
  std::vector<std::uint8_t> heavy;           // top-band rule at win->collar
  std::vector<std::uint64_t> mem_off;        // members CSR, vertex ids ascending
  std::vector<std::uint32_t> members;

  std::uint32_t n_clusters() const { return static_cast<std::uint32_t>(agg.size()); }
  std::vector<std::uint64_t> level_histogram(std::uint32_t cluster) const;
  UnitRatio cluster_weight(std::uint32_t cluster) const;
  bool edge_open(std::uint32_t edge_id) const {
    return EdgeCoupling{seed}.label(edge_id) < p;
  }
};

ClusterLabeling clusters_at(const GraphWindow& win, const EdgeCoupling& coupling,
                            double p);

// clusters meeting the depth<=collar band (the window's high-weight band)
std::vector<std::uint32_t> classify_heavy_proxy(const ClusterLabeling& labeling,
                                                std::uint32_t collar);

struct PhaseScanRecord {
  double p = 0;
  std::uint64_t replica = 0;
  std::uint64_t n_clusters = 0;
  std::uint64_t n_heavy = 0;
  std::uint64_t n_spanning = 0;  // band-to-rim clusters; feeds crossover summary
  u128 max_weight_units = 0;
  std::uint64_t max_size = 0;
};

struct PhaseScanResult {
  std::vector<double> p_grid;
  std::vector<PhaseScanRecord> records;  // sorted by (p index, replica)
  // fraction of replicas with >=1, >=2, ==1 band-to-rim clusters, per p
  std::vector<double> frac_ge1, frac_ge2, frac_eq1;
  // empirical crossovers: first grid p where the fraction reaches 1/2
  bool has_pc = false, has_ph = false, has_pu = false;
  double p_c_hat = 0, p_h_hat = 0, p_u_hat = 0;
};

PhaseScanResult phase_scan(const GraphWindow& win, const std::vector<double>& p_grid,
                           std::uint64_t replicas, std::uint64_t seed,
                           std::uint32_t threads = 0);

}  // namespace perco
