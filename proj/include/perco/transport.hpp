#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "perco/coupling.hpp"

namespace perco {

// Transport kernels are declared through group-invariant local data only
// (relative depths, meet depth, configuration near the pair), never raw ids.
// sphere_uniform uses the ancestry (tree) metric on every family, which those
// invariants determine directly.
struct KernelSpec {
  enum class Kind {
    to_parent,
    to_children,
    to_grandparent,
    sphere_uniform,
    open_neighbors
  };
  Kind kind = Kind::to_parent;
  std::uint32_t r = 0;  // sphere radius

  bool deterministic() const { return kind != Kind::open_neighbors; }
  std::string name() const;
  static KernelSpec parse(std::string_view name);
};

struct TMTPReport {
  std::string kernel;
  std::uint32_t rho = 0;
  bool deterministic = true;
  double p = 0;
  // deterministic kernels: exact mass out and weight-tilted mass in
  bigq lhs = 0, rhs = 0;
  // stochastic kernels: per-replica Monte Carlo summary
  std::uint64_t replicas = 0;
  double mean_lhs = 0, mean_rhs = 0, se_lhs = 0, se_rhs = 0;
  double mean_diff = 0, se_diff = 0;
};

// evaluation vertex with enough interior margin for the kernel's support and,
// for sphere kernels, for the sphere sizes it reads; throws when none exists
std::uint32_t tmtp_eval_vertex(const GraphWindow& win, const KernelSpec& spec);

TMTPReport check_tmtp(const GraphWindow& win, const KernelSpec& spec, double p,
                      std::uint64_t seed, std::uint64_t replicas);

// Every vertex sends mass 1/k^2 to the k-th vertex (itself first) of the
// deterministically chosen geodesic toward each same-cluster graph neighbor;
// the geodesic is the lexicographically minimal shortest path inside the
// cluster.
struct TransportFlows {
  std::vector<bigq> sent, received;          // per vertex
  std::vector<bigq> sent_by_depth, received_by_depth;
  bigq total_sent = 0, total_received = 0;
  bool conserved = false;
};

TransportFlows geodesic_transport(const ClusterLabeling& labeling);

struct SubsamplingTrial {
  std::string weights;
  double c = 0;
  std::uint64_t N = 0, replicas = 0;
  double weight_sum = 0;     // sum of the first N weights
  double expected_sum = 0;   // c * weight_sum
  double bound = 0;          // 4(1-c) / weight_sum
  std::uint64_t tail_count = 0;
  double freq = 0;           // empirical P(W_N < expected/2)
  double mc_se = 0;
};

// keep each weight independently with probability c and compare the
// frequency of losing half the expected retained mass against the
// variance bound
SubsamplingTrial subsampling_trial(std::string_view weights_spec, double c,
                                   std::uint64_t N, std::uint64_t replicas,
                                   std::uint64_t seed, std::uint32_t threads = 0);

}  // namespace perco
