#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perco/touching.hpp"
#include "perco/window.hpp"

namespace perco {

inline constexpr const char* kToolVersion = "0.1.0";

// mirrors the CLI surface; round-trips through JSON losslessly
struct ExperimentConfig {
  std::string subcommand;
  std::string family = "tree";
  std::uint32_t q = 2;
  std::uint32_t height = 4;
  std::uint32_t collar = 0;
  double p = 0.5;
  std::string p_grid;  // "a:b:step"
  double p1 = 0.25, p2 = 0.5;
  std::uint64_t seed = 1;
  std::uint64_t replicas = 1;
  std::vector<std::string> kernels;
  std::uint32_t k = 8;             // cheeger subset size
  std::uint32_t N = 2;             // annuli label bound
  std::uint32_t n_max = 0;         // annuli count; 0 = fit to window
  std::string labels_mode = "random";  // all:k | random | from-cluster-metric
  std::string weights = "harmonic";
  double c = 0.5;
  std::uint64_t n_terms = 10000;
  std::string root = "auto";
  std::string pick_law = "cluster";  // cluster | vertex
  std::uint64_t finite_threshold = 8;
  bool spanning_only = false;
  std::string out;
  std::uint32_t threads = 0;  // 0: PERCO_THREADS or hardware
  std::uint64_t max_vertices = 1ull << 24;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
};

std::vector<double> parse_p_grid(const std::string& spec);

struct OutputFile {
  std::string path;
  std::uint64_t bytes = 0;
  std::string digest;  // 64-bit FNV-1a, hex
};

struct RunManifest {
  std::string tool_version;
  std::uint64_t wall_ms = 0;
  std::vector<OutputFile> outputs;
  std::string manifest_json;  // full manifest document
  std::string printed;        // what the CLI should show on stdout
};

RunManifest run(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace perco
