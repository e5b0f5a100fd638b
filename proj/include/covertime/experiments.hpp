#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covertime/lattice.hpp"

namespace covertime {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  std::vector<int> sizes;
  std::string boundary = "wired";  // wired | free | torus | disk
  double kappa = 2.0;
  std::optional<double> t;
  std::optional<double> lambda;  // t = (1/pi)(log n + lambda)^2 when set
  int replicas = 100;
  std::uint64_t seed = 0;
  std::string out = "results.csv";
  int workers = 1;
  std::string graph_preset = "single-edge";
  double level = 1.0;
  std::vector<int> inner_radii = {2, 3, 4, 5, 6};  // harmonic-tv target radii
  std::optional<int> box_side;                     // thin-points packing box side
};

// (1/pi)(log n + lambda)^2; rejects schedules with log n + lambda <= 0
double t_lambda_schedule(int n, double lambda);

// line-oriented `key = value` text, '#' comments, comma-separated lists
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

struct ResultRow {
  std::string experiment;
  int n = 0;
  long replica = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> measures;
};

struct RunResult {
  std::vector<ResultRow> rows;
  std::string manifest;
  std::string csv_path;
  std::string manifest_path;
};

// Executes the experiment, writes the CSV and a plain-text manifest next to
// it. Identical configs reproduce identical CSV bytes for any worker count.
RunResult run(const ExperimentConfig& config);

LatticeGraph build_preset_graph(const std::string& name);

void parallel_for(int count, int workers, const std::function<void(int)>& fn);

// fixed shortest-roundtrip formatting shared by every CSV writer
std::string format_double(double x);

}  // namespace covertime
