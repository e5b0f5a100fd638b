#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "covertime/lattice.hpp"
#include "covertime/rng.hpp"

namespace covertime {

enum class StopReason { covered, inverse_local_reached, step_budget };

struct WalkOptions {
  bool keep_trajectory = false;
  std::uint64_t max_steps = 1'000'000'000ull;
};

// Continuous-time walk accounting: jumps follow the uniform embedded chain
// (parallel edges weighted by multiplicity), holding times are i.i.d. Exp(1),
// and local time at v is the holding time spent there divided by d_v.
struct WalkRecord {
  const LatticeGraph* graph = nullptr;
  std::uint32_t start = 0;
  std::vector<double> local_time;        // per vertex
  std::vector<std::uint64_t> visit_count;
  double elapsed = 0.0;
  StopReason stop_reason = StopReason::covered;
  std::optional<double> tau_cov;
  std::optional<double> tau_cov_return;
  std::uint64_t rng_seed = 0;
  // retained only when WalkOptions::keep_trajectory is set
  std::vector<std::uint32_t> path;  // visited vertices in order
  std::vector<double> hold;         // holding time at each path entry
};

WalkRecord run_until_cover(const LatticeGraph& g, std::uint32_t start, std::uint64_t seed,
                           const WalkOptions& options = {});

// Stops the instant the local time at v0 exceeds t; the final holding
// interval at v0 is truncated so L^{v0} equals t exactly.
WalkRecord run_until_inverse_local(const LatticeGraph& g, std::uint32_t v0, double t,
                                   std::uint64_t seed, const WalkOptions& options = {});

struct Excursion {
  std::size_t begin = 0;  // path indices; path[begin] == path[end] == v0
  std::size_t end = 0;
  double start_local_time = 0.0;  // v0 local time when the excursion departs
};

// Minimal v0-to-v0 segments whose concatenation is the trajectory. Requires
// a record with a kept trajectory starting at v0.
std::vector<Excursion> excursion_decompose(const WalkRecord& rec, std::uint32_t v0);

bool excursion_hits(const WalkRecord& rec, const Excursion& e, std::uint32_t v);

struct CrossingTrace {
  std::vector<std::uint32_t> endpoints;  // Z_k, outer-set vertices in order
  std::size_t count = 0;
};

// Successive minimal inner-to-outer segments of the trajectory.
CrossingTrace crossing_trace(const WalkRecord& rec, const std::vector<std::uint32_t>& inner,
                             const std::vector<std::uint32_t>& outer);

struct ThinPointResult {
  bool occurred = false;
  std::optional<std::uint32_t> witness;
};

ThinPointResult thin_point_event(const WalkRecord& rec, const std::vector<std::uint32_t>& region,
                                 long threshold = 120);

// v0-local-time stamps at which the indexed excursions began.
std::vector<double> occurrence_times(const WalkRecord& rec, const std::vector<Excursion>& excursions);

}  // namespace covertime
