#pragma once

#include <cstdint>
#include <vector>

#include "covertime/lattice.hpp"
#include "covertime/rng.hpp"

namespace covertime {

// Both sides of the local-time / squared-field identity
//   { L_{tau(t)}^x + eta_x^2 / 2 }  =law=  { (eta_x + sqrt(2t))^2 / 2 }
// sampled under the product measure: every replica draws an independent walk
// and an independent field.

std::vector<double> sample_lhs(const LatticeGraph& g, std::uint32_t v0, double t,
                               std::uint64_t seed);
std::vector<double> sample_rhs(const LatticeGraph& g, std::uint32_t v0, double t,
                               std::uint64_t seed);

struct PerVertexStats {
  std::uint32_t vertex = 0;
  double ks_statistic = 0.0;
  double lhs_mean = 0.0;
  double rhs_mean = 0.0;
  double lhs_var = 0.0;
  double rhs_var = 0.0;
  double se_mean = 0.0;  // standard error of the mean difference
};

struct IsomorphismReport {
  std::uint32_t v0 = 0;
  double t = 0.0;
  int reps = 0;
  double ks_max = 0.0;
  std::vector<PerVertexStats> per_vertex;
  bool pass = false;
  bool low_power = false;  // reps below the regime where ks_max is meaningful
};

IsomorphismReport verify_identity(const LatticeGraph& g, std::uint32_t v0, double t, int reps,
                                  std::uint64_t seed, double ks_max = 0.01);

// One draw from the compound-Poisson local-time marginal: Poisson(t/R) many
// i.i.d. Exp(mean R) terms.
double compound_marginal_sample(double t, double resistance, Rng& rng);

}  // namespace covertime
