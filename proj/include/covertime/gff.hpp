#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cstdint>
#include <optional>
#include <vector>

#include "covertime/lattice.hpp"
#include "covertime/rng.hpp"

namespace covertime {

// Exact GFF sampling: the field's precision matrix is the interior graph
// Laplacian, so one sparse Cholesky factorization serves every replica via a
// triangular back-solve against a standard-normal vector.
class GffSampler {
 public:
  GffSampler(const LatticeGraph& g, std::vector<std::uint32_t> zero_set);

  // field over all vertices; exactly 0 on the zero set
  std::vector<double> sample(Rng& rng) const;
  const LatticeGraph& graph() const { return *g_; }
  const std::vector<std::uint32_t>& zero_set() const { return zero_set_; }
  const std::vector<std::uint32_t>& interior() const { return interior_; }

 private:
  const LatticeGraph* g_;
  std::vector<std::uint32_t> zero_set_;
  std::vector<std::uint32_t> interior_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
};

struct GffSample {
  std::vector<double> values;
  std::uint64_t seed = 0;
};

GffSample sample_gff(const LatticeGraph& g, const std::vector<std::uint32_t>& zero_set,
                     std::uint64_t seed);

struct MaxStatistics {
  int n = 0;
  int reps = 0;
  std::vector<double> max_samples;
  double mean = 0.0;
  double median = 0.0;
  std::optional<double> std_dev;  // absent when reps == 1
};

// M_n = sup of the field over the wired n x n box; the identified boundary
// vertex contributes a zero floor, so M_n >= 0 always.
MaxStatistics max_statistics(int n, int reps, std::uint64_t seed);

// sqrt(2/pi) (log n - 3/(8 log 2) log log n); natural logs, valid for n >= 16
double bz_prediction(int n);

struct DetectionResult {
  bool occurred = false;
  std::optional<std::uint32_t> witness;
};

// true iff some v in the region has |eta_v - level| * |eta_u - level| <= 1/4
// for every neighbor u
DetectionResult detection_event(const LatticeGraph& g, const std::vector<double>& field,
                                const std::vector<std::uint32_t>& region, double level);

struct QuantileDominationReport {
  double p1 = 0.0;  // P(sup over region of the U1-field >= level)
  double p2 = 0.0;
  double se1 = 0.0;
  double se2 = 0.0;
  double ratio = 0.0;  // p1 / p2
  bool violation = false;
  int reps = 0;
};

// Monte Carlo check of the nested-zero-set tail inequality p1 >= p2 / 2.
QuantileDominationReport quantile_domination_check(const LatticeGraph& g,
                                                   const std::vector<std::uint32_t>& zero1,
                                                   const std::vector<std::uint32_t>& zero2,
                                                   const std::vector<std::uint32_t>& region,
                                                   double level, int reps, std::uint64_t seed);

}  // namespace covertime
