#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "covertime/lattice.hpp"

namespace covertime {

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double variance = 0.0;
  double std_error_of_mean = 0.0;
  std::vector<double> quantiles;
};

SampleSummary summarize(std::vector<double> xs, const std::vector<double>& probs = {});

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// sup distance between empirical CDFs, ties handled exactly; asymptotic
// Kolmogorov p-value
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_statistic_one_sample(std::vector<double> sample,
                               const std::function<double(double)>& cdf);
double kolmogorov_tail(double lambda);  // Q_KS(lambda)

struct CovCheckResult {
  double empirical_cov = 0.0;
  double target = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

// samples correlated standard-normal pairs and compares cov(X^2, Y^2) to
// 2 rho^2 within 3 standard errors
CovCheckResult gaussian_square_cov_check(double rho, int reps, std::uint64_t seed);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

// least squares of median sqrt(tau_cov / (2 n^2)) against log n; the slope
// estimates sqrt(2/pi)
ScalingFit fit_cover_scaling(const std::vector<std::pair<int, std::vector<double>>>& points);

struct TauConcentration {
  double mean_ratio = 0.0;  // mean tau(t) / (2 t |E|)
  double sd_ratio = 0.0;    // SD tau(t) / (|E| sqrt(t))
};

TauConcentration tau_concentration_check(const LatticeGraph& g, std::uint32_t v0, double t,
                                         int reps, std::uint64_t seed);

}  // namespace covertime
