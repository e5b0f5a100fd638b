#include "covertime/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covertime/rng.hpp"
#include "covertime/walker.hpp"

namespace covertime {

namespace {

double sorted_quantile(const std::vector<double>& xs, double p) {
  if (xs.empty()) return 0.0;
  const double pos = p * (xs.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - lo;
  return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

}  // namespace

SampleSummary summarize(std::vector<double> xs, const std::vector<double>& probs) {
  if (xs.empty()) throw std::invalid_argument("empty-sample");
  std::sort(xs.begin(), xs.end());
  SampleSummary s;
  s.count = xs.size();
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.variance = xs.size() > 1 ? ss / (xs.size() - 1) : 0.0;
  s.std_error_of_mean = std::sqrt(s.variance / xs.size());
  s.median = sorted_quantile(xs, 0.5);
  for (double p : probs) s.quantiles.push_back(sorted_quantile(xs, p));
  return s;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // dual theta series; the direct one converges too slowly here
    const double x = std::exp(-M_PI * M_PI / (8.0 * lambda * lambda));
    double sum = 0.0;
    for (int k = 1; k <= 5; ++k) sum += std::pow(x, (2 * k - 1) * (2 * k - 1));
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty-sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  if (i < a.size()) d = std::max(d, std::abs(i / na - 1.0));
  if (j < b.size()) d = std::max(d, std::abs(1.0 - j / nb));
  KsResult res;
  res.statistic = d;
  const double en = std::sqrt(na * nb / (na + nb));
  res.p_value = kolmogorov_tail((en + 0.12 + 0.11 / en) * d);
  return res;
}

double ks_statistic_one_sample(std::vector<double> sample,
                               const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("empty-sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return d;
}

CovCheckResult gaussian_square_cov_check(double rho, int reps, std::uint64_t seed) {
  if (std::abs(rho) > 1.0)
    throw std::invalid_argument("invalid-correlation: |rho| must be <= 1 for unit variances");
  if (reps < 100) throw std::invalid_argument("invalid-parameters: reps too small");
  Rng rng(seed);
  const double c = std::sqrt(1.0 - rho * rho);
  // batch means give a model-free standard error for the covariance estimate
  const int batches = 100;
  const int per = reps / batches;
  std::vector<double> batch_cov;
  batch_cov.reserve(batches);
  for (int bi = 0; bi < batches; ++bi) {
    double su = 0.0, sv = 0.0, suv = 0.0;
    for (int r = 0; r < per; ++r) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      const double u = z1 * z1;
      const double yv = rho * z1 + c * z2;
      const double v = yv * yv;
      su += u;
      sv += v;
      suv += u * v;
    }
    batch_cov.push_back(suv / per - (su / per) * (sv / per));
  }
  const SampleSummary s = summarize(batch_cov);
  CovCheckResult out;
  out.empirical_cov = s.mean;
  out.target = 2.0 * rho * rho;
  out.std_error = s.std_error_of_mean;
  out.pass = std::abs(out.empirical_cov - out.target) <= 3.0 * out.std_error;
  return out;
}

ScalingFit fit_cover_scaling(const std::vector<std::pair<int, std::vector<double>>>& points) {
  if (points.size() < 3) throw std::invalid_argument("insufficient-design: need >= 3 sizes");
  std::vector<double> xs, ys;
  for (const auto& [n, taus] : points) {
    if (taus.empty()) throw std::invalid_argument("empty-sample");
    std::vector<double> norm;
    norm.reserve(taus.size());
    for (double tau : taus) norm.push_back(std::sqrt(tau / (2.0 * n * static_cast<double>(n))));
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(summarize(norm).median);
  }
  const std::size_t k = xs.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  ScalingFit fit;
  fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / k;
  for (std::size_t i = 0; i < k; ++i)
    fit.residuals.push_back(ys[i] - fit.slope * xs[i] - fit.intercept);
  return fit;
}

TauConcentration tau_concentration_check(const LatticeGraph& g, std::uint32_t v0, double t,
                                         int reps, std::uint64_t seed) {
  if (reps < 100) throw std::invalid_argument("invalid-parameters: reps must be >= 100");
  std::vector<double> taus;
  taus.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    const WalkRecord rec =
        run_until_inverse_local(g, v0, t, derive_seed(seed, static_cast<std::uint64_t>(r)));
    taus.push_back(rec.elapsed);
  }
  const SampleSummary s = summarize(taus);
  const double edges = static_cast<double>(g.edge_count());
  TauConcentration out;
  out.mean_ratio = s.mean / (2.0 * t * edges);
  out.sd_ratio = std::sqrt(s.variance) / (edges * std::sqrt(t));
  return out;
}

}  // namespace covertime
