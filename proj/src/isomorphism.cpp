#include "covertime/isomorphism.hpp"

#include <cmath>
#include <stdexcept>

#include "covertime/gff.hpp"
#include "covertime/stats.hpp"
#include "covertime/walker.hpp"

namespace covertime {

namespace {

std::vector<double> lhs_once(const LatticeGraph& g, const GffSampler& sampler, std::uint32_t v0,
                             double t, std::uint64_t seed) {
  const WalkRecord rec = run_until_inverse_local(g, v0, t, derive_seed(seed, 0));
  Rng rng(derive_seed(seed, 1));
  const std::vector<double> eta = sampler.sample(rng);
  std::vector<double> out(g.vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v)
    out[v] = rec.local_time[v] + 0.5 * eta[v] * eta[v];
  return out;
}

std::vector<double> rhs_once(const LatticeGraph& g, const GffSampler& sampler, double t,
                             std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<double> eta = sampler.sample(rng);
  const double shift = std::sqrt(2.0 * t);
  std::vector<double> out(g.vertex_count());
  // expanded so the zero-set value is exactly t, matching the walk side
  for (std::size_t v = 0; v < out.size(); ++v)
    out[v] = 0.5 * eta[v] * eta[v] + eta[v] * shift + t;
  return out;
}

}  // namespace

std::vector<double> sample_lhs(const LatticeGraph& g, std::uint32_t v0, double t,
                               std::uint64_t seed) {
  if (t <= 0.0) throw std::invalid_argument("invalid-parameters: t must be > 0");
  GffSampler sampler(g, {v0});
  return lhs_once(g, sampler, v0, t, seed);
}

std::vector<double> sample_rhs(const LatticeGraph& g, std::uint32_t v0, double t,
                               std::uint64_t seed) {
  if (t <= 0.0) throw std::invalid_argument("invalid-parameters: t must be > 0");
  GffSampler sampler(g, {v0});
  return rhs_once(g, sampler, t, seed);
}

IsomorphismReport verify_identity(const LatticeGraph& g, std::uint32_t v0, double t, int reps,
                                  std::uint64_t seed, double ks_max) {
  if (t <= 0.0) throw std::invalid_argument("invalid-parameters: t must be > 0");
  if (reps < 2) throw std::invalid_argument("invalid-parameters: reps must be >= 2");
  const std::size_t nv = g.vertex_count();
  GffSampler sampler(g, {v0});

  std::vector<std::vector<double>> lhs(nv), rhs(nv);
  for (auto& col : lhs) col.reserve(reps);
  for (auto& col : rhs) col.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    const auto l = lhs_once(g, sampler, v0, t, derive_seed(seed, 2ull * r));
    const auto rr = rhs_once(g, sampler, t, derive_seed(seed, 2ull * r + 1));
    for (std::size_t v = 0; v < nv; ++v) {
      lhs[v].push_back(l[v]);
      rhs[v].push_back(rr[v]);
    }
  }

  IsomorphismReport report;
  report.v0 = v0;
  report.t = t;
  report.reps = reps;
  report.ks_max = ks_max;
  report.low_power = reps < 10000;
  report.pass = true;
  for (std::size_t v = 0; v < nv; ++v) {
    PerVertexStats ps;
    ps.vertex = static_cast<std::uint32_t>(v);
    const SampleSummary sl = summarize(lhs[v]);
    const SampleSummary sr = summarize(rhs[v]);
    ps.lhs_mean = sl.mean;
    ps.rhs_mean = sr.mean;
    ps.lhs_var = sl.variance;
    ps.rhs_var = sr.variance;
    ps.se_mean = std::sqrt(sl.variance / reps + sr.variance / reps);
    ps.ks_statistic = ks_two_sample(lhs[v], rhs[v]).statistic;
    const double diff = std::abs(ps.lhs_mean - ps.rhs_mean);
    // at v0 both sides are the constant t; se_mean is 0 there
    const bool mean_ok = diff == 0.0 || diff < 3.0 * ps.se_mean;
    if (ps.ks_statistic >= ks_max || !mean_ok) report.pass = false;
    report.per_vertex.push_back(ps);
  }
  return report;
}

double compound_marginal_sample(double t, double resistance, Rng& rng) {
  if (t <= 0.0 || resistance <= 0.0)
    throw std::domain_error("domain-error: t and R must be positive");
  const std::uint64_t n = rng.poisson(t / resistance);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) sum += rng.exponential(resistance);
  return sum;
}

}  // namespace covertime
