#include "covertime/gff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covertime/stats.hpp"

namespace covertime {

GffSampler::GffSampler(const LatticeGraph& g, std::vector<std::uint32_t> zero_set)
    : g_(&g), zero_set_(std::move(zero_set)) {
  if (zero_set_.empty()) throw std::invalid_argument("no-zero-set: U must be nonempty");
  std::sort(zero_set_.begin(), zero_set_.end());
  zero_set_.erase(std::unique(zero_set_.begin(), zero_set_.end()), zero_set_.end());
  const std::size_t nv = g.vertex_count();
  std::vector<int> index(nv, -1);
  std::vector<char> zero(nv, 0);
  for (std::uint32_t v : zero_set_) {
    if (v >= nv) throw std::out_of_range("not-found: zero-set vertex outside graph");
    zero[v] = 1;
  }
  for (std::uint32_t v = 0; v < nv; ++v)
    if (!zero[v]) {
      index[v] = static_cast<int>(interior_.size());
      interior_.push_back(v);
    }
  const auto ni = static_cast<Eigen::Index>(interior_.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(interior_.size() * 5);
  for (Eigen::Index i = 0; i < ni; ++i) {
    const std::uint32_t v = interior_[static_cast<std::size_t>(i)];
    trips.emplace_back(i, i, static_cast<double>(g.degree(v)));
    for (std::uint32_t w : g.neighbors(v))
      if (index[w] >= 0) trips.emplace_back(i, index[w], -1.0);
  }
  Eigen::SparseMatrix<double> lap(ni, ni);
  lap.setFromTriplets(trips.begin(), trips.end());
  llt_.compute(lap);
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("numerical-failure: precision matrix factorization failed");
}

std::vector<double> GffSampler::sample(Rng& rng) const {
  const auto ni = static_cast<Eigen::Index>(interior_.size());
  Eigen::VectorXd z(ni);
  for (Eigen::Index i = 0; i < ni; ++i) z[i] = rng.normal();
  // P Lap P^T = Lc Lc^T; eta = P^-1 Lc^-T z has covariance Lap^-1 = G D^-1
  Eigen::VectorXd w = llt_.matrixU().solve(z);
  Eigen::VectorXd eta = llt_.permutationPinv() * w;
  std::vector<double> out(g_->vertex_count(), 0.0);
  for (std::size_t i = 0; i < interior_.size(); ++i)
    out[interior_[i]] = eta[static_cast<Eigen::Index>(i)];
  return out;
}

GffSample sample_gff(const LatticeGraph& g, const std::vector<std::uint32_t>& zero_set,
                     std::uint64_t seed) {
  GffSampler sampler(g, zero_set);
  Rng rng(seed);
  return {sampler.sample(rng), seed};
}

MaxStatistics max_statistics(int n, int reps, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("invalid-size: box side must be >= 3");
  if (reps < 1) throw std::invalid_argument("invalid-parameters: reps must be >= 1");
  const LatticeGraph g = build_box(n, Boundary::wired);
  GffSampler sampler(g, {g.require_v0()});
  MaxStatistics stats;
  stats.n = n;
  stats.reps = reps;
  stats.max_samples.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    const std::vector<double> field = sampler.sample(rng);
    double mx = 0.0;  // the identified boundary sits at 0
    for (std::uint32_t v : sampler.interior()) mx = std::max(mx, field[v]);
    stats.max_samples.push_back(mx);
  }
  const SampleSummary s = summarize(stats.max_samples);
  stats.mean = s.mean;
  stats.median = s.median;
  if (reps > 1) stats.std_dev = std::sqrt(s.variance);
  return stats;
}

double bz_prediction(int n) {
  if (n < 16)
    throw std::domain_error("domain-error: prediction needs n >= 16 (log log n > 0)");
  const double ln = std::log(static_cast<double>(n));
  return std::sqrt(2.0 / M_PI) * (ln - 3.0 / (8.0 * std::log(2.0)) * std::log(ln));
}

DetectionResult detection_event(const LatticeGraph& g, const std::vector<double>& field,
                                const std::vector<std::uint32_t>& region, double level) {
  for (std::uint32_t v : region) {
    bool ok = true;
    const double dv = std::abs(field[v] - level);
    for (std::uint32_t u : g.neighbors(v)) {
      if (dv * std::abs(field[u] - level) > 0.25) {
        ok = false;
        break;
      }
    }
    if (ok) return {true, v};
  }
  return {false, std::nullopt};
}

QuantileDominationReport quantile_domination_check(const LatticeGraph& g,
                                                   const std::vector<std::uint32_t>& zero1,
                                                   const std::vector<std::uint32_t>& zero2,
                                                   const std::vector<std::uint32_t>& region,
                                                   double level, int reps, std::uint64_t seed) {
  std::vector<std::uint32_t> u1 = zero1, u2 = zero2;
  std::sort(u1.begin(), u1.end());
  std::sort(u2.begin(), u2.end());
  if (!std::includes(u2.begin(), u2.end(), u1.begin(), u1.end()))
    throw std::invalid_argument("invalid-nesting: U1 must be contained in U2");
  GffSampler s1(g, u1), s2(g, u2);
  auto tail = [&](const GffSampler& s, std::uint64_t stream) {
    long hits = 0;
    for (int r = 0; r < reps; ++r) {
      Rng rng(derive_seed(seed, stream * static_cast<std::uint64_t>(reps) + r));
      const std::vector<double> field = s.sample(rng);
      double mx = -1e300;
      for (std::uint32_t v : region) mx = std::max(mx, field[v]);
      if (mx >= level) ++hits;
    }
    return static_cast<double>(hits) / reps;
  };
  QuantileDominationReport rep;
  rep.reps = reps;
  rep.p1 = tail(s1, 0);
  rep.p2 = tail(s2, 1);
  rep.se1 = std::sqrt(rep.p1 * (1.0 - rep.p1) / reps);
  rep.se2 = std::sqrt(rep.p2 * (1.0 - rep.p2) / reps);
  rep.ratio = rep.p2 > 0.0 ? rep.p1 / rep.p2 : 1.0;
  const double se_comb = std::sqrt(rep.se1 * rep.se1 + 0.25 * rep.se2 * rep.se2);
  rep.violation = rep.p1 < 0.5 * rep.p2 - 3.0 * se_comb;
  return rep;
}

}  // namespace covertime
