// End-to-end acceptance checks. Each criterion prints a single pass/fail
// line; the exit code is the number of failed criteria. All tolerances are
// fixed here, not tunable from outside.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "covertime/exactsolve.hpp"
#include "covertime/experiments.hpp"
#include "covertime/gff.hpp"
#include "covertime/isomorphism.hpp"
#include "covertime/lattice.hpp"
#include "covertime/rng.hpp"
#include "covertime/stats.hpp"
#include "covertime/walker.hpp"

using namespace covertime;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

// ---- 1: local-time / squared-field identity across graphs and levels ----
void criterion_1() {
  const std::vector<std::pair<std::string, LatticeGraph>> graphs = {
      {"single-edge", build_preset_graph("single-edge")},
      {"wired-5", build_preset_graph("wired-5")},
      {"torus-6", build_preset_graph("torus-6")},
  };
  const int reps = 200000;
  bool pass = true;
  double worst_ks = 0.0, worst_mean_gap = 0.0;
  std::uint64_t seed = 1001;
  for (const auto& [name, g] : graphs) {
    for (double t : {0.5, 1.0, 4.0}) {
      const IsomorphismReport rep = verify_identity(g, g.require_v0(), t, reps, seed++, 0.01);
      pass = pass && rep.pass;
      for (const PerVertexStats& ps : rep.per_vertex) {
        worst_ks = std::max(worst_ks, ps.ks_statistic);
        if (ps.se_mean > 0.0)
          worst_mean_gap =
              std::max(worst_mean_gap, std::abs(ps.lhs_mean - ps.rhs_mean) / ps.se_mean);
      }
    }
  }
  report(1, pass, "identity in law on 3 graphs x 3 levels: max KS " + fmt(worst_ks) +
                      " (< 0.01), worst mean gap " + fmt(worst_mean_gap) + " SE (< 3)");
}

// ---- 2: sampled field covariance against the exact solver ----
void criterion_2() {
  const LatticeGraph g = build_box(9, Boundary::wired);
  const std::uint32_t v0 = g.require_v0();
  const GreenSolution sol(g, {v0});
  const GffSampler sampler(g, {v0});
  const int reps = 100000;
  const std::size_t nv = g.vertex_count();

  Rng rng(2002);
  std::vector<double> acc(nv * nv, 0.0);
  for (int r = 0; r < reps; ++r) {
    const std::vector<double> eta = sampler.sample(rng);
    for (std::size_t i = 0; i < nv; ++i)
      for (std::size_t j = i; j < nv; ++j) acc[i * nv + j] += eta[i] * eta[j];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < nv; ++i)
    for (std::size_t j = i; j < nv; ++j) {
      const auto vi = static_cast<std::uint32_t>(i), vj = static_cast<std::uint32_t>(j);
      const double want = sol.green(vi, vj) / g.degree(vj);
      const double got = acc[i * nv + j] / reps;
      const double se = std::sqrt((sol.green(vi, vi) / g.degree(vi) *
                                       (sol.green(vj, vj) / g.degree(vj)) +
                                   want * want) /
                                  reps);
      if (se > 0.0) worst = std::max(worst, std::abs(got - want) / se);
    }
  const bool cov_ok = worst < 4.0;

  const LatticeGraph g3 = build_box(3, Boundary::wired);
  const GffSampler s3(g3, {g3.require_v0()});
  const std::uint32_t center = g3.vertex_at(1, 1);
  Rng rng3(2003);
  const int reps3 = 100000;
  double ss = 0.0;
  for (int r = 0; r < reps3; ++r) {
    const double eta = s3.sample(rng3)[center];
    ss += eta * eta;
  }
  const double var = ss / reps3;
  const double se3 = 0.25 * std::sqrt(2.0 / reps3);
  const bool var_ok = std::abs(var - 0.25) < 3.0 * se3;

  report(2, cov_ok && var_ok,
         "9x9 covariance worst deviation " + fmt(worst) + " SE (< 4); center variance " +
             fmt(var) + " vs 0.25 (within 3 SE)");
}

// ---- 3: two exact Green routes, resistance identity, annulus formula ----
void criterion_3() {
  bool kernel_ok = true;
  double worst_diff = 0.0;
  for (int n : {21, 41}) {
    const LatticeGraph g = build_box(n, Boundary::wired);
    const GreenSolution sol(g, {g.require_v0()});
    const BoxKernelGreen bkg(n);
    const int c = n / 2;
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) {
        const double direct = sol.green(g.vertex_at(c, c), g.vertex_at(c + dx, c + dy));
        const double kernel = bkg.green({c, c}, {c + dx, c + dy});
        worst_diff = std::max(worst_diff, std::abs(direct - kernel));
      }
    // an off-center pair at unit separation
    const double direct = sol.green(g.vertex_at(c - 4, c + 3), g.vertex_at(c - 4, c + 4));
    const double kernel = bkg.green({c - 4, c + 3}, {c - 4, c + 4});
    worst_diff = std::max(worst_diff, std::abs(direct - kernel));
  }
  kernel_ok = worst_diff < 1e-3;

  // resistance: the solver identity and an escape-probability route
  const LatticeGraph g21 = build_box(21, Boundary::wired);
  const std::uint32_t v0 = g21.require_v0();
  const std::uint32_t center = g21.vertex_at(10, 10);
  const GreenSolution sol21(g21, {v0});
  const double r_green = sol21.green(center, center) / 4.0;
  const double r_ident = sol21.resistance(center);
  double p_escape = 0.0;
  for (std::uint32_t u : g21.neighbors(center))
    p_escape += harmonic_measure(g21, u, {v0, center}).weight_of(v0);
  p_escape /= g21.degree(center);
  const double r_escape = 1.0 / (g21.degree(center) * p_escape);
  const bool resistance_ok =
      std::abs(r_green - r_ident) < 1e-9 && std::abs(r_green - r_escape) < 1e-9;

  // annulus escape law, error c/m with c stable across sizes
  const double m = 5.0;
  std::vector<double> cs;
  for (int n : {30, 50, 80}) {
    const LatticeGraph g = build_disk(n);
    std::vector<std::uint32_t> absorbing = sites_in_disk(g, {0, 0}, m);
    const std::vector<std::uint32_t> rim = disk_boundary_sites(g, {0, 0}, n);
    absorbing.insert(absorbing.end(), rim.begin(), rim.end());
    std::sort(absorbing.begin(), absorbing.end());
    absorbing.erase(std::unique(absorbing.begin(), absorbing.end()), absorbing.end());
    const GreenSolution sol(g, absorbing);
    std::vector<char> is_rim(g.vertex_count(), 0);
    for (std::uint32_t v : rim) is_rim[v] = 1;
    const auto& interior = sol.interior();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t i = 0; i < interior.size(); ++i)
      for (std::uint32_t w : g.neighbors(interior[i]))
        if (is_rim[w]) rhs[static_cast<Eigen::Index>(i)] += 1.0;
    const Eigen::VectorXd h = sol.solve_interior(rhs);
    double max_err = 0.0;
    for (std::size_t i = 0; i < interior.size(); ++i) {
      const Point p = g.coord(interior[i]);
      max_err = std::max(
          max_err, std::abs(h[static_cast<Eigen::Index>(i)] - annulus_escape_prob(p, m, n)));
    }
    cs.push_back(m * max_err);
  }
  const double c_mean = (cs[0] + cs[1] + cs[2]) / 3.0;
  bool annulus_ok = true;
  for (double c : cs) annulus_ok = annulus_ok && std::abs(c - c_mean) <= 0.5 * c_mean;

  report(3, kernel_ok && resistance_ok && annulus_ok,
         "kernel-route max diff " + fmt(worst_diff) + " (< 1e-3); resistance routes within " +
             fmt(std::max(std::abs(r_green - r_ident), std::abs(r_green - r_escape))) +
             " (< 1e-9); annulus constants " + fmt(cs[0]) + "/" + fmt(cs[1]) + "/" + fmt(cs[2]) +
             " stable within 50%");
}

// ---- 4: compound-Poisson local-time marginal ----
void criterion_4() {
  struct Setup {
    std::string name;
    LatticeGraph g;
    std::uint32_t x;
  };
  std::vector<Setup> setups;
  {
    LatticeGraph e = build_single_edge();
    setups.push_back({"single-edge", std::move(e), 1});
  }
  {
    LatticeGraph b = build_box(5, Boundary::wired);
    const std::uint32_t c = b.vertex_at(2, 2);
    setups.push_back({"wired-5", std::move(b), c});
  }
  const double t = 1.0;
  const int reps = 100000;
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 4004;
  for (const Setup& s : setups) {
    const std::uint32_t v0 = s.g.require_v0();
    const GreenSolution sol(s.g, {v0});
    const double resistance = sol.resistance(s.x);
    std::vector<double> walker, compound;
    walker.reserve(reps);
    compound.reserve(reps);
    Rng rng(seed++);
    long zeros = 0;
    for (int r = 0; r < reps; ++r) {
      const double lx = run_until_inverse_local(s.g, v0, t, derive_seed(seed, r)).local_time[s.x];
      walker.push_back(lx);
      zeros += (lx == 0.0);
      compound.push_back(compound_marginal_sample(t, resistance, rng));
    }
    seed += reps;
    const double ks = ks_two_sample(walker, compound).statistic;
    const double p0 = std::exp(-t / resistance);
    const double p_hat = static_cast<double>(zeros) / reps;
    const double se = std::sqrt(p0 * (1.0 - p0) / reps);
    const bool ok = ks < 0.01 && std::abs(p_hat - p0) < 3.0 * se;
    pass = pass && ok;
    if (!detail.empty()) detail += ", ";
    detail += s.name + " KS " + fmt(ks) + " atom gap " + fmt(std::abs(p_hat - p0) / se) + " SE";
  }
  report(4, pass, detail + " (KS < 0.01, atom within 3 SE)");
}

// ---- 5: cover-time scaling ----
void criterion_5() {
  std::vector<std::pair<int, std::vector<double>>> points;
  for (int n : {32, 64, 128, 256}) {
    const LatticeGraph g = build_box(n, Boundary::wired);
    const std::uint32_t v0 = g.require_v0();
    std::vector<double> taus(100);
    parallel_for(100, 1, [&](int r) {
      taus[r] = *run_until_cover(g, v0, derive_seed(5005, (static_cast<std::uint64_t>(n) << 32) + r))
                     .tau_cov;
    });
    points.push_back({n, std::move(taus)});
  }
  const ScalingFit fit = fit_cover_scaling(points);
  const bool pass = fit.slope >= 0.72 && fit.slope <= 0.88;
  report(5, pass, "median sqrt(tau_cov / 2n^2) slope " + fmt(fit.slope) +
                      " vs log n (target [0.72, 0.88] around 0.7979)");
}

// ---- 6: inverse-local-time concentration ----
void criterion_6() {
  const LatticeGraph g = build_box(64, Boundary::wired);
  const double t = std::log(64.0) * std::log(64.0);
  const TauConcentration r = tau_concentration_check(g, g.require_v0(), t, 500, 6006);
  const bool pass = r.mean_ratio >= 0.98 && r.mean_ratio <= 1.02 && r.sd_ratio <= 5.0;
  report(6, pass, "wired 64x64: mean ratio " + fmt(r.mean_ratio) +
                      " (in [0.98, 1.02]), sd ratio " + fmt(r.sd_ratio) + " (<= 5)");
}

// ---- 7: covariance of squared correlated gaussians ----
void criterion_7() {
  bool pass = true;
  std::string detail;
  for (double rho : {0.0, 0.5, 1.0}) {
    const CovCheckResult r = gaussian_square_cov_check(rho, 1000000, 7007);
    pass = pass && r.pass;
    if (!detail.empty()) detail += ", ";
    detail += "rho " + fmt(rho) + ": " + fmt(r.empirical_cov) + " vs " + fmt(r.target);
  }
  report(7, pass, detail + " (each within 3 SE)");
}

// ---- 8: tail-probability domination for nested zero sets ----
void criterion_8() {
  const LatticeGraph g = build_box(17, Boundary::wired);
  const std::uint32_t v0 = g.require_v0();
  const std::vector<std::uint32_t> zero1 = {v0};
  std::vector<std::uint32_t> zero2 = {v0};
  for (int y = 1; y < 16; ++y) zero2.push_back(g.vertex_at(4, y));  // an interior wall
  std::vector<std::uint32_t> region;
  for (int x = 9; x <= 13; ++x)
    for (int y = 7; y <= 11; ++y) region.push_back(g.vertex_at(x, y));
  const QuantileDominationReport rep =
      quantile_domination_check(g, zero1, zero2, region, 1.5, 100000, 8008);
  const bool pass = !rep.violation && rep.p2 > 0.0;
  report(8, pass, "sup-tail ratio " + fmt(rep.ratio) + " with p1 " + fmt(rep.p1) + ", p2 " +
                      fmt(rep.p2) + " (>= 0.5 - 3 SE)");
}

// ---- 9: excursion counts, hit frequency, occurrence times ----
void criterion_9() {
  // counts and hit frequency on the wired 5x5 box
  const LatticeGraph g = build_box(5, Boundary::wired);
  const std::uint32_t v0 = g.require_v0();
  const std::uint32_t center = g.vertex_at(2, 2);
  const double t = 1.0;
  const double d0 = g.degree(v0);
  const GreenSolution sol(g, {v0});
  const double hit_want = 1.0 / (d0 * sol.resistance(center));

  WalkOptions opt;
  opt.keep_trajectory = true;
  const int walks = 100000;
  std::vector<double> counts;
  counts.reserve(walks);
  long long hits = 0, total_exc = 0;
  for (int r = 0; r < walks; ++r) {
    const WalkRecord rec = run_until_inverse_local(g, v0, t, derive_seed(9009, r), opt);
    const auto exc = excursion_decompose(rec, v0);
    counts.push_back(static_cast<double>(exc.size()));
    total_exc += static_cast<long long>(exc.size());
    for (const Excursion& e : exc) hits += excursion_hits(rec, e, center);
  }
  Rng rng(9010);
  std::vector<double> poisson;
  poisson.reserve(walks);
  for (int r = 0; r < walks; ++r)
    poisson.push_back(static_cast<double>(rng.poisson(d0 * t)));
  const double ks_counts = ks_two_sample(counts, poisson).statistic;

  const double hit_hat = static_cast<double>(hits) / static_cast<double>(total_exc);
  const double hit_se = std::sqrt(hit_want * (1.0 - hit_want) / static_cast<double>(total_exc));
  const bool hit_ok = std::abs(hit_hat - hit_want) < 3.0 * hit_se;

  // pooled occurrence times on the single edge
  const LatticeGraph edge = build_single_edge();
  const double te = 5.0;
  std::vector<double> stamps;
  for (int r = 0; r < 20000; ++r) {
    const WalkRecord rec =
        run_until_inverse_local(edge, edge.require_v0(), te, derive_seed(9011, r), opt);
    for (double s : occurrence_times(rec, excursion_decompose(rec, edge.require_v0())))
      stamps.push_back(s);
  }
  const double ks_uniform = ks_statistic_one_sample(
      stamps, [te](double x) { return std::clamp(x / te, 0.0, 1.0); });

  const bool pass = ks_counts < 0.01 && hit_ok && ks_uniform < 0.01;
  report(9, pass, "count KS " + fmt(ks_counts) + " vs Poisson(" + fmt(d0 * t) +
                      "); hit freq " + fmt(hit_hat) + " vs " + fmt(hit_want) +
                      " (3 SE); occurrence-time KS " + fmt(ks_uniform) + " (< 0.01)");
}

// ---- 10: byte-identical experiment outputs ----
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_10() {
  ExperimentConfig cfg;
  cfg.experiment = "cover-scaling";
  cfg.sizes = {32, 64};
  cfg.replicas = 5;
  cfg.seed = 10010;
  cfg.out = "acceptance_determinism.csv";
  run(cfg);
  const std::string first = slurp(cfg.out);
  run(cfg);
  const std::string second = slurp(cfg.out);
  cfg.workers = 4;
  run(cfg);
  const std::string third = slurp(cfg.out);
  std::remove(cfg.out.c_str());
  std::remove((cfg.out + ".manifest.txt").c_str());
  const bool pass = !first.empty() && first == second && first == third;
  report(10, pass, "rerun and 4-worker CSVs byte-identical (" +
                       std::to_string(first.size()) + " bytes)");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (failures == 0)
    std::printf("all 10 criteria passed\n");
  else
    std::printf("%d criteria failed\n", failures);
  return failures;
}
