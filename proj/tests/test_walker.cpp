#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "covertime/stats.hpp"
#include "covertime/walker.hpp"

using namespace covertime;

TEST_CASE("walks are reproducible from the seed") {
  const LatticeGraph g = build_box(7, Boundary::wired);
  const WalkRecord a = run_until_cover(g, g.require_v0(), 42);
  const WalkRecord b = run_until_cover(g, g.require_v0(), 42);
  CHECK(a.elapsed == b.elapsed);
  CHECK(a.local_time == b.local_time);
  CHECK(a.visit_count == b.visit_count);
  const WalkRecord c = run_until_cover(g, g.require_v0(), 43);
  CHECK(a.elapsed != c.elapsed);
}

TEST_CASE("cover run visits everything and returns to the start") {
  const LatticeGraph g = build_box(5, Boundary::wired);
  WalkOptions opt;
  opt.keep_trajectory = true;
  const WalkRecord rec = run_until_cover(g, g.require_v0(), 7, opt);
  CHECK(rec.stop_reason == StopReason::covered);
  for (std::uint64_t c : rec.visit_count) CHECK(c >= 1);
  REQUIRE(rec.tau_cov);
  REQUIRE(rec.tau_cov_return);
  CHECK(*rec.tau_cov <= *rec.tau_cov_return);
  CHECK(*rec.tau_cov_return == rec.elapsed);
  CHECK(rec.path.front() == g.require_v0());
  CHECK(rec.path.back() == g.require_v0());
  CHECK(rec.path.size() == rec.hold.size());

  // elapsed time decomposes exactly into degree-weighted local times
  double total = 0.0;
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
    total += rec.local_time[v] * g.degree(v);
  CHECK(total == doctest::Approx(rec.elapsed).epsilon(1e-12));
}

TEST_CASE("step budget is honored") {
  const LatticeGraph g = build_box(9, Boundary::wired);
  WalkOptions opt;
  opt.max_steps = 5;
  const WalkRecord rec = run_until_cover(g, g.require_v0(), 1, opt);
  CHECK(rec.stop_reason == StopReason::step_budget);
  opt.max_steps = 0;
  CHECK_THROWS_AS(run_until_cover(g, g.require_v0(), 1, opt), std::invalid_argument);
}

TEST_CASE("inverse local run lands exactly on t") {
  const LatticeGraph g = build_box(5, Boundary::wired);
  const std::uint32_t v0 = g.require_v0();
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const WalkRecord rec = run_until_inverse_local(g, v0, 2.5, seed);
    CHECK(rec.stop_reason == StopReason::inverse_local_reached);
    CHECK(rec.local_time[v0] == 2.5);
    double total = 0.0;
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
      total += rec.local_time[v] * g.degree(v);
    CHECK(total == doctest::Approx(rec.elapsed).epsilon(1e-12));
  }
  CHECK_THROWS_AS(run_until_inverse_local(g, v0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_until_inverse_local(g, 999, 1.0, 1), std::out_of_range);
}

TEST_CASE("single-edge cover time is a unit exponential") {
  // from v0 the first jump covers: tau_cov is the first holding time
  const LatticeGraph g = build_single_edge();
  std::vector<double> taus;
  for (int r = 0; r < 4000; ++r)
    taus.push_back(*run_until_cover(g, g.require_v0(), 1000 + r).tau_cov);
  const SampleSummary s = summarize(taus);
  CHECK(std::abs(s.mean - 1.0) < 3.0 * s.std_error_of_mean);
  const double ks = ks_statistic_one_sample(taus, [](double x) { return 1.0 - std::exp(-x); });
  CHECK(ks < 0.03);
}

TEST_CASE("mean local time away from v0 equals t") {
  const LatticeGraph g = build_path_wired(3);
  const std::uint32_t v0 = g.require_v0();
  const std::uint32_t x = 1;
  const double t = 2.0;
  std::vector<double> lx;
  for (int r = 0; r < 4000; ++r)
    lx.push_back(run_until_inverse_local(g, v0, t, 5000 + r).local_time[x]);
  const SampleSummary s = summarize(lx);
  CHECK(std::abs(s.mean - t) < 3.0 * s.std_error_of_mean);
}

TEST_CASE("excursion decomposition tiles the trajectory") {
  const LatticeGraph g = build_box(5, Boundary::wired);
  const std::uint32_t v0 = g.require_v0();
  WalkOptions opt;
  opt.keep_trajectory = true;
  const WalkRecord rec = run_until_inverse_local(g, v0, 1.5, 99, opt);
  const auto exc = excursion_decompose(rec, v0);
  REQUIRE(!exc.empty());
  for (const Excursion& e : exc) {
    CHECK(rec.path[e.begin] == v0);
    CHECK(rec.path[e.end] == v0);
    CHECK(e.begin < e.end);
    for (std::size_t i = e.begin + 1; i < e.end; ++i) CHECK(rec.path[i] != v0);
  }
  for (std::size_t k = 0; k + 1 < exc.size(); ++k) {
    CHECK(exc[k].end == exc[k + 1].begin);
    CHECK(exc[k].start_local_time < exc[k + 1].start_local_time);
  }
  const auto stamps = occurrence_times(rec, exc);
  REQUIRE(stamps.size() == exc.size());
  for (std::size_t k = 0; k < exc.size(); ++k) {
    CHECK(stamps[k] == exc[k].start_local_time);
    CHECK(stamps[k] > 0.0);
    CHECK(stamps[k] < 1.5);
  }

  const WalkRecord bare = run_until_inverse_local(g, v0, 1.5, 99);
  CHECK_THROWS_AS(excursion_decompose(bare, v0), std::invalid_argument);
}

TEST_CASE("excursion count over local time t is Poisson with rate d_v0") {
  const LatticeGraph g = build_single_edge();
  const std::uint32_t v0 = g.require_v0();
  const double t = 3.0;
  WalkOptions opt;
  opt.keep_trajectory = true;
  std::vector<double> counts;
  for (int r = 0; r < 4000; ++r) {
    const WalkRecord rec = run_until_inverse_local(g, v0, t, 7000 + r, opt);
    counts.push_back(static_cast<double>(excursion_decompose(rec, v0).size()));
  }
  const SampleSummary s = summarize(counts);
  // Poisson(d_v0 * t) = Poisson(3): mean and variance both 3
  CHECK(std::abs(s.mean - 3.0) < 3.0 * s.std_error_of_mean);
  CHECK(s.variance == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("excursion hits and crossings") {
  const LatticeGraph g = build_box(7, Boundary::wired);
  const std::uint32_t v0 = g.require_v0();
  WalkOptions opt;
  opt.keep_trajectory = true;
  const WalkRecord rec = run_until_inverse_local(g, v0, 4.0, 11, opt);
  const auto exc = excursion_decompose(rec, v0);
  const std::uint32_t center = g.vertex_at(3, 3);
  std::size_t hits = 0;
  for (const Excursion& e : exc) hits += excursion_hits(rec, e, center);
  CHECK(hits <= exc.size());

  const std::vector<std::uint32_t> inner = {center};
  std::vector<std::uint32_t> outer;
  for (int x = 1; x < 6; ++x) {
    outer.push_back(g.vertex_at(x, 1));
    outer.push_back(g.vertex_at(x, 5));
  }
  const CrossingTrace trace = crossing_trace(rec, inner, outer);
  CHECK(trace.count == trace.endpoints.size());
  for (std::uint32_t z : trace.endpoints) {
    bool in_outer = false;
    for (std::uint32_t w : outer) in_outer |= (w == z);
    CHECK(in_outer);
  }
  CHECK_THROWS_AS(crossing_trace(rec, inner, inner), std::invalid_argument);
  CHECK_THROWS_AS(crossing_trace(rec, {}, outer), std::invalid_argument);
}

TEST_CASE("thin point event") {
  const LatticeGraph g = build_box(5, Boundary::wired);
  WalkRecord rec;
  rec.graph = &g;
  rec.visit_count.assign(g.vertex_count(), 500);
  const std::vector<std::uint32_t> region = {g.vertex_at(2, 2), g.vertex_at(2, 3)};
  CHECK(!thin_point_event(rec, region).occurred);
  rec.visit_count[g.vertex_at(2, 3)] = 120;  // threshold is inclusive
  const ThinPointResult hit = thin_point_event(rec, region);
  CHECK(hit.occurred);
  CHECK(*hit.witness == g.vertex_at(2, 3));
  CHECK(!thin_point_event(rec, region, 50).occurred);
}
