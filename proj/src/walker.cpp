#include "covertime/walker.hpp"

#include <stdexcept>

namespace covertime {

namespace {

struct Engine {
  const LatticeGraph& g;
  Rng rng;
  WalkRecord rec;
  const WalkOptions& opt;
  std::uint64_t steps = 0;

  Engine(const LatticeGraph& graph, std::uint32_t start, std::uint64_t seed,
         const WalkOptions& options)
      : g(graph), rng(seed), opt(options) {
    rec.graph = &graph;
    rec.start = start;
    rec.rng_seed = seed;
    rec.local_time.assign(graph.vertex_count(), 0.0);
    rec.visit_count.assign(graph.vertex_count(), 0);
  }

  void account(std::uint32_t v, double h) {
    rec.elapsed += h;
    rec.local_time[v] += h / g.degree(v);
    if (opt.keep_trajectory) {
      rec.path.push_back(v);
      rec.hold.push_back(h);
    }
  }

  std::uint32_t jump(std::uint32_t v) {
    const auto& nbrs = g.neighbors(v);
    return nbrs[rng.index(nbrs.size())];
  }
};

}  // namespace

WalkRecord run_until_cover(const LatticeGraph& g, std::uint32_t start, std::uint64_t seed,
                           const WalkOptions& options) {
  if (start >= g.vertex_count()) throw std::out_of_range("not-found: start vertex");
  if (options.max_steps == 0) throw std::invalid_argument("invalid-parameters: budget must be > 0");
  Engine e(g, start, seed, options);
  std::uint32_t v = start;
  e.rec.visit_count[v] = 1;
  std::size_t uncovered = g.vertex_count() - 1;
  if (uncovered == 0) {
    e.rec.tau_cov = 0.0;
    e.rec.tau_cov_return = 0.0;
    e.rec.stop_reason = StopReason::covered;
    return std::move(e.rec);
  }
  bool covered = false;
  while (true) {
    if (e.steps++ >= options.max_steps) {
      e.rec.stop_reason = StopReason::step_budget;
      return std::move(e.rec);
    }
    e.account(v, e.rng.exponential());
    v = e.jump(v);
    if (e.rec.visit_count[v]++ == 0 && !covered) {
      if (--uncovered == 0) {
        covered = true;
        e.rec.tau_cov = e.rec.elapsed;
      }
    }
    if (covered && v == start) {
      e.rec.tau_cov_return = e.rec.elapsed;
      break;
    }
  }
  if (options.keep_trajectory) {  // terminal vertex, zero holding
    e.rec.path.push_back(v);
    e.rec.hold.push_back(0.0);
  }
  e.rec.stop_reason = StopReason::covered;
  return std::move(e.rec);
}

WalkRecord run_until_inverse_local(const LatticeGraph& g, std::uint32_t v0, double t,
                                   std::uint64_t seed, const WalkOptions& options) {
  if (v0 >= g.vertex_count()) throw std::out_of_range("not-found: v0");
  if (t <= 0.0) throw std::invalid_argument("invalid-parameters: t must be > 0");
  if (options.max_steps == 0) throw std::invalid_argument("invalid-parameters: budget must be > 0");
  Engine e(g, v0, seed, options);
  const double d0 = g.degree(v0);
  std::uint32_t v = v0;
  e.rec.visit_count[v] = 1;
  while (true) {
    double h = e.rng.exponential();
    if (v == v0 && e.rec.local_time[v0] + h / d0 >= t) {
      // truncate the holding interval so L^{v0} lands on t exactly
      h = (t - e.rec.local_time[v0]) * d0;
      e.rec.elapsed += h;
      e.rec.local_time[v0] = t;
      if (options.keep_trajectory) {
        e.rec.path.push_back(v0);
        e.rec.hold.push_back(h);
      }
      e.rec.stop_reason = StopReason::inverse_local_reached;
      return std::move(e.rec);
    }
    if (e.steps++ >= options.max_steps) {
      e.rec.stop_reason = StopReason::step_budget;
      return std::move(e.rec);
    }
    e.account(v, h);
    v = e.jump(v);
    ++e.rec.visit_count[v];
  }
}

std::vector<Excursion> excursion_decompose(const WalkRecord& rec, std::uint32_t v0) {
  if (rec.path.empty())
    throw std::invalid_argument("invalid-parameters: record has no kept trajectory");
  if (rec.path.front() != v0)
    throw std::invalid_argument("invalid-parameters: walk did not start at v0");
  const double d0 = rec.graph->degree(v0);
  std::vector<std::size_t> visits;
  for (std::size_t i = 0; i < rec.path.size(); ++i)
    if (rec.path[i] == v0) visits.push_back(i);
  std::vector<Excursion> out;
  double acc = 0.0;  // v0 local time through the holding at each departure
  for (std::size_t k = 0; k + 1 < visits.size(); ++k) {
    acc += rec.hold[visits[k]] / d0;
    out.push_back({visits[k], visits[k + 1], acc});
  }
  return out;
}

bool excursion_hits(const WalkRecord& rec, const Excursion& e, std::uint32_t v) {
  for (std::size_t i = e.begin + 1; i < e.end; ++i)
    if (rec.path[i] == v) return true;
  return false;
}

CrossingTrace crossing_trace(const WalkRecord& rec, const std::vector<std::uint32_t>& inner,
                             const std::vector<std::uint32_t>& outer) {
  if (inner.empty() || outer.empty())
    throw std::invalid_argument("invalid-regions: inner and outer must be nonempty");
  if (rec.path.empty())
    throw std::invalid_argument("invalid-parameters: record has no kept trajectory");
  const std::size_t nv = rec.graph->vertex_count();
  std::vector<char> mark(nv, 0);  // 1 = inner, 2 = outer
  for (std::uint32_t v : inner) mark[v] = 1;
  for (std::uint32_t v : outer) {
    if (mark[v] == 1) throw std::invalid_argument("invalid-regions: inner and outer overlap");
    mark[v] = 2;
  }
  CrossingTrace trace;
  bool crossing = false;
  for (std::uint32_t v : rec.path) {
    if (!crossing) {
      if (mark[v] == 1) crossing = true;
    } else if (mark[v] == 2) {
      trace.endpoints.push_back(v);
      crossing = false;
    }
  }
  trace.count = trace.endpoints.size();
  return trace;
}

ThinPointResult thin_point_event(const WalkRecord& rec, const std::vector<std::uint32_t>& region,
                                 long threshold) {
  for (std::uint32_t v : region) {
    if (static_cast<long>(rec.visit_count[v]) <= threshold) return {true, v};
  }
  return {false, std::nullopt};
}

std::vector<double> occurrence_times(const WalkRecord& rec, const std::vector<Excursion>& excursions) {
  std::vector<double> stamps;
  stamps.reserve(excursions.size());
  for (const Excursion& e : excursions) {
    if (e.begin >= rec.path.size() || e.end >= rec.path.size())
      throw std::out_of_range("not-found: excursion index outside trajectory");
    stamps.push_back(e.start_local_time);
  }
  return stamps;
}

}  // namespace covertime
