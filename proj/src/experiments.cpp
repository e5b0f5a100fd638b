#include "covertime/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "covertime/exactsolve.hpp"
#include "covertime/gff.hpp"
#include "covertime/isomorphism.hpp"
#include "covertime/rng.hpp"
#include "covertime/stats.hpp"
#include "covertime/walker.hpp"

namespace covertime {

namespace {

constexpr const char* kVersion = "covertime-lab 1.0.0";

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError("config-error: line " + std::to_string(line) + ": bad number '" + v + "'");
  }
}

long parse_long(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError("config-error: line " + std::to_string(line) + ": bad integer '" + v + "'");
  }
}

std::vector<int> parse_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("config-error: line " + std::to_string(line) + ": empty list item");
    out.push_back(static_cast<int>(parse_long(item, line)));
  }
  if (out.empty())
    throw ConfigError("config-error: line " + std::to_string(line) + ": empty list");
  return out;
}

const std::vector<std::string> kExperiments = {
    "cover-scaling", "tau-concentration", "gff-max",        "isomorphism",
    "thin-points",   "harmonic-tv",       "green-cross-check"};

}  // namespace

double t_lambda_schedule(int n, double lambda) {
  const double base = std::log(static_cast<double>(n)) + lambda;
  if (base <= 0.0)
    throw ConfigError("config-error: t_lambda schedule needs log n + lambda > 0");
  return base * base / M_PI;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, bool> seen;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  bool have_experiment = false;
  while (std::getline(ss, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config-error: line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config-error: line " + std::to_string(line) + ": empty key or value");
    if (seen[key])
      throw ConfigError("config-error: line " + std::to_string(line) + ": duplicate key '" + key + "'");
    seen[key] = true;

    if (key == "experiment") {
      cfg.experiment = value;
      have_experiment = true;
    } else if (key == "n") {
      cfg.sizes = parse_int_list(value, line);
    } else if (key == "boundary") {
      if (value != "wired" && value != "free" && value != "torus" && value != "disk")
        throw ConfigError("config-error: line " + std::to_string(line) + ": unknown boundary '" + value + "'");
      cfg.boundary = value;
    } else if (key == "kappa") {
      cfg.kappa = parse_double(value, line);
    } else if (key == "t") {
      cfg.t = parse_double(value, line);
    } else if (key == "lambda") {
      cfg.lambda = parse_double(value, line);
    } else if (key == "replicas") {
      cfg.replicas = static_cast<int>(parse_long(value, line));
      if (cfg.replicas < 1)
        throw ConfigError("config-error: line " + std::to_string(line) + ": replicas must be >= 1");
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_long(value, line));
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_long(value, line));
      if (cfg.workers < 1)
        throw ConfigError("config-error: line " + std::to_string(line) + ": workers must be >= 1");
    } else if (key == "graph") {
      cfg.graph_preset = value;
    } else if (key == "level") {
      cfg.level = parse_double(value, line);
    } else if (key == "m") {
      cfg.inner_radii = parse_int_list(value, line);
    } else if (key == "L") {
      cfg.box_side = static_cast<int>(parse_long(value, line));
    } else {
      throw ConfigError("config-error: line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  if (!have_experiment) throw ConfigError("config-error: missing required key 'experiment'");
  if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end())
    throw ConfigError("config-error: unknown experiment '" + cfg.experiment + "'");
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("io-error: cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

LatticeGraph build_preset_graph(const std::string& name) {
  if (name == "single-edge") return build_single_edge();
  if (name == "path-3-wired") return build_path_wired(3);
  if (name == "path-4-wired") return build_path_wired(4);
  if (name == "wired-5") return build_box(5, Boundary::wired);
  if (name == "wired-9") return build_box(9, Boundary::wired);
  if (name == "torus-6") {
    LatticeGraph g = build_torus(6);
    g.set_v0(g.vertex_at(0, 0));
    return g;
  }
  throw ConfigError("config-error: unknown graph preset '" + name + "'");
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::min(workers, count);
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

double pick_t(const ExperimentConfig& cfg, int n) {
  if (cfg.t) return *cfg.t;
  if (cfg.lambda) return t_lambda_schedule(n, *cfg.lambda);
  return t_lambda_schedule(n, 0.0);
}

LatticeGraph build_host(const ExperimentConfig& cfg, int n) {
  if (cfg.boundary == "wired") return build_box(n, Boundary::wired);
  if (cfg.boundary == "free") return build_box(n, Boundary::free);
  if (cfg.boundary == "disk") return build_disk_identified_box(n, cfg.kappa);
  LatticeGraph g = build_torus(n);
  g.set_v0(g.vertex_at(0, 0));
  return g;
}

struct Runner {
  const ExperimentConfig& cfg;
  std::vector<ResultRow> rows;
  std::vector<std::string> manifest_notes;

  void cover_scaling() {
    std::vector<std::pair<int, std::vector<double>>> fit_points;
    for (int n : cfg.sizes) {
      const LatticeGraph g = build_host(cfg, n);
      const std::uint32_t start = g.v0() ? *g.v0() : g.vertex_at(0, 0);
      std::vector<ResultRow> batch(cfg.replicas);
      parallel_for(cfg.replicas, cfg.workers, [&](int r) {
        const std::uint64_t rs = derive_seed(cfg.seed, (static_cast<std::uint64_t>(n) << 32) + r);
        const WalkRecord rec = run_until_cover(g, start, rs);
        ResultRow row{cfg.experiment, n, r, rs, {}};
        const double tau = rec.tau_cov.value_or(-1.0);
        row.measures = {
            {"tau_cov", tau},
            {"tau_cov_return", rec.tau_cov_return.value_or(-1.0)},
            {"sqrt_norm", tau >= 0 ? std::sqrt(tau / (2.0 * n * static_cast<double>(n))) : -1.0},
        };
        batch[r] = std::move(row);
      });
      std::vector<double> taus;
      for (auto& row : batch) {
        taus.push_back(row.measures[0].second);
        rows.push_back(std::move(row));
      }
      fit_points.emplace_back(n, std::move(taus));
    }
    if (fit_points.size() >= 3) {
      const ScalingFit fit = fit_cover_scaling(fit_points);
      manifest_notes.push_back("fit_slope = " + format_double(fit.slope));
      manifest_notes.push_back("fit_intercept = " + format_double(fit.intercept));
    }
  }

  void tau_concentration() {
    for (int n : cfg.sizes) {
      const LatticeGraph g = build_host(cfg, n);
      const std::uint32_t v0 = g.require_v0();
      const double t = pick_t(cfg, n);
      const double edges = static_cast<double>(g.edge_count());
      std::vector<ResultRow> batch(cfg.replicas);
      parallel_for(cfg.replicas, cfg.workers, [&](int r) {
        const std::uint64_t rs = derive_seed(cfg.seed, (static_cast<std::uint64_t>(n) << 32) + r);
        const WalkRecord rec = run_until_inverse_local(g, v0, t, rs);
        ResultRow row{cfg.experiment, n, r, rs, {}};
        row.measures = {{"tau_t", rec.elapsed}, {"ratio", rec.elapsed / (2.0 * t * edges)}};
        batch[r] = std::move(row);
      });
      std::vector<double> taus;
      for (auto& row : batch) {
        taus.push_back(row.measures[0].second);
        rows.push_back(std::move(row));
      }
      const SampleSummary s = summarize(taus);
      manifest_notes.push_back("n=" + std::to_string(n) +
                               " mean_ratio = " + format_double(s.mean / (2.0 * t * edges)));
      manifest_notes.push_back("n=" + std::to_string(n) + " sd_ratio = " +
                               format_double(std::sqrt(s.variance) / (edges * std::sqrt(t))));
    }
  }

  void gff_max() {
    for (int n : cfg.sizes) {
      const LatticeGraph g = build_box(n, Boundary::wired);
      const GffSampler sampler(g, {g.require_v0()});
      std::vector<ResultRow> batch(cfg.replicas);
      parallel_for(cfg.replicas, cfg.workers, [&](int r) {
        const std::uint64_t rs = derive_seed(cfg.seed, (static_cast<std::uint64_t>(n) << 32) + r);
        Rng rng(rs);
        const std::vector<double> field = sampler.sample(rng);
        double mx = 0.0;
        for (std::uint32_t v : sampler.interior()) mx = std::max(mx, field[v]);
        batch[r] = ResultRow{cfg.experiment, n, r, rs, {{"m_max", mx}}};
      });
      std::vector<double> maxima;
      for (auto& row : batch) {
        maxima.push_back(row.measures[0].second);
        rows.push_back(std::move(row));
      }
      const SampleSummary s = summarize(maxima);
      std::string note = "n=" + std::to_string(n) + " mean = " + format_double(s.mean) +
                         " median = " + format_double(s.median);
      if (n >= 16) note += " bz_prediction = " + format_double(bz_prediction(n));
      manifest_notes.push_back(note);
    }
  }

  void isomorphism() {
    const LatticeGraph g = build_preset_graph(cfg.graph_preset);
    const double t = cfg.t.value_or(1.0);
    const IsomorphismReport report =
        verify_identity(g, g.require_v0(), t, cfg.replicas, cfg.seed);
    for (const PerVertexStats& ps : report.per_vertex) {
      ResultRow row{cfg.experiment, static_cast<int>(g.vertex_count()),
                    static_cast<long>(ps.vertex), cfg.seed, {}};
      row.measures = {{"ks", ps.ks_statistic},
                      {"lhs_mean", ps.lhs_mean},
                      {"rhs_mean", ps.rhs_mean},
                      {"se_mean", ps.se_mean}};
      rows.push_back(std::move(row));
    }
    manifest_notes.push_back(std::string("pass = ") + (report.pass ? "true" : "false"));
    if (report.low_power) manifest_notes.push_back("low-power: reps < 10000");
  }

  void thin_points() {
    for (int n : cfg.sizes) {
      const LatticeGraph g = build_box(n, Boundary::wired);
      const std::uint32_t v0 = g.require_v0();
      int L = cfg.box_side.value_or(16);
      PackingOverrides ov;
      ov.anchors = std::vector<Point>{{(n - L) / 2, (n - L) / 2}};
      ov.sub_side = L;
      const Packing pk = build_packing(g, PackingStyle::boxes, cfg.kappa, ov);
      const std::vector<std::uint32_t>& region = pk.regions.front();
      const double t = cfg.t.value_or(0.5 * bz_prediction(L) * bz_prediction(L));
      std::vector<ResultRow> batch(cfg.replicas);
      parallel_for(cfg.replicas, cfg.workers, [&](int r) {
        const std::uint64_t rs = derive_seed(cfg.seed, (static_cast<std::uint64_t>(n) << 32) + r);
        const WalkRecord rec = run_until_inverse_local(g, v0, t, rs);
        const ThinPointResult res = thin_point_event(rec, region);
        std::uint64_t min_visits = ~0ull;
        for (std::uint32_t v : region) min_visits = std::min(min_visits, rec.visit_count[v]);
        batch[r] = ResultRow{cfg.experiment, n, r, rs,
                             {{"occurred", res.occurred ? 1.0 : 0.0},
                              {"min_visits", static_cast<double>(min_visits)}}};
      });
      double hits = 0;
      for (auto& row : batch) {
        hits += row.measures[0].second;
        rows.push_back(std::move(row));
      }
      manifest_notes.push_back("n=" + std::to_string(n) + " L=" + std::to_string(L) +
                               " t = " + format_double(t) + " p_thin = " +
                               format_double(hits / cfg.replicas));
    }
  }

  void harmonic_tv() {
    for (int n : cfg.sizes) {
      const int S = 3 * n + ((3 * n) % 2 == 0 ? 1 : 0);  // odd host side
      const LatticeGraph g = build_box(S, Boundary::free);
      const Point c{S / 2, S / 2};
      for (std::size_t mi = 0; mi < cfg.inner_radii.size(); ++mi) {
        const int m = cfg.inner_radii[mi];
        const auto target = sites_in_disk(g, c, m);
        const std::uint32_t sx = g.vertex_at(c.x + n, c.y);
        const std::uint32_t sy = g.vertex_at(c.x, c.y + n);
        const HarmonicMeasure h1 = harmonic_measure(g, sx, target);
        const HarmonicMeasure h2 = harmonic_measure(g, sy, target);
        const double tv = harmonic_tv_distance(h1, h2);
        const double ln = std::log(static_cast<double>(n));
        ResultRow row{cfg.experiment, n, m, cfg.seed, {}};
        row.measures = {{"tv", tv}, {"c_ratio", tv * n / (m * ln * ln)}};
        rows.push_back(std::move(row));
      }
    }
  }

  void green_cross_check() {
    for (int n : cfg.sizes) {
      const LatticeGraph g = build_box(n, Boundary::wired);
      const GreenSolution sol(g, {g.require_v0()});
      const BoxKernelGreen bkg(n);
      const Point c{n / 2, n / 2};
      long pair_index = 0;
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx) {
          const Point y{c.x + dx, c.y + dy};
          const double gs = sol.green(g.vertex_at(c.x, c.y), g.vertex_at(y.x, y.y));
          const double gk = bkg.green(c, y);
          ResultRow row{cfg.experiment, n, pair_index++, cfg.seed, {}};
          row.measures = {{"x_x", static_cast<double>(c.x)}, {"x_y", static_cast<double>(c.y)},
                          {"y_x", static_cast<double>(y.x)}, {"y_y", static_cast<double>(y.y)},
                          {"G_solve", gs},                   {"G_kernel", gk},
                          {"abs_diff", std::abs(gs - gk)}};
          rows.push_back(std::move(row));
        }
    }
  }
};

std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "experiment = " << cfg.experiment << '\n';
  if (!cfg.sizes.empty()) {
    os << "n = ";
    for (std::size_t i = 0; i < cfg.sizes.size(); ++i)
      os << (i ? "," : "") << cfg.sizes[i];
    os << '\n';
  }
  os << "boundary = " << cfg.boundary << '\n';
  os << "kappa = " << format_double(cfg.kappa) << '\n';
  if (cfg.t) os << "t = " << format_double(*cfg.t) << '\n';
  if (cfg.lambda) os << "lambda = " << format_double(*cfg.lambda) << '\n';
  os << "replicas = " << cfg.replicas << '\n';
  os << "seed = " << cfg.seed << '\n';
  os << "workers = " << cfg.workers << '\n';
  os << "graph = " << cfg.graph_preset << '\n';
  os << "out = " << cfg.out << '\n';
  return os.str();
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (std::find(kExperiments.begin(), kExperiments.end(), config.experiment) == kExperiments.end())
    throw ConfigError("config-error: unknown experiment '" + config.experiment + "'");
  if (config.lambda) {
    for (int n : config.sizes) t_lambda_schedule(n, *config.lambda);  // validate schedule
  }

  Runner runner{config, {}, {}};
  if (config.experiment == "cover-scaling") runner.cover_scaling();
  else if (config.experiment == "tau-concentration") runner.tau_concentration();
  else if (config.experiment == "gff-max") runner.gff_max();
  else if (config.experiment == "isomorphism") runner.isomorphism();
  else if (config.experiment == "thin-points") runner.thin_points();
  else if (config.experiment == "harmonic-tv") runner.harmonic_tv();
  else runner.green_cross_check();

  std::sort(runner.rows.begin(), runner.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.n, a.replica) < std::tie(b.n, b.replica);
  });

  std::ofstream csv(config.out, std::ios::binary);
  if (!csv)
    throw std::runtime_error("io-error: cannot open output file " + config.out +
                             " (no rows written)");
  csv << "experiment,n,replica,seed";
  if (!runner.rows.empty())
    for (const auto& [key, _] : runner.rows.front().measures) csv << ',' << key;
  csv << '\n';
  for (const ResultRow& row : runner.rows) {
    csv << row.experiment << ',' << row.n << ',' << row.replica << ',' << row.seed;
    for (const auto& [_, value] : row.measures) csv << ',' << format_double(value);
    csv << '\n';
  }
  csv.close();

  const auto t1 = std::chrono::steady_clock::now();
  std::ostringstream manifest;
  manifest << kVersion << "\n\n[config]\n" << config_echo(config);
  manifest << "\n[summary]\n";
  manifest << "rows = " << runner.rows.size() << '\n';
  for (const std::string& note : runner.manifest_notes) manifest << note << '\n';
  manifest << "wall_seconds = "
           << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() / 1000.0
           << '\n';

  RunResult result;
  result.rows = std::move(runner.rows);
  result.manifest = manifest.str();
  result.csv_path = config.out;
  result.manifest_path = config.out + ".manifest.txt";
  std::ofstream mf(result.manifest_path, std::ios::binary);
  if (!mf) throw std::runtime_error("io-error: cannot open manifest file " + result.manifest_path);
  mf << result.manifest;
  return result;
}

}  // namespace covertime
