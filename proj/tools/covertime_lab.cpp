#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
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

namespace {

using covertime::Boundary;
using covertime::LatticeGraph;
using covertime::format_double;

struct GraphArgs {
  std::string preset;
  int n = 0;
  std::string boundary = "wired";
};

void add_graph_options(CLI::App* cmd, GraphArgs& args) {
  cmd->add_option("--graph", args.preset,
                  "preset: single-edge, path-3-wired, path-4-wired, wired-5, wired-9, torus-6");
  cmd->add_option("-n,--side", args.n, "box/torus side length (overrides --graph)");
  cmd->add_option("--boundary", args.boundary, "wired | free | torus (with -n)")
      ->check(CLI::IsMember({"wired", "free", "torus"}));
}

LatticeGraph resolve_graph(const GraphArgs& args) {
  if (args.n > 0) {
    if (args.boundary == "torus") {
      LatticeGraph g = covertime::build_torus(args.n);
      g.set_v0(g.vertex_at(0, 0));
      return g;
    }
    return covertime::build_box(args.n,
                                args.boundary == "free" ? Boundary::free : Boundary::wired);
  }
  if (args.preset.empty()) throw CLI::ValidationError("pass --graph or -n");
  return covertime::build_preset_graph(args.preset);
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw CLI::ValidationError("cannot open output file " + path);
  return file;
}

int cmd_simulate_cover(const GraphArgs& gargs, int replicas, std::uint64_t seed,
                       const std::string& out) {
  const LatticeGraph g = resolve_graph(gargs);
  const std::uint32_t start = g.v0() ? *g.v0() : 0;
  std::ofstream file;
  std::ostream& os = open_out(file, out);
  os << "replica,seed,tau_cov,tau_cov_return,elapsed\n";
  for (int r = 0; r < replicas; ++r) {
    const std::uint64_t rs = covertime::derive_seed(seed, r);
    const covertime::WalkRecord rec = covertime::run_until_cover(g, start, rs);
    os << r << ',' << rs << ',' << format_double(rec.tau_cov.value_or(-1.0)) << ','
       << format_double(rec.tau_cov_return.value_or(-1.0)) << ','
       << format_double(rec.elapsed) << '\n';
  }
  return 0;
}

int cmd_simulate_inverse_local(const GraphArgs& gargs, double t, int replicas,
                               std::uint64_t seed, const std::string& out) {
  const LatticeGraph g = resolve_graph(gargs);
  const std::uint32_t v0 = g.require_v0();
  std::ofstream file;
  std::ostream& os = open_out(file, out);
  os << "replica,seed,tau_t,local_time_v0\n";
  for (int r = 0; r < replicas; ++r) {
    const std::uint64_t rs = covertime::derive_seed(seed, r);
    const covertime::WalkRecord rec = covertime::run_until_inverse_local(g, v0, t, rs);
    os << r << ',' << rs << ',' << format_double(rec.elapsed) << ','
       << format_double(rec.local_time[v0]) << '\n';
  }
  return 0;
}

int cmd_sample_gff(int n, int replicas, std::uint64_t seed, const std::string& out,
                   const std::string& dump) {
  const LatticeGraph g = covertime::build_box(n, Boundary::wired);
  const covertime::GffSampler sampler(g, {g.require_v0()});
  std::ofstream file;
  std::ostream& os = open_out(file, out);
  std::ofstream bin;
  if (!dump.empty()) {
    bin.open(dump, std::ios::binary);
    if (!bin) throw CLI::ValidationError("cannot open dump file " + dump);
    const std::uint64_t side = static_cast<std::uint64_t>(n);
    bin.write(reinterpret_cast<const char*>(&side), sizeof side);
  }
  os << "replica,seed,m_max\n";
  for (int r = 0; r < replicas; ++r) {
    const std::uint64_t rs = covertime::derive_seed(seed, r);
    covertime::Rng rng(rs);
    const std::vector<double> field = sampler.sample(rng);
    double mx = 0.0;
    for (std::uint32_t v : sampler.interior()) mx = std::max(mx, field[v]);
    os << r << ',' << rs << ',' << format_double(mx) << '\n';
    if (bin.is_open()) {
      // full n x n grid row-major; identified boundary sites read back as 0
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
          const auto v = g.find_vertex(x, y);
          const double value = v ? field[*v] : 0.0;
          bin.write(reinterpret_cast<const char*>(&value), sizeof value);
        }
    }
  }
  return 0;
}

int cmd_verify_isomorphism(const GraphArgs& gargs, double t, int replicas, std::uint64_t seed,
                           const std::string& out) {
  const LatticeGraph g = resolve_graph(gargs);
  const covertime::IsomorphismReport report =
      covertime::verify_identity(g, g.require_v0(), t, replicas, seed);
  std::ofstream file;
  std::ostream& os = open_out(file, out);
  for (const covertime::PerVertexStats& ps : report.per_vertex) {
    nlohmann::json row = {
        {"vertex", ps.vertex},          {"label", g.label(ps.vertex)},
        {"ks", ps.ks_statistic},        {"lhs_mean", ps.lhs_mean},
        {"rhs_mean", ps.rhs_mean},      {"lhs_var", ps.lhs_var},
        {"rhs_var", ps.rhs_var},        {"se_mean", ps.se_mean},
    };
    os << row.dump() << '\n';
  }
  nlohmann::json summary = {{"summary", true},
                            {"t", report.t},
                            {"replicas", report.reps},
                            {"ks_max", report.ks_max},
                            {"pass", report.pass},
                            {"low_power", report.low_power}};
  os << summary.dump() << '\n';
  return report.pass ? 0 : 1;
}

int cmd_green_table(int n, int window, const std::string& out) {
  const LatticeGraph g = covertime::build_box(n, Boundary::wired);
  const covertime::GreenSolution sol(g, {g.require_v0()});
  const covertime::BoxKernelGreen bkg(n);
  const covertime::Point c{n / 2, n / 2};
  std::ofstream file;
  std::ostream& os = open_out(file, out);
  os << "x_x,x_y,y_x,y_y,G_solve,G_kernel,abs_diff\n";
  for (int dy = -window; dy <= window; ++dy)
    for (int dx = -window; dx <= window; ++dx) {
      const covertime::Point y{c.x + dx, c.y + dy};
      const double gs = sol.green(g.vertex_at(c.x, c.y), g.vertex_at(y.x, y.y));
      const double gk = bkg.green(c, y);
      os << c.x << ',' << c.y << ',' << y.x << ',' << y.y << ',' << format_double(gs) << ','
         << format_double(gk) << ',' << format_double(std::abs(gs - gk)) << '\n';
    }
  return 0;
}

int cmd_experiment(const std::string& config_path) {
  const covertime::ExperimentConfig cfg = covertime::load_config_file(config_path);
  const covertime::RunResult result = covertime::run(cfg);
  std::cout << "wrote " << result.rows.size() << " rows to " << result.csv_path << '\n';
  std::cout << "manifest: " << result.manifest_path << '\n';
  return 0;
}

int cmd_dump_graph(const GraphArgs& gargs) {
  const LatticeGraph g = resolve_graph(gargs);
  g.dump_edges(std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation lab for lattice cover times and Gaussian free fields"};
  app.require_subcommand(1);

  GraphArgs cover_g, inv_g, iso_g, dump_g;
  int replicas = 100;
  std::uint64_t seed = 0;
  double t = 1.0;
  std::string out;

  auto* cover = app.add_subcommand("simulate-cover", "walk until every vertex is visited");
  add_graph_options(cover, cover_g);
  cover->add_option("-r,--replicas", replicas);
  cover->add_option("-s,--seed", seed);
  cover->add_option("-o,--out", out, "CSV path (default stdout)");

  auto* inv = app.add_subcommand("simulate-inverse-local",
                                 "walk until the local time at v0 reaches t");
  add_graph_options(inv, inv_g);
  inv->add_option("-t,--time", t, "target local time at v0")->required();
  inv->add_option("-r,--replicas", replicas);
  inv->add_option("-s,--seed", seed);
  inv->add_option("-o,--out", out, "CSV path (default stdout)");

  int gff_n = 9;
  std::string dump_path;
  auto* gff = app.add_subcommand("sample-gff", "draw fields on the wired n x n box");
  gff->add_option("-n,--side", gff_n, "box side length")->required();
  gff->add_option("-r,--replicas", replicas);
  gff->add_option("-s,--seed", seed);
  gff->add_option("-o,--out", out, "CSV of per-replica maxima (default stdout)");
  gff->add_option("--dump", dump_path,
                  "binary dump: u64 side header then row-major doubles per replica");

  auto* iso = app.add_subcommand("verify-isomorphism",
                                 "compare local-time and squared-field laws vertex by vertex");
  add_graph_options(iso, iso_g);
  iso->add_option("-t,--time", t, "inverse-local-time level")->required();
  iso->add_option("-r,--replicas", replicas);
  iso->add_option("-s,--seed", seed);
  iso->add_option("-o,--out", out, "JSON-lines path (default stdout)");

  int green_n = 21, window = 2;
  auto* green = app.add_subcommand("green-table",
                                   "cross-check the two Green function routes near the center");
  green->add_option("-n,--side", green_n, "wired box side length")->required();
  green->add_option("-w,--window", window, "half-width of the center window");
  green->add_option("-o,--out", out, "CSV path (default stdout)");

  std::string config_path;
  auto* exp = app.add_subcommand("experiment", "run a configured experiment to CSV + manifest");
  exp->add_option("-c,--config", config_path, "key = value config file")->required();

  auto* dump = app.add_subcommand("dump-graph", "print the edge list");
  add_graph_options(dump, dump_g);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cover->parsed()) return cmd_simulate_cover(cover_g, replicas, seed, out);
    if (inv->parsed()) return cmd_simulate_inverse_local(inv_g, t, replicas, seed, out);
    if (gff->parsed()) return cmd_sample_gff(gff_n, replicas, seed, out, dump_path);
    if (iso->parsed()) return cmd_verify_isomorphism(iso_g, t, replicas, seed, out);
    if (green->parsed()) return cmd_green_table(green_n, window, out);
    if (exp->parsed()) return cmd_experiment(config_path);
    if (dump->parsed()) return cmd_dump_graph(dump_g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
