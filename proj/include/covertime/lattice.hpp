#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace covertime {

enum class GraphKind { wired_box, free_box, torus, disk_identified_box, custom };
enum class Boundary { wired, free };

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

inline double norm(Point p) {
  return std::sqrt(static_cast<double>(p.x) * p.x + static_cast<double>(p.y) * p.y);
}
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }

// Finite multigraph on lattice sites plus optional super-vertices. Parallel
// edges are represented by repeated adjacency entries; degree(v) counts them.
class LatticeGraph {
 public:
  GraphKind kind = GraphKind::custom;
  int side = 0;  // n for the box/torus builders, radius bound for disks

  std::size_t vertex_count() const { return adj_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::uint32_t degree(std::uint32_t v) const { return static_cast<std::uint32_t>(adj_[v].size()); }
  const std::vector<std::uint32_t>& neighbors(std::uint32_t v) const;

  bool is_super(std::uint32_t v) const { return is_super_[v] != 0; }
  Point coord(std::uint32_t v) const { return coords_[v]; }
  std::optional<std::uint32_t> find_vertex(int x, int y) const;
  std::uint32_t vertex_at(int x, int y) const;  // throws when absent
  std::optional<std::uint32_t> v0() const { return v0_; }
  std::uint32_t require_v0() const;

  std::string label(std::uint32_t v) const;
  bool connected() const;
  void dump_edges(std::ostream& os) const;

  // construction helpers used by the builders
  std::uint32_t add_site(int x, int y);
  std::uint32_t add_super(const std::string& name);
  void add_edge(std::uint32_t u, std::uint32_t v);
  void set_v0(std::uint32_t v) { v0_ = v; }
  void finalize();  // sorts adjacency, fixes edge_count

 private:
  std::vector<Point> coords_;
  std::vector<char> is_super_;
  std::vector<std::string> super_names_;
  std::vector<std::vector<std::uint32_t>> adj_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::optional<std::uint32_t> v0_;
  std::size_t edge_count_ = 0;
};

LatticeGraph build_box(int n, Boundary boundary);
LatticeGraph build_torus(int n);
// Identified disk of radius n/(log n)^(2*kappa) at the box center, free outer
// boundary. Throws invalid-parameters when the radius is below 1.
LatticeGraph build_disk_identified_box(int n, double kappa);
// Same construction with an explicit radius; radius < 1 identifies the single
// center site (a relabeling that leaves |E| unchanged).
LatticeGraph build_disk_identified_box_radius(int n, double radius);
// Free lattice disk {|p| <= radius} centered at the origin.
LatticeGraph build_disk(int radius);
// Two vertices joined by one edge; vertex 0 is v0.
LatticeGraph build_single_edge();
// Path of `len` vertices with both endpoints identified into v0.
LatticeGraph build_path_wired(int len);

enum class PackingStyle { boxes, balls };

struct PackingParams {
  double sub_side = 0.0;  // L (boxes) or ball radius, before truncation
  int m = 0;
  double spacing = 0.0;       // anchor gap (boxes) / center distance floor (balls)
  double circle_radius = 0.0; // balls only: n_{kappa/2}
  std::vector<Point> anchors;
};

// Asymptotic parameter formulas evaluated as-is. No feasibility check; the
// caller (or build_packing) decides whether the resulting (m, L) is usable.
PackingParams compute_box_packing(int n, double kappa);
PackingParams compute_ball_packing(int n, double kappa);

// Desk-scale escape hatch: the printed formulas only become jointly feasible
// (m >= 1 and region size >= 2) for n beyond ~1e8, so experiments may pin
// individual parameters while keeping the construction's geometry.
struct PackingOverrides {
  std::optional<int> m;
  std::optional<int> sub_side;        // L or integer ball radius
  std::optional<double> spacing;
  std::optional<double> circle_radius;
  std::optional<std::vector<Point>> anchors;
};

struct Packing {
  PackingStyle style = PackingStyle::boxes;
  double kappa = 0.0;
  double sub_side = 0.0;
  int m = 0;
  std::vector<Point> anchors;
  std::vector<std::vector<std::uint32_t>> regions;
};

Packing build_packing(const LatticeGraph& g, PackingStyle style, double kappa,
                      const PackingOverrides& overrides = {});

// Sites of g within Euclidean distance r of center, and the subset of those
// with a grid neighbor outside the disk.
std::vector<std::uint32_t> sites_in_disk(const LatticeGraph& g, Point center, double r);
std::vector<std::uint32_t> disk_boundary_sites(const LatticeGraph& g, Point center, double r);

}  // namespace covertime
