#include "covertime/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <set>
#include <stdexcept>

namespace covertime {

namespace {

std::uint64_t pack(int x, int y) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
         static_cast<std::uint32_t>(y);
}

constexpr int kGrid4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

}  // namespace

const std::vector<std::uint32_t>& LatticeGraph::neighbors(std::uint32_t v) const {
  if (v >= adj_.size()) throw std::out_of_range("not-found: unknown vertex");
  return adj_[v];
}

std::optional<std::uint32_t> LatticeGraph::find_vertex(int x, int y) const {
  auto it = index_.find(pack(x, y));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t LatticeGraph::vertex_at(int x, int y) const {
  auto v = find_vertex(x, y);
  if (!v) throw std::out_of_range("not-found: no vertex at requested site");
  return *v;
}

std::uint32_t LatticeGraph::require_v0() const {
  if (!v0_) throw std::logic_error("graph has no designated v0");
  return *v0_;
}

std::string LatticeGraph::label(std::uint32_t v) const {
  if (is_super_[v]) return super_names_[v];
  return std::to_string(coords_[v].x) + "," + std::to_string(coords_[v].y);
}

bool LatticeGraph::connected() const {
  if (adj_.empty()) return true;
  std::vector<char> seen(adj_.size(), 0);
  std::queue<std::uint32_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t visited = 1;
  while (!q.empty()) {
    const std::uint32_t u = q.front();
    q.pop();
    for (std::uint32_t w : adj_[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++visited;
        q.push(w);
      }
    }
  }
  return visited == adj_.size();
}

void LatticeGraph::dump_edges(std::ostream& os) const {
  for (std::uint32_t u = 0; u < adj_.size(); ++u) {
    for (std::uint32_t w : adj_[u]) {
      if (w >= u) os << label(u) << ' ' << label(w) << '\n';
    }
  }
}

std::uint32_t LatticeGraph::add_site(int x, int y) {
  const auto id = static_cast<std::uint32_t>(adj_.size());
  coords_.push_back({x, y});
  is_super_.push_back(0);
  super_names_.emplace_back();
  adj_.emplace_back();
  index_.emplace(pack(x, y), id);
  return id;
}

std::uint32_t LatticeGraph::add_super(const std::string& name) {
  const auto id = static_cast<std::uint32_t>(adj_.size());
  coords_.push_back({0, 0});
  is_super_.push_back(1);
  super_names_.push_back(name);
  adj_.emplace_back();
  return id;
}

void LatticeGraph::add_edge(std::uint32_t u, std::uint32_t v) {
  adj_[u].push_back(v);
  adj_[v].push_back(u);
  ++edge_count_;
}

void LatticeGraph::finalize() {
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
}

LatticeGraph build_box(int n, Boundary boundary) {
  if (n < 3) throw std::invalid_argument("invalid-size: box side must be >= 3");
  LatticeGraph g;
  g.side = n;
  if (boundary == Boundary::free) {
    g.kind = GraphKind::free_box;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) g.add_site(x, y);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        if (x + 1 < n) g.add_edge(g.vertex_at(x, y), g.vertex_at(x + 1, y));
        if (y + 1 < n) g.add_edge(g.vertex_at(x, y), g.vertex_at(x, y + 1));
      }
    g.finalize();
    return g;
  }
  // wired: interior sites keep coordinates, the whole boundary ring becomes
  // v0; boundary-boundary edges would be self-loops and are dropped
  g.kind = GraphKind::wired_box;
  for (int y = 1; y + 1 < n; ++y)
    for (int x = 1; x + 1 < n; ++x) g.add_site(x, y);
  const std::uint32_t v0 = g.add_super("v0");
  g.set_v0(v0);
  auto endpoint = [&](int x, int y) -> std::uint32_t {
    const bool bdry = (x == 0 || y == 0 || x == n - 1 || y == n - 1);
    return bdry ? v0 : g.vertex_at(x, y);
  };
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (x + 1 < n) {
        const auto a = endpoint(x, y), b = endpoint(x + 1, y);
        if (a != b) g.add_edge(a, b);
      }
      if (y + 1 < n) {
        const auto a = endpoint(x, y), b = endpoint(x, y + 1);
        if (a != b) g.add_edge(a, b);
      }
    }
  g.finalize();
  return g;
}

LatticeGraph build_torus(int n) {
  if (n < 2) throw std::invalid_argument("invalid-size: torus side must be >= 2");
  LatticeGraph g;
  g.kind = GraphKind::torus;
  g.side = n;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) g.add_site(x, y);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      g.add_edge(g.vertex_at(x, y), g.vertex_at((x + 1) % n, y));
      g.add_edge(g.vertex_at(x, y), g.vertex_at(x, (y + 1) % n));
    }
  g.finalize();
  return g;
}

LatticeGraph build_disk_identified_box_radius(int n, double radius) {
  if (n < 3) throw std::invalid_argument("invalid-size: box side must be >= 3");
  if (radius < 0) throw std::invalid_argument("invalid-parameters: negative disk radius");
  LatticeGraph g;
  g.kind = GraphKind::disk_identified_box;
  g.side = n;
  const Point center{(n - 1) / 2, (n - 1) / 2};
  auto in_disk = [&](int x, int y) {
    const double dx = x - center.x, dy = y - center.y;
    return std::sqrt(dx * dx + dy * dy) <= radius;
  };
  // radius < 1 means the disk is the single center site: a pure relabeling
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (!in_disk(x, y)) g.add_site(x, y);
  const std::uint32_t v0 = g.add_super("v0");
  g.set_v0(v0);
  auto endpoint = [&](int x, int y) -> std::uint32_t {
    return in_disk(x, y) ? v0 : g.vertex_at(x, y);
  };
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (x + 1 < n) {
        const auto a = endpoint(x, y), b = endpoint(x + 1, y);
        if (a != b) g.add_edge(a, b);
      }
      if (y + 1 < n) {
        const auto a = endpoint(x, y), b = endpoint(x, y + 1);
        if (a != b) g.add_edge(a, b);
      }
    }
  g.finalize();
  return g;
}

LatticeGraph build_disk_identified_box(int n, double kappa) {
  if (n < 3) throw std::invalid_argument("invalid-size: box side must be >= 3");
  const double radius = n / std::pow(std::log(static_cast<double>(n)), 2.0 * kappa);
  if (radius < 1.0)
    throw std::invalid_argument(
        "invalid-parameters: identified disk radius " + std::to_string(radius) +
        " < 1; reduce kappa or raise n");
  return build_disk_identified_box_radius(n, radius);
}

LatticeGraph build_disk(int radius) {
  if (radius < 1) throw std::invalid_argument("invalid-size: disk radius must be >= 1");
  LatticeGraph g;
  g.kind = GraphKind::custom;
  g.side = radius;
  const double r2 = static_cast<double>(radius) * radius;
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x)
      if (static_cast<double>(x) * x + static_cast<double>(y) * y <= r2) g.add_site(x, y);
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x) {
      const auto a = g.find_vertex(x, y);
      if (!a) continue;
      const auto right = g.find_vertex(x + 1, y);
      if (right) g.add_edge(*a, *right);
      const auto up = g.find_vertex(x, y + 1);
      if (up) g.add_edge(*a, *up);
    }
  g.finalize();
  return g;
}

LatticeGraph build_single_edge() {
  LatticeGraph g;
  g.kind = GraphKind::custom;
  const std::uint32_t v0 = g.add_super("v0");
  g.set_v0(v0);
  const std::uint32_t x = g.add_site(1, 0);
  g.add_edge(v0, x);
  g.finalize();
  return g;
}

LatticeGraph build_path_wired(int len) {
  if (len < 3) throw std::invalid_argument("invalid-size: wired path needs >= 3 vertices");
  LatticeGraph g;
  g.kind = GraphKind::custom;
  const std::uint32_t v0 = g.add_super("v0");
  g.set_v0(v0);
  std::uint32_t prev = v0;
  for (int i = 1; i + 1 < len; ++i) {
    const std::uint32_t v = g.add_site(i, 0);
    g.add_edge(prev, v);
    prev = v;
  }
  g.add_edge(prev, v0);
  g.finalize();
  return g;
}

PackingParams compute_box_packing(int n, double kappa) {
  PackingParams p;
  const double ln = std::log(static_cast<double>(n));
  p.sub_side = n / std::pow(ln, 2.0 * kappa);
  p.m = static_cast<int>(std::floor(std::pow(ln, kappa / 3.0) / 12.0)) - 1;
  p.spacing = 3.0 * n / std::pow(ln, kappa);
  const int y0 = static_cast<int>(std::floor(n / std::pow(ln, 2.0 * kappa)));
  for (int i = 1; i <= std::max(p.m, 0); ++i)
    p.anchors.push_back({static_cast<int>(std::floor(i * p.spacing)), y0});
  return p;
}

PackingParams compute_ball_packing(int n, double kappa) {
  PackingParams p;
  const double ln = std::log(static_cast<double>(n));
  p.sub_side = n / std::pow(ln, 5.0 * kappa);          // ball radius n_{5k}
  p.m = static_cast<int>(std::floor(std::pow(ln, kappa / 2.0) / 2.0));
  p.spacing = n / std::pow(ln, kappa);                 // n_k
  p.circle_radius = n / std::pow(ln, kappa / 2.0);     // n_{k/2}
  return p;
}

namespace {

// anchors for ball centers: deterministic equal-arc placement on the circle
std::vector<Point> equal_arc_centers(Point center, double circle_radius, int m) {
  std::vector<Point> out;
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * M_PI * i / m;
    out.push_back({center.x + static_cast<int>(std::lround(circle_radius * std::cos(theta))),
                   center.y + static_cast<int>(std::lround(circle_radius * std::sin(theta)))});
  }
  return out;
}

}  // namespace

Packing build_packing(const LatticeGraph& g, PackingStyle style, double kappa,
                      const PackingOverrides& overrides) {
  if (g.kind != GraphKind::wired_box && g.kind != GraphKind::disk_identified_box)
    throw std::invalid_argument("invalid-parameters: packing host must be wired-box or disk-identified-box");
  const int n = g.side;
  Packing pk;
  pk.style = style;
  pk.kappa = kappa;

  if (style == PackingStyle::boxes) {
    PackingParams params = compute_box_packing(n, kappa);
    int L = overrides.sub_side.value_or(static_cast<int>(std::floor(params.sub_side)));
    int m = overrides.m.value_or(params.m);
    std::vector<Point> anchors;
    if (overrides.anchors) {
      anchors = *overrides.anchors;
      m = static_cast<int>(anchors.size());
    } else {
      const double spacing = overrides.spacing.value_or(params.spacing);
      const int y0 = static_cast<int>(std::floor(params.sub_side));
      for (int i = 1; i <= std::max(m, 0); ++i)
        anchors.push_back({static_cast<int>(std::floor(i * spacing)), y0});
    }
    if (m < 1 || L < 2)
      throw std::invalid_argument("invalid-parameters: box packing m=" + std::to_string(m) +
                                  " L=" + std::to_string(L));
    pk.sub_side = L;
    pk.m = m;
    pk.anchors = anchors;
    std::set<std::uint32_t> used;
    for (const Point& a : anchors) {
      std::vector<std::uint32_t> region;
      for (int dy = 0; dy < L; ++dy)
        for (int dx = 0; dx < L; ++dx) {
          const auto v = g.find_vertex(a.x + dx, a.y + dy);
          if (!v || g.is_super(*v))
            throw std::invalid_argument("invalid-parameters: packing box leaves the host interior");
          if (!used.insert(*v).second)
            throw std::invalid_argument("invalid-parameters: packing boxes overlap");
          region.push_back(*v);
        }
      pk.regions.push_back(std::move(region));
    }
    return pk;
  }

  // balls
  PackingParams params = compute_ball_packing(n, kappa);
  const int radius = overrides.sub_side.value_or(static_cast<int>(std::floor(params.sub_side)));
  const int m = overrides.m.value_or(params.m);
  const double spacing = overrides.spacing.value_or(params.spacing);
  const double circle_radius = overrides.circle_radius.value_or(params.circle_radius);
  if (m < 1 || radius < 1)
    throw std::invalid_argument("invalid-parameters: ball packing m=" + std::to_string(m) +
                                " radius=" + std::to_string(radius));
  const Point host_center{(n - 1) / 2, (n - 1) / 2};
  std::vector<Point> centers =
      overrides.anchors ? *overrides.anchors : equal_arc_centers(host_center, circle_radius, m);
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      if (norm(centers[i] - centers[j]) < spacing)
        throw std::invalid_argument("invalid-parameters: ball centers closer than required spacing");
  pk.sub_side = radius;
  pk.m = static_cast<int>(centers.size());
  pk.anchors = centers;
  std::set<std::uint32_t> used;
  for (const Point& c : centers) {
    std::vector<std::uint32_t> region;
    for (int dy = -radius; dy <= radius; ++dy)
      for (int dx = -radius; dx <= radius; ++dx) {
        if (std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) > radius)
          continue;
        const auto v = g.find_vertex(c.x + dx, c.y + dy);
        if (!v || g.is_super(*v))
          throw std::invalid_argument("invalid-parameters: packing ball touches an absorbing set");
        if (c.x + dx <= 0 || c.y + dy <= 0 || c.x + dx >= n - 1 || c.y + dy >= n - 1)
          throw std::invalid_argument("invalid-parameters: packing ball touches the host boundary");
        if (!used.insert(*v).second)
          throw std::invalid_argument("invalid-parameters: packing balls overlap");
        region.push_back(*v);
      }
    if (region.size() < 2)
      throw std::invalid_argument("invalid-parameters: packing ball has fewer than 2 sites");
    pk.regions.push_back(std::move(region));
  }
  return pk;
}

std::vector<std::uint32_t> sites_in_disk(const LatticeGraph& g, Point center, double r) {
  std::vector<std::uint32_t> out;
  const int ri = static_cast<int>(std::ceil(r));
  for (int dy = -ri; dy <= ri; ++dy)
    for (int dx = -ri; dx <= ri; ++dx) {
      if (std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) > r) continue;
      const auto v = g.find_vertex(center.x + dx, center.y + dy);
      if (v && !g.is_super(*v)) out.push_back(*v);
    }
  return out;
}

std::vector<std::uint32_t> disk_boundary_sites(const LatticeGraph& g, Point center, double r) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t v : sites_in_disk(g, center, r)) {
    const Point p = g.coord(v);
    for (const auto& d : kGrid4) {
      const Point q{p.x + d[0], p.y + d[1]};
      if (norm(q - center) > r) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

}  // namespace covertime
