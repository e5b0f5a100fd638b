#include "covertime/exactsolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covertime {

namespace {

constexpr double kEulerGamma = 0.5772156649015328606;
constexpr double kPi = 3.14159265358979323846;

}  // namespace

GreenSolution::GreenSolution(const LatticeGraph& g, std::vector<std::uint32_t> absorbing)
    : g_(&g), absorbing_(std::move(absorbing)) {
  if (absorbing_.empty()) throw std::invalid_argument("no-absorbing-set: U must be nonempty");
  std::sort(absorbing_.begin(), absorbing_.end());
  absorbing_.erase(std::unique(absorbing_.begin(), absorbing_.end()), absorbing_.end());

  const std::size_t nv = g.vertex_count();
  interior_index_.assign(nv, -1);
  std::vector<char> is_abs(nv, 0);
  for (std::uint32_t v : absorbing_) {
    if (v >= nv) throw std::out_of_range("not-found: absorbing vertex outside graph");
    is_abs[v] = 1;
  }
  for (std::uint32_t v = 0; v < nv; ++v) {
    if (!is_abs[v]) {
      interior_index_[v] = static_cast<int>(interior_.size());
      interior_.push_back(v);
    }
  }

  const auto ni = static_cast<Eigen::Index>(interior_.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(interior_.size() * 5);
  for (Eigen::Index i = 0; i < ni; ++i) {
    const std::uint32_t v = interior_[i];
    trips.emplace_back(i, i, static_cast<double>(g.degree(v)));
    for (std::uint32_t w : g.neighbors(v)) {
      const int j = interior_index_[w];
      if (j >= 0) trips.emplace_back(i, j, -1.0);
    }
  }
  Eigen::SparseMatrix<double> lap(ni, ni);
  lap.setFromTriplets(trips.begin(), trips.end());
  llt_.compute(lap);
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("numerical-failure: interior Laplacian factorization failed");
}

const Eigen::VectorXd& GreenSolution::column(std::uint32_t y) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = column_cache_.find(y);
  if (it != column_cache_.end()) return it->second;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(interior_.size()));
  rhs[interior_index_[y]] = 1.0;
  return column_cache_.emplace(y, llt_.solve(rhs)).first->second;
}

double GreenSolution::green(std::uint32_t x, std::uint32_t y) const {
  if (interior_index_[x] < 0 || interior_index_[y] < 0) return 0.0;
  return column(y)[interior_index_[x]] * g_->degree(y);
}

double GreenSolution::resistance(std::uint32_t x) const {
  if (interior_index_[x] < 0) return 0.0;
  return green(x, x) / g_->degree(x);
}

Eigen::MatrixXd GreenSolution::green_matrix() const {
  const auto nv = static_cast<Eigen::Index>(g_->vertex_count());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nv, nv);
  for (std::uint32_t y : interior_) {
    const Eigen::VectorXd& col = column(y);
    for (std::size_t i = 0; i < interior_.size(); ++i)
      out(interior_[i], y) = col[static_cast<Eigen::Index>(i)] * g_->degree(y);
  }
  return out;
}

Eigen::VectorXd GreenSolution::solve_interior(const Eigen::VectorXd& rhs) const {
  return llt_.solve(rhs);
}

double HarmonicMeasure::weight_of(std::uint32_t v) const {
  auto it = std::lower_bound(targets.begin(), targets.end(), v);
  if (it == targets.end() || *it != v) return 0.0;
  return weights[static_cast<std::size_t>(it - targets.begin())];
}

HarmonicMeasure harmonic_measure(const LatticeGraph& g, std::uint32_t x,
                                 std::vector<std::uint32_t> targets) {
  if (targets.empty()) throw std::invalid_argument("no-target: B must be nonempty");
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  HarmonicMeasure hm;
  hm.source = x;
  hm.targets = targets;
  hm.weights.assign(targets.size(), 0.0);

  if (std::binary_search(targets.begin(), targets.end(), x)) {
    hm.weights[static_cast<std::size_t>(
        std::lower_bound(targets.begin(), targets.end(), x) - targets.begin())] = 1.0;
    return hm;
  }

  // one solve: phi = L_int^{-1} e_x gives G(x, w)/d_w by symmetry, and
  // H(x, z) = sum_w phi_w * (#edges w-z)
  GreenSolution sol(g, targets);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sol.interior().size()));
  rhs[sol.interior_index(x)] = 1.0;
  Eigen::VectorXd phi = sol.solve_interior(rhs);
  for (std::size_t i = 0; i < sol.interior().size(); ++i) {
    const std::uint32_t w = sol.interior()[i];
    const double pw = phi[static_cast<Eigen::Index>(i)];
    if (pw == 0.0) continue;
    for (std::uint32_t z : g.neighbors(w)) {
      auto it = std::lower_bound(targets.begin(), targets.end(), z);
      if (it != targets.end() && *it == z)
        hm.weights[static_cast<std::size_t>(it - targets.begin())] += pw;
    }
  }
  return hm;
}

double harmonic_tv_distance(const HarmonicMeasure& a, const HarmonicMeasure& b) {
  if (a.targets != b.targets)
    throw std::invalid_argument("incompatible-measures: target sets differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.weights.size(); ++i)
    sum += std::abs(a.weights[i] - b.weights[i]);
  return 0.5 * sum;
}

double PotentialKernel::asymptotic(double x, double y) {
  return (1.0 / kPi) * std::log(x * x + y * y) + (2.0 * kEulerGamma + std::log(8.0)) / kPi;
}

PotentialKernel::PotentialKernel(int exact_radius) : radius_(exact_radius) {
  if (radius_ < 1) throw std::invalid_argument("exact radius must be >= 1");
  // Dirichlet solve on a box of half-width 3r with asymptotic boundary data
  // and a(0) pinned to 0; the boundary data error is O(R^-2) and the maximum
  // principle keeps the interior at least that accurate.
  const int R = 3 * radius_;
  const int W = 2 * R + 1;
  auto idx = [&](int x, int y) { return (y + R) * W + (x + R); };
  std::vector<int> unknown(static_cast<std::size_t>(W) * W, -1);
  std::vector<std::pair<int, int>> sites;
  for (int y = -R + 1; y <= R - 1; ++y)
    for (int x = -R + 1; x <= R - 1; ++x) {
      if (x == 0 && y == 0) continue;
      unknown[idx(x, y)] = static_cast<int>(sites.size());
      sites.emplace_back(x, y);
    }
  const auto nu = static_cast<Eigen::Index>(sites.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(sites.size() * 5);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu);
  for (Eigen::Index i = 0; i < nu; ++i) {
    const auto [x, y] = sites[static_cast<std::size_t>(i)];
    trips.emplace_back(i, i, 4.0);
    const int nbrs[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
    for (const auto& nb : nbrs) {
      const int nx = nb[0], ny = nb[1];
      if (nx == 0 && ny == 0) continue;  // a(0) = 0
      if (std::abs(nx) == R || std::abs(ny) == R)
        rhs[i] += asymptotic(nx, ny);
      else
        trips.emplace_back(i, unknown[idx(nx, ny)], -1.0);
    }
  }
  Eigen::SparseMatrix<double> lap(nu, nu);
  lap.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(lap);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("numerical-failure: potential kernel solve failed");
  Eigen::VectorXd a = llt.solve(rhs);

  const int w = 2 * radius_ + 1;
  table_.assign(static_cast<std::size_t>(w) * w, 0.0);
  for (int y = -radius_; y <= radius_; ++y)
    for (int x = -radius_; x <= radius_; ++x) {
      double val = 0.0;
      if (!(x == 0 && y == 0)) val = a[unknown[idx(x, y)]];
      table_[static_cast<std::size_t>(y + radius_) * w + (x + radius_)] = val;
    }
}

double PotentialKernel::operator()(int x, int y) const {
  if (std::abs(x) <= radius_ && std::abs(y) <= radius_) {
    const int w = 2 * radius_ + 1;
    return table_[static_cast<std::size_t>(y + radius_) * w + (x + radius_)];
  }
  return asymptotic(x, y);
}

const PotentialKernel& default_potential_kernel() {
  static const PotentialKernel kernel(64);
  return kernel;
}

double potential_kernel(int x, int y) { return default_potential_kernel()(x, y); }

BoxKernelGreen::BoxKernelGreen(int n, const PotentialKernel& kernel)
    : n_(n), kernel_(&kernel), free_box_(build_box(n, Boundary::free)) {
  for (int i = 0; i < n; ++i) {
    boundary_.push_back(free_box_.vertex_at(i, 0));
    boundary_.push_back(free_box_.vertex_at(i, n - 1));
    if (i > 0 && i < n - 1) {
      boundary_.push_back(free_box_.vertex_at(0, i));
      boundary_.push_back(free_box_.vertex_at(n - 1, i));
    }
  }
  std::sort(boundary_.begin(), boundary_.end());
  solver_ = std::make_unique<GreenSolution>(free_box_, boundary_);
}

double BoxKernelGreen::green(Point x, Point y) const {
  const std::uint32_t vx = free_box_.vertex_at(x.x, x.y);
  if (solver_->is_absorbing(vx)) return 0.0;

  const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x.x)) << 32) |
                            static_cast<std::uint32_t>(x.y);
  std::vector<double> const* row = nullptr;
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = row_cache_.find(key);
    if (it != row_cache_.end()) row = &it->second;
  }
  if (!row) {
    HarmonicMeasure hm = harmonic_measure(free_box_, vx, boundary_);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    row = &row_cache_.emplace(key, std::move(hm.weights)).first->second;
  }
  double expected = 0.0;
  for (std::size_t i = 0; i < boundary_.size(); ++i) {
    const Point z = free_box_.coord(boundary_[i]);
    expected += (*row)[i] * (*kernel_)(z.x - y.x, z.y - y.y);
  }
  return expected - (*kernel_)(x.x - y.x, x.y - y.y);
}

double green_via_kernel(const LatticeGraph& wired_box, Point x, Point y) {
  if (wired_box.kind != GraphKind::wired_box)
    throw std::invalid_argument("invalid-parameters: kernel route needs a wired box");
  BoxKernelGreen bkg(wired_box.side);
  return bkg.green(x, y);
}

double green_disk_approx(Point x, Point y, double n) {
  if (x == y || (x.x == 0 && x.y == 0) || (y.x == 0 && y.y == 0))
    throw std::domain_error("domain-error: formula singular at x=y or the origin");
  const double inv2pi = 1.0 / (2.0 * kPi);
  return inv2pi * (std::log(norm(y)) - std::log(norm(x - y))) +
         inv2pi * (std::log(norm(x)) - std::log(n));
}

double annulus_escape_prob(Point x, double m, double n) {
  if (!(m < n)) throw std::domain_error("domain-error: need m < n");
  const double r = norm(x);
  if (r < m || r > n) throw std::domain_error("domain-error: |x| outside [m, n]");
  return (std::log(r) - std::log(m)) / (std::log(n) - std::log(m));
}

}  // namespace covertime
