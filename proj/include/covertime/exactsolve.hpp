#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "covertime/lattice.hpp"

namespace covertime {

// Exact Green function G_U(x, y) (expected visits to y before hitting U,
// counting the visit at step 0) via one sparse Cholesky factorization of the
// interior Laplacian. G = L_int^{-1} D, so G(x,y)/d_y is symmetric and
// R_eff(x, U) = G(x, x)/d_x.
class GreenSolution {
 public:
  GreenSolution(const LatticeGraph& g, std::vector<std::uint32_t> absorbing);

  const LatticeGraph& graph() const { return *g_; }
  const std::vector<std::uint32_t>& absorbing() const { return absorbing_; }
  const std::vector<std::uint32_t>& interior() const { return interior_; }
  bool is_absorbing(std::uint32_t v) const { return interior_index_[v] < 0; }

  double green(std::uint32_t x, std::uint32_t y) const;
  double resistance(std::uint32_t x) const;
  // full (vertex_count x vertex_count) Green matrix; small graphs only
  Eigen::MatrixXd green_matrix() const;
  // solve L_int u = rhs over interior coordinates
  Eigen::VectorXd solve_interior(const Eigen::VectorXd& rhs) const;
  int interior_index(std::uint32_t v) const { return interior_index_[v]; }

 private:
  const Eigen::VectorXd& column(std::uint32_t y) const;  // G(., y)/d_y over interior

  const LatticeGraph* g_;
  std::vector<std::uint32_t> absorbing_;
  std::vector<std::uint32_t> interior_;
  std::vector<int> interior_index_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
  mutable std::unordered_map<std::uint32_t, Eigen::VectorXd> column_cache_;
  mutable std::mutex cache_mutex_;
};

struct HarmonicMeasure {
  std::uint32_t source = 0;
  std::vector<std::uint32_t> targets;  // sorted
  std::vector<double> weights;         // aligned with targets
  double weight_of(std::uint32_t v) const;
};

HarmonicMeasure harmonic_measure(const LatticeGraph& g, std::uint32_t x,
                                 std::vector<std::uint32_t> targets);
double harmonic_tv_distance(const HarmonicMeasure& a, const HarmonicMeasure& b);

// Potential kernel a(x) of the simple random walk on Z^2: a(0) = 0, exact
// values from a harmonicity solve inside `exact_radius`, the (2/pi)log|x| +
// (2*gamma + log 8)/pi expansion beyond it.
class PotentialKernel {
 public:
  explicit PotentialKernel(int exact_radius = 64);
  double operator()(int x, int y) const;
  double operator()(Point p) const { return (*this)(p.x, p.y); }
  int exact_radius() const { return radius_; }
  static double asymptotic(double x, double y);

 private:
  int radius_;
  std::vector<double> table_;  // (2r+1)^2 values, Chebyshev window
};

// process-wide shared instance (default radius)
const PotentialKernel& default_potential_kernel();
double potential_kernel(int x, int y);

// Second exact route to the wired-box Green function:
// G(x, y) = E_x a(S_{tau_boundary} - y) - a(x - y), with the hitting
// distribution on the unwired boundary computed exactly.
class BoxKernelGreen {
 public:
  explicit BoxKernelGreen(int n, const PotentialKernel& kernel = default_potential_kernel());
  // x, y in box coordinates [0, n); returns 0 when x lies on the boundary
  double green(Point x, Point y) const;

 private:
  int n_;
  const PotentialKernel* kernel_;
  LatticeGraph free_box_;
  std::vector<std::uint32_t> boundary_;
  std::unique_ptr<GreenSolution> solver_;
  mutable std::unordered_map<std::uint64_t, std::vector<double>> row_cache_;
  mutable std::mutex cache_mutex_;
};

double green_via_kernel(const LatticeGraph& wired_box, Point x, Point y);

// Leading terms of the disk Green function (additive O(1) uncertainty).
double green_disk_approx(Point x, Point y, double n);

// Leading term of P_x(hit boundary of C_n before boundary of C_m).
double annulus_escape_prob(Point x, double m, double n);

}  // namespace covertime
