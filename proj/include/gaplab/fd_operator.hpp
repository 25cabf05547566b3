#pragma once

#include "gaplab/grid.hpp"
#include "gaplab/potential.hpp"
#include "gaplab/util.hpp"

#include <Eigen/SparseCore>

#include <limits>
#include <vector>

namespace gaplab {

/// Second-order centered finite-difference Hamiltonian -d^2/dx^2 + V with
/// periodic boundary on an integer number of cells. The quadratic form, the
/// discrete H^1 norm and the matrix share one stencil, so summation by parts
/// is exact: quadratic_form(u, 0) == <A u, u> at the discrete level.
class DiscreteOperator {
 public:
  DiscreteOperator(const Grid1D& grid, const PeriodicPotential& V)
      : grid_(grid), potential_(V), vt_(V.cell_table(grid.points_per_cell)) {
    if (V.dimension != 1)
      throw Error("dimension", "only dimension = 1 is supported in this build");
  }

  const Grid1D& grid() const { return grid_; }
  const PeriodicPotential& potential() const { return potential_; }
  const std::vector<double>& potential_table() const { return vt_; }
  double potential_at(int i) const { return vt_[grid_.cell_offset(i)]; }

  // --- matrix action ------------------------------------------------------

  Vector apply(const Vector& u) const {
    check(u);
    const int n = grid_.n;
    const double ih2 = 1.0 / (grid_.h * grid_.h);
    Vector r(n);
    for (int i = 0; i < n; ++i) {
      const double left = u[i == 0 ? n - 1 : i - 1];
      const double right = u[i == n - 1 ? 0 : i + 1];
      r[i] = (2.0 * u[i] - left - right) * ih2 + potential_at(i) * u[i];
    }
    return r;
  }

  /// A - lambda (optionally minus a pointwise diagonal term), assembled sparse.
  Eigen::SparseMatrix<double> sparse(double lambda = 0.0,
                                     const Vector* diag_extra = nullptr) const {
    const int n = grid_.n;
    const double ih2 = 1.0 / (grid_.h * grid_.h);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(3 * n);
    for (int i = 0; i < n; ++i) {
      double d = 2.0 * ih2 + potential_at(i) - lambda;
      if (diag_extra) d -= (*diag_extra)[i];
      trip.emplace_back(i, i, d);
      trip.emplace_back(i, (i + 1) % n, -ih2);
      trip.emplace_back(i, (i + n - 1) % n, -ih2);
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
  }

  Matrix dense() const {
    const int n = grid_.n;
    const double ih2 = 1.0 / (grid_.h * grid_.h);
    Matrix A = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      A(i, i) = 2.0 * ih2 + potential_at(i);
      A(i, (i + 1) % n) -= ih2;
      A(i, (i + n - 1) % n) -= ih2;
    }
    return A;
  }

  // --- discrete norms and forms (rectangle quadrature, weight h) -----------

  double dot(const Vector& u, const Vector& v) const {
    check(u);
    check(v);
    return grid_.h * u.dot(v);
  }
  double l2_norm2(const Vector& u) const { return dot(u, u); }
  double l2_norm(const Vector& u) const { return std::sqrt(l2_norm2(u)); }

  double lp_norm(const Vector& u, double p) const {
    check(u);
    if (std::isinf(p)) return u.cwiseAbs().maxCoeff();
    double s = 0;
    for (int i = 0; i < grid_.n; ++i) s += std::pow(std::abs(u[i]), p);
    return std::pow(grid_.h * s, 1.0 / p);
  }

  /// Forward difference (u_{i+1} - u_i)/h with wraparound.
  Vector forward_diff(const Vector& u) const {
    check(u);
    const int n = grid_.n;
    Vector d(n);
    for (int i = 0; i < n; ++i) d[i] = (u[(i + 1) % n] - u[i]) / grid_.h;
    return d;
  }

  double h1_inner(const Vector& u, const Vector& v) const {
    Vector du = forward_diff(u), dv = forward_diff(v);
    return grid_.h * (du.dot(dv) + u.dot(v));
  }
  double h1_norm2(const Vector& u) const { return h1_inner(u, u); }
  double h1_norm(const Vector& u) const { return std::sqrt(h1_norm2(u)); }

  /// Q_lambda(u) = sum(|grad u|^2 + (V - lambda) u^2) h.
  double quadratic_form(const Vector& u, double lambda) const {
    check(u);
    const int n = grid_.n;
    double s = 0;
    for (int i = 0; i < n; ++i) {
      const double du = (u[(i + 1) % n] - u[i]) / grid_.h;
      s += du * du + (potential_at(i) - lambda) * u[i] * u[i];
    }
    return grid_.h * s;
  }

  /// Circular shift moving index `from` to index `to` (translation pinning).
  Vector shifted(const Vector& u, int from, int to) const {
    check(u);
    const int n = grid_.n;
    Vector r(n);
    int delta = grid_.wrap(to - from);
    for (int i = 0; i < n; ++i) r[(i + delta) % n] = u[i];
    return r;
  }

 private:
  void check(const Vector& u) const {
    if (u.size() != grid_.n)
      throw Error("grid-mismatch", "vector has " + std::to_string(u.size()) +
                                       " entries, grid has " + std::to_string(grid_.n));
  }

  Grid1D grid_;
  PeriodicPotential potential_;
  std::vector<double> vt_;
};

}  // namespace gaplab
