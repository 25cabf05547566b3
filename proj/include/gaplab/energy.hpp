#pragma once

#include "gaplab/fd_operator.hpp"
#include "gaplab/nonlinearity.hpp"
#include "gaplab/util.hpp"

#include <Eigen/SparseCore>

namespace gaplab {

/// E_lambda(u) = 1/2 Q_lambda(u) - sum F(x_i, u_i) h, with its L^2 gradient
/// (A - lambda) u - f(., u) and the linearization A - lambda - diag(f_u).
/// Binds one operator and one nonlinearity; the weight table is sampled once
/// per grid so wraparound stays exact.
class EnergyModel {
 public:
  EnergyModel(const DiscreteOperator& op, const Nonlinearity& nl)
      : op_(&op), nl_(&nl), B_(nl.weight_table(op.grid().points_per_cell)) {}

  const DiscreteOperator& op() const { return *op_; }
  const Nonlinearity& nl() const { return *nl_; }

  double nonlinear_sum(const Vector& u) const {  // sum F(x_i, u_i) h
    const Grid1D& g = op_->grid();
    double s = 0;
    for (int i = 0; i < g.n; ++i) s += F_at(i, u[i]);
    return g.h * s;
  }

  double value(const Vector& u, double lambda) const {
    return 0.5 * op_->quadratic_form(u, lambda) - nonlinear_sum(u);
  }

  Vector gradient(const Vector& u, double lambda) const {
    Vector g = op_->apply(u);
    const Grid1D& gr = op_->grid();
    for (int i = 0; i < gr.n; ++i) g[i] += -lambda * u[i] - f_at(i, u[i]);
    return g;
  }

  Eigen::SparseMatrix<double> hessian(const Vector& u, double lambda) const {
    const Grid1D& g = op_->grid();
    Vector fu(g.n);
    for (int i = 0; i < g.n; ++i) fu[i] = fu_at(i, u[i]);
    return op_->sparse(lambda, &fu);
  }

  /// sum (1/2 f(x,u) u - F(x,u)) h; equals E - 1/2 <grad E, u> identically,
  /// and is nonnegative under the superquadraticity assumption.
  double virial_sum(const Vector& u) const {
    const Grid1D& g = op_->grid();
    double s = 0;
    for (int i = 0; i < g.n; ++i) s += 0.5 * f_at(i, u[i]) * u[i] - F_at(i, u[i]);
    return g.h * s;
  }

  double f_at(int i, double u) const {
    const int p = op_->grid().cell_offset(i);
    return nl_->f_at(B_[p], double(p) / op_->grid().points_per_cell, u);
  }
  double F_at(int i, double u) const {
    const int p = op_->grid().cell_offset(i);
    return nl_->F_at(B_[p], double(p) / op_->grid().points_per_cell, u);
  }
  double fu_at(int i, double u) const {
    const int p = op_->grid().cell_offset(i);
    return nl_->fu_at(B_[p], double(p) / op_->grid().points_per_cell, u);
  }

  const std::vector<double>& weight_table() const { return B_; }

 private:
  const DiscreteOperator* op_;
  const Nonlinearity* nl_;
  std::vector<double> B_;
};

inline double energy(const DiscreteOperator& op, const Nonlinearity& nl,
                     const Vector& u, double lambda) {
  return EnergyModel(op, nl).value(u, lambda);
}

inline Vector energy_gradient(const DiscreteOperator& op, const Nonlinearity& nl,
                              const Vector& u, double lambda) {
  return EnergyModel(op, nl).gradient(u, lambda);
}

}  // namespace gaplab
