#pragma once

#include "gaplab/bands.hpp"
#include "gaplab/fd_operator.hpp"
#include "gaplab/util.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <vector>

namespace gaplab {

/// Twisted forward difference on one cell: the last entry wraps with the
/// Bloch phase e^{i theta}.
inline ComplexVector twisted_forward_diff(const ComplexVector& phi, double h,
                                          double theta) {
  const int m = int(phi.size());
  ComplexVector d(m);
  const std::complex<double> phase(std::cos(theta), std::sin(theta));
  for (int p = 0; p + 1 < m; ++p) d[p] = (phi[p + 1] - phi[p]) / h;
  d[m - 1] = (phase * phi[0] - phi[m - 1]) / h;
  return d;
}

/// L^2-orthogonal splitting of the discrete operator into the negative (Y)
/// and positive (Z) spectral subspaces, with apply-routines for the
/// projectors P (onto Y) and Q = 1 - P, and exact H^1 coercivity constants
///   Q_0(y) <= -alpha0 |y|_H1^2 on Y,   Q_0(z) >= beta0 |z|_H1^2 on Z.
///
/// For the periodic operator the construction runs fiberwise over the
/// quasi-momenta theta_j = 2 pi j / L, which block-diagonalizes the operator
/// exactly at the discrete level; alpha0/beta0 come from generalized
/// eigenvalue problems per fiber (the quadratic form and the H^1 Gram matrix
/// are both fiber-diagonal, so the fiber minima are exact subspace minima).
class SpectralSplit {
 public:
  /// Bloch-fiber construction for a periodic DiscreteOperator.
  static SpectralSplit from_operator(const DiscreteOperator& op, int jobs = 1) {
    const Grid1D& g = op.grid();
    const int L = g.cells, m = g.points_per_cell;
    const double h = g.h;
    const std::vector<double>& vt = op.potential_table();

    SpectralSplit s;
    s.mass_ = h;
    const int n_fibers = L / 2 + 1;

    std::vector<CellModes> modes(n_fibers);
    parallel_for(n_fibers, jobs, [&](int j) {
      modes[j] = solve_cell_problem(vt, h, 2.0 * kPi * j / L);
    });

    int dim_y = 0;
    std::vector<double> all;
    all.reserve(L * m);
    for (int j = 0; j < n_fibers; ++j) {
      const bool self_paired = (j == 0) || (2 * j == L);
      const int weight = self_paired ? 1 : 2;
      for (int b = 0; b < m; ++b) {
        for (int w = 0; w < weight; ++w) all.push_back(modes[j].values[b]);
        if (modes[j].values[b] < 0) dim_y += weight;
      }
    }
    std::sort(all.begin(), all.end());
    s.spectrum_ = std::move(all);
    s.check_margin();

    // assemble the real orthonormal Y basis on the full domain
    s.ybasis_.resize(g.n, dim_y);
    s.y_mu_.resize(dim_y);
    int col = 0;
    for (int j = 0; j < n_fibers; ++j) {
      const double theta = 2.0 * kPi * j / L;
      const bool self_paired = (j == 0) || (2 * j == L);
      for (int b = 0; b < m; ++b) {
        if (modes[j].values[b] >= 0) continue;
        const ComplexVector& phi = modes[j].vectors.col(b);
        if (self_paired) {
          const double sign = (2 * j == L) ? -1.0 : 1.0;  // phase per cell
          double ph = 1.0;
          for (int c = 0; c < L; ++c, ph *= sign)
            for (int p = 0; p < m; ++p)
              s.ybasis_(c * m + p, col) = ph * phi[p].real() / std::sqrt(double(L));
          s.y_mu_[col++] = modes[j].values[b];
        } else {
          const double amp = std::sqrt(2.0 / L);
          for (int c = 0; c < L; ++c) {
            const std::complex<double> ph(std::cos(theta * c), std::sin(theta * c));
            for (int p = 0; p < m; ++p) {
              const std::complex<double> v = ph * phi[p];
              s.ybasis_(c * m + p, col) = amp * v.real();
              s.ybasis_(c * m + p, col + 1) = amp * v.imag();
            }
          }
          s.y_mu_[col] = modes[j].values[b];
          s.y_mu_[col + 1] = modes[j].values[b];
          col += 2;
        }
      }
    }
    s.dim_z_ = L * m - dim_y;

    // exact coercivity constants, fiber by fiber
    s.alpha0_ = std::numeric_limits<double>::infinity();
    s.beta0_ = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_fibers; ++j) {
      const double theta = 2.0 * kPi * j / L;
      const int mm = m;
      ComplexMatrix grads(mm, mm);
      for (int b = 0; b < mm; ++b)
        grads.col(b) = twisted_forward_diff(modes[j].vectors.col(b), h, theta);
      ComplexMatrix gram =
          h * (grads.adjoint() * grads + modes[j].vectors.adjoint() * modes[j].vectors);
      std::vector<int> neg, pos;
      for (int b = 0; b < mm; ++b)
        (modes[j].values[b] < 0 ? neg : pos).push_back(b);
      s.alpha0_ = std::min(s.alpha0_, fiber_min_ratio(modes[j].values, gram, neg, -1.0));
      s.beta0_ = std::min(s.beta0_, fiber_min_ratio(modes[j].values, gram, pos, +1.0));
    }
    return s;
  }

  /// Dense eigendecomposition of an operator matrix (small-domain oracle).
  static SpectralSplit from_operator_dense(const DiscreteOperator& op) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(op.dense());
    if (es.info() != Eigen::Success) throw Error("eigensolver", "dense eigensolve failed");
    const Grid1D& g = op.grid();
    Matrix vecs = es.eigenvectors() / std::sqrt(g.h);  // L2(h)-orthonormal
    return build_dense(es.eigenvalues(), vecs, g.h, &op);
  }

  /// Arbitrary symmetric matrix, unit mass, H^1 taken equal to L^2
  /// (pure linear-algebra splits for tests).
  static SpectralSplit from_dense(const Matrix& A) {
    if (A.rows() != A.cols()) throw Error("split", "matrix not square");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A.cwiseAbs().maxCoeff()))
      throw Error("split", "matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    if (es.info() != Eigen::Success) throw Error("eigensolver", "dense eigensolve failed");
    return build_dense(es.eigenvalues(), es.eigenvectors(), 1.0, nullptr);
  }

  int dim_Y() const { return int(ybasis_.cols()); }
  int dim_Z() const { return dim_z_; }
  double mass() const { return mass_; }

  double a_edge() const { return a_; }  // largest eigenvalue below 0
  double b_edge() const { return b_; }  // smallest eigenvalue above 0
  double min_eigenvalue() const { return spectrum_.front(); }
  double max_eigenvalue() const { return spectrum_.back(); }
  const std::vector<double>& spectrum() const { return spectrum_; }

  double alpha0() const { return alpha0_; }
  double beta0() const { return beta0_; }

  const Matrix& y_basis() const { return ybasis_; }
  const Vector& y_eigenvalues() const { return y_mu_; }

  Vector apply_P(const Vector& u) const {
    return ybasis_ * (mass_ * (ybasis_.transpose() * u));
  }
  Vector apply_Q(const Vector& u) const { return u - apply_P(u); }

  /// Random element of span(Y), unit coefficients scale.
  Vector random_Y(Rng& rng) const {
    Vector c = rng.gaussian_vector(dim_Y());
    c /= c.norm();
    return ybasis_ * c;
  }

 private:
  static double fiber_min_ratio(const Vector& mu, const ComplexMatrix& gram,
                                const std::vector<int>& idx, double sign) {
    if (idx.empty()) return std::numeric_limits<double>::infinity();
    const int r = int(idx.size());
    ComplexMatrix A = ComplexMatrix::Zero(r, r);
    ComplexMatrix B(r, r);
    for (int i = 0; i < r; ++i) {
      A(i, i) = sign * mu[idx[i]];
      for (int k = 0; k < r; ++k) B(i, k) = gram(idx[i], idx[k]);
    }
    if (r == 1) return A(0, 0).real() / B(0, 0).real();
    Eigen::GeneralizedSelfAdjointEigenSolver<ComplexMatrix> ges(A, B);
    if (ges.info() != Eigen::Success)
      throw Error("eigensolver", "generalized fiber eigensolve failed");
    return ges.eigenvalues().minCoeff();
  }

  static SpectralSplit build_dense(const Vector& mu, const Matrix& vecs, double mass,
                                   const DiscreteOperator* op) {
    SpectralSplit s;
    s.mass_ = mass;
    const int n = int(mu.size());
    s.spectrum_.assign(mu.data(), mu.data() + n);
    s.check_margin();

    std::vector<int> neg, pos;
    for (int i = 0; i < n; ++i) (mu[i] < 0 ? neg : pos).push_back(i);
    s.ybasis_.resize(n, int(neg.size()));
    s.y_mu_.resize(int(neg.size()));
    for (size_t i = 0; i < neg.size(); ++i) {
      s.ybasis_.col(i) = vecs.col(neg[i]);
      s.y_mu_[i] = mu[neg[i]];
    }
    s.dim_z_ = int(pos.size());

    if (!op) {
      // H^1 == L^2: the subspace minima reduce to the extreme eigenvalues
      s.alpha0_ = neg.empty() ? std::numeric_limits<double>::infinity() : -s.a_;
      s.beta0_ = pos.empty() ? std::numeric_limits<double>::infinity() : s.b_;
      return s;
    }

    // exact subspace minima of (-+ Q_0) / |.|_H1^2 via generalized problems
    auto subspace_min = [&](const std::vector<int>& idx, double sign) {
      if (idx.empty()) return std::numeric_limits<double>::infinity();
      const int r = int(idx.size());
      Matrix basis(n, r), diffs(n, r);
      for (int i = 0; i < r; ++i) {
        basis.col(i) = vecs.col(idx[i]);
        diffs.col(i) = op->forward_diff(basis.col(i));
      }
      Matrix gram = mass * (diffs.transpose() * diffs + basis.transpose() * basis);
      Matrix A = Matrix::Zero(r, r);
      for (int i = 0; i < r; ++i) A(i, i) = sign * mu[idx[i]];
      Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(A, gram);
      if (ges.info() != Eigen::Success)
        throw Error("eigensolver", "generalized subspace eigensolve failed");
      return ges.eigenvalues().minCoeff();
    };
    s.alpha0_ = subspace_min(neg, -1.0);
    s.beta0_ = subspace_min(pos, +1.0);
    return s;
  }

  void check_margin() {
    a_ = -std::numeric_limits<double>::infinity();
    b_ = std::numeric_limits<double>::infinity();
    for (double v : spectrum_) {
      if (std::abs(v) < 1e-8)
        throw Error("gap-margin", "gap margin too small: eigenvalue " + format_double(v) +
                                      " within 1e-8 of 0");
      if (v < 0) a_ = std::max(a_, v);
      else b_ = std::min(b_, v);
    }
  }

  double mass_ = 1.0;
  Matrix ybasis_;
  Vector y_mu_;
  int dim_z_ = 0;
  std::vector<double> spectrum_;
  double a_ = 0, b_ = 0;
  double alpha0_ = 0, beta0_ = 0;
};

/// Coercivity constants of Q_lambda on Y and Z for lambda inside the gap:
///   alpha_lambda = alpha0 (1 - lambda/a) for lambda <= 0, else alpha0,
///   beta_lambda  = beta0 for lambda <= 0, else beta0 (1 - lambda/b),
///   N_lambda     = min(alpha_lambda, beta_lambda) / 2.
struct GapCoercivity {
  double lambda = 0;
  double alpha = 0;
  double beta = 0;
  double N = 0;
};

inline GapCoercivity coercivity(double lambda, const SpectralSplit& split) {
  const double a = split.a_edge(), b = split.b_edge();
  if (!(a < lambda && lambda < b))
    throw Error("domain", "lambda = " + format_double(lambda) + " outside the gap (" +
                              format_double(a) + ", " + format_double(b) + ")");
  GapCoercivity c;
  c.lambda = lambda;
  c.alpha = lambda <= 0 ? split.alpha0() * (1.0 - lambda / a) : split.alpha0();
  c.beta = lambda <= 0 ? split.beta0() : split.beta0() * (1.0 - lambda / b);
  c.N = 0.5 * std::min(c.alpha, c.beta);
  return c;
}

}  // namespace gaplab
