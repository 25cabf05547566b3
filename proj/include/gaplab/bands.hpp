#pragma once

#include "gaplab/fd_operator.hpp"
#include "gaplab/potential.hpp"
#include "gaplab/util.hpp"

#include <Eigen/Eigenvalues>

#include <complex>
#include <optional>
#include <vector>

namespace gaplab {

/// Cell problem at quasi-momentum theta: the m x m Hermitian matrix of the
/// finite-difference Hamiltonian restricted to one period cell with the
/// Bloch condition u(p + m) = e^{i theta} u(p).
inline ComplexMatrix bloch_cell_matrix(const std::vector<double>& vt, double h,
                                       double theta) {
  const int m = int(vt.size());
  const double ih2 = 1.0 / (h * h);
  ComplexMatrix A = ComplexMatrix::Zero(m, m);
  for (int p = 0; p < m; ++p) {
    A(p, p) = 2.0 * ih2 + vt[p];
    if (p + 1 < m) {
      A(p, p + 1) -= ih2;
      A(p + 1, p) -= ih2;
    }
  }
  const std::complex<double> phase(std::cos(theta), std::sin(theta));
  A(m - 1, 0) -= ih2 * phase;
  A(0, m - 1) -= ih2 * std::conj(phase);
  return A;
}

/// Real-symmetric specialization for theta = 0 (periodic) and theta = pi
/// (antiperiodic), where the Bloch phase is +-1.
inline Matrix bloch_cell_matrix_real(const std::vector<double>& vt, double h,
                                     bool antiperiodic) {
  const int m = int(vt.size());
  const double ih2 = 1.0 / (h * h);
  Matrix A = Matrix::Zero(m, m);
  for (int p = 0; p < m; ++p) {
    A(p, p) = 2.0 * ih2 + vt[p];
    if (p + 1 < m) {
      A(p, p + 1) -= ih2;
      A(p + 1, p) -= ih2;
    }
  }
  const double phase = antiperiodic ? -1.0 : 1.0;
  A(m - 1, 0) -= ih2 * phase;
  A(0, m - 1) -= ih2 * phase;
  return A;
}

inline bool theta_is_lattice(double theta, double tol = 1e-12) {
  return std::abs(theta) < tol || std::abs(std::abs(theta) - kPi) < tol;
}

/// Eigen-pairs of one cell problem, ascending. Eigenvectors are normalized to
/// unit cell mean-square: sum |phi_p|^2 h = 1.
struct CellModes {
  double theta = 0;
  Vector values;
  ComplexMatrix vectors;
};

inline CellModes solve_cell_problem(const std::vector<double>& vt, double h,
                                    double theta) {
  CellModes cm;
  cm.theta = theta;
  const int m = int(vt.size());
  if (theta_is_lattice(theta)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        bloch_cell_matrix_real(vt, h, std::abs(theta) > 1.0));
    if (es.info() != Eigen::Success)
      throw Error("eigensolver", "cell eigensolve failed at theta = " + std::to_string(theta));
    cm.values = es.eigenvalues();
    cm.vectors = es.eigenvectors().cast<std::complex<double>>();
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(bloch_cell_matrix(vt, h, theta));
    if (es.info() != Eigen::Success)
      throw Error("eigensolver", "cell eigensolve failed at theta = " + std::to_string(theta));
    cm.values = es.eigenvalues();
    cm.vectors = es.eigenvectors();
  }
  cm.vectors /= std::sqrt(h);  // unit cell mean-square
  // Rayleigh-quotient polish: the decomposition's backward error scales with
  // the matrix norm (~4/h^2); the quotient restores eigenvalue accuracy to
  // the eigenvalue's own scale, which the shift-identity checks rely on
  {
    ComplexMatrix A = bloch_cell_matrix(vt, h, theta);
    for (int j = 0; j < m; ++j) {
      const std::complex<double> num = cm.vectors.col(j).dot(A * cm.vectors.col(j));
      const double den = cm.vectors.col(j).squaredNorm();
      cm.values[j] = num.real() / den;
    }
  }
  // pin the arbitrary eigenvector phase: largest |entry| real positive
  for (int j = 0; j < m; ++j) {
    int imax = 0;
    double best = -1;
    for (int p = 0; p < m; ++p) {
      double a = std::abs(cm.vectors(p, j));
      if (a > best) { best = a; imax = p; }
    }
    std::complex<double> z = cm.vectors(imax, j);
    if (std::abs(z) > 0) cm.vectors.col(j) *= std::conj(z) / std::abs(z);
  }
  return cm;
}

/// Band functions E_j(k) of -d^2/dx^2 + V on n_k quasi-momenta covering
/// [-pi, pi). Rows are k-points, columns are bands (ascending per k).
struct BandStructure {
  std::vector<double> k;
  Matrix energies;  // n_k x n_bands
  int points_per_cell = 0;

  int n_bands() const { return int(energies.cols()); }
  int n_k() const { return int(k.size()); }
};

inline BandStructure bloch_bands(const PeriodicPotential& V, int n_bands, int n_k,
                                 int points_per_cell, int jobs = 1) {
  if (n_bands < 2) throw Error("bands", "need n_bands >= 2");
  if (n_k < 8) throw Error("bands", "need n_k >= 8");
  if (n_bands > points_per_cell)
    throw Error("bands", "cell problem has only points_per_cell eigenvalues");
  const std::vector<double> vt = V.cell_table(points_per_cell);
  const double h = 1.0 / points_per_cell;

  BandStructure bs;
  bs.points_per_cell = points_per_cell;
  bs.k.resize(n_k);
  bs.energies.resize(n_k, n_bands);
  for (int i = 0; i < n_k; ++i) bs.k[i] = -kPi + 2.0 * kPi * i / n_k;

  std::vector<std::string> failure(n_k);
  parallel_for(n_k, jobs, [&](int i) {
    try {
      CellModes cm = solve_cell_problem(vt, h, bs.k[i]);
      for (int j = 0; j < n_bands; ++j) bs.energies(i, j) = cm.values[j];
      // residual of each retained pair, relative to max(1, |E|)
      ComplexMatrix A = bloch_cell_matrix(vt, h, bs.k[i]);
      for (int j = 0; j < n_bands; ++j) {
        ComplexVector r = A * cm.vectors.col(j) - cm.values[j] * cm.vectors.col(j);
        double rel = r.norm() / std::max(1.0, std::abs(cm.values[j])) / cm.vectors.col(j).norm();
        if (rel > 1e-8)
          failure[i] = "band residual " + format_double(rel) + " at k index " +
                       std::to_string(i);
      }
    } catch (const std::exception& e) {
      failure[i] = std::string(e.what()) + " (k index " + std::to_string(i) + ")";
    }
  });
  for (int i = 0; i < n_k; ++i)
    if (!failure[i].empty()) throw Error("eigensolver", failure[i]);
  return bs;
}

/// Spectral gap between two consecutive bands: a = max_k E_j, b = min_k E_{j+1}.
struct SpectralGap {
  double a = 0;           // upper edge of the band below
  double b = 0;           // lower edge of the band above
  int band_below = -1;
  int band_above = -1;
  bool contains_zero = false;

  double width() const { return b - a; }
  bool contains(double lambda) const { return a < lambda && lambda < b; }
};

inline std::vector<SpectralGap> find_gaps(const BandStructure& bs, double threshold) {
  std::vector<SpectralGap> gaps;
  for (int j = 0; j + 1 < bs.n_bands(); ++j) {
    double a = bs.energies.col(j).maxCoeff();
    double b = bs.energies.col(j + 1).minCoeff();
    if (b - a > threshold) {
      SpectralGap g;
      g.a = a;
      g.b = b;
      g.band_below = j;
      g.band_above = j + 1;
      g.contains_zero = (a < 0.0 && 0.0 < b);
      gaps.push_back(g);
    }
  }
  return gaps;  // bands ascend, so gaps come out sorted by a
}

/// Shift V so that 0 sits at fraction `frac` across the chosen gap
/// (frac = 0.5: midpoint). Returns the shifted potential and gap.
inline std::pair<PeriodicPotential, SpectralGap> shift_to_gap(
    const PeriodicPotential& V, const SpectralGap& gap, double frac = 0.5) {
  if (!(gap.a < gap.b)) throw Error("gap", "invalid gap");
  if (!(frac > 0.0 && frac < 1.0)) throw Error("gap", "shift fraction must lie in (0,1)");
  const double s0 = gap.a + frac * (gap.b - gap.a);
  SpectralGap shifted = gap;
  shifted.a = gap.a - s0;
  shifted.b = gap.b - s0;
  shifted.contains_zero = true;
  return {V.shifted_by(-s0), shifted};
}

}  // namespace gaplab
