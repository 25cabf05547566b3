#pragma once

#include "gaplab/bands.hpp"
#include "gaplab/fd_operator.hpp"
#include "gaplab/split.hpp"
#include "gaplab/util.hpp"

#include <complex>

namespace gaplab {

/// Generalized eigenfunction of the discrete operator at the upper edge of a
/// spectral gap: a cell eigenvector at the edge quasi-momentum, normalized to
/// unit mean-square over one cell and extended over the domain by the Bloch
/// phase. For band edges at k in {0, pi} the wave is real.
struct BlochWave {
  double edge = 0;              // eigenvalue b at the edge
  double k_star = 0;            // edge quasi-momentum
  bool lattice_momentum = true; // k* at 0 or pi (real-valued choice available)
  ComplexVector cell_profile;   // sum |phi_p|^2 h = 1 over one cell
  int points_per_cell = 0;

  /// Samples over a full domain: Re(e^{i k* c} phi_p) at grid point c*m + p.
  Vector extend(const Grid1D& g) const {
    if (g.points_per_cell != points_per_cell)
      throw Error("grid-mismatch", "wave sampled at different points_per_cell");
    Vector psi(g.n);
    for (int c = 0; c < g.cells; ++c) {
      const std::complex<double> ph(std::cos(k_star * c), std::sin(k_star * c));
      for (int p = 0; p < points_per_cell; ++p)
        psi[c * points_per_cell + p] = (ph * cell_profile[p]).real();
    }
    return psi;
  }
};

/// Upper-edge Bloch wave of a gap. The edge momentum is located on the band
/// grid; if it falls on neither 0 nor pi the real part is used and the wave
/// is flagged (lattice_momentum = false).
inline BlochWave edge_bloch_wave(const PeriodicPotential& V, int points_per_cell,
                                 const BandStructure& bands, const SpectralGap& gap) {
  if (gap.band_above < 0 || gap.band_above >= bands.n_bands())
    throw Error("gap", "gap's upper band missing from the band structure");
  int imin = 0;
  for (int i = 1; i < bands.n_k(); ++i)
    if (bands.energies(i, gap.band_above) < bands.energies(imin, gap.band_above))
      imin = i;
  double k = bands.k[imin];
  // snap to the lattice momenta when within k-grid resolution
  const double dk = 2.0 * kPi / bands.n_k();
  if (std::abs(k) < 0.51 * dk) k = 0.0;
  else if (std::abs(std::abs(k) - kPi) < 0.51 * dk) k = kPi;

  BlochWave w;
  w.k_star = k;
  w.lattice_momentum = theta_is_lattice(k);
  w.points_per_cell = points_per_cell;
  CellModes cm = solve_cell_problem(V.cell_table(points_per_cell),
                                    1.0 / points_per_cell, std::abs(k));
  w.edge = cm.values[gap.band_above];
  w.cell_profile = cm.vectors.col(gap.band_above);
  if (w.lattice_momentum) {
    // the lattice-momentum cell matrix is real; drop the zero imaginary part
    for (int p = 0; p < points_per_cell; ++p)
      w.cell_profile[p] = std::complex<double>(w.cell_profile[p].real(), 0.0);
    // renormalize (phase pinning keeps this a no-op up to rounding)
    double ms = 0;
    for (int p = 0; p < points_per_cell; ++p)
      ms += std::norm(w.cell_profile[p]) / points_per_cell;
    w.cell_profile /= std::sqrt(ms);
  }
  return w;
}

inline double bloch_wave_residual(const BlochWave& w, const DiscreteOperator& op) {
  Vector psi = w.extend(op.grid());
  Vector r = op.apply(psi) - w.edge * psi;
  return std::sqrt(r.squaredNorm() / psi.squaredNorm());
}

/// Radial cutoff: 1 on [0,1], 0 on [2,inf), smooth bump ramp in between.
struct Cutoff {
  double operator()(double r) const {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double s = r - 1.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
};

/// Concentrating packet Psi_R(x) = R^{-N/2} eta(|x|/R) Psi(x), N = 1 here.
struct BlochPacket {
  double R = 0;
  Vector values;
};

inline int min_cells_for_R(double R) {
  int c = int(std::ceil(4.0 * R - 1e-9)) + 2;
  if (c % 2) ++c;  // even cell count keeps the antiperiodic edge wave admissible
  return c;
}

inline BlochPacket make_psi_R(const Vector& psi, const Cutoff& eta, double R,
                              const Grid1D& g) {
  if (R <= 0) throw Error("domain", "R must be positive");
  if (g.cells + 1e-9 * (1.0 + R) < 4.0 * R + 2.0)
    throw Error("domain-too-small",
                "domain of " + std::to_string(g.cells) + " cells cannot hold the packet; "
                "resize to at least " + std::to_string(min_cells_for_R(R)) + " cells");
  BlochPacket p;
  p.R = R;
  p.values.resize(g.n);
  const double amp = 1.0 / std::sqrt(R);
  for (int i = 0; i < g.n; ++i)
    p.values[i] = amp * eta(std::abs(g.x(i)) / R) * psi[i];
  return p;
}

inline BlochPacket make_psi_R(const BlochWave& w, const Cutoff& eta, double R,
                              const Grid1D& g) {
  return make_psi_R(w.extend(g), eta, R, g);
}

/// Direction along which the branch bifurcates: zeta_lambda = Q Psi_R(lambda)
/// with R(lambda) = (b - lambda)^{-1/2}.
struct GapDirection {
  double lambda = 0;
  double R = 0;
  Vector zeta;
  double h1_norm = 0;
  double linf = 0;
  double p_psi_h1 = 0;  // |P Psi_R|_H1, the Y-leakage removed by Q
};

inline double gap_direction_radius(double lambda, double b) {
  if (!(lambda < b)) throw Error("domain", "lambda must lie below the upper edge");
  return 1.0 / std::sqrt(b - lambda);
}

inline GapDirection gap_direction(double lambda, const SpectralSplit& split,
                                  const BlochWave& wave, const Cutoff& eta,
                                  const DiscreteOperator& op) {
  const double b = split.b_edge();
  if (!(split.a_edge() < lambda && lambda < b))
    throw Error("domain", "lambda outside the gap");
  GapDirection d;
  d.lambda = lambda;
  d.R = gap_direction_radius(lambda, b);
  BlochPacket pk = make_psi_R(wave, eta, d.R, op.grid());
  Vector p_part = split.apply_P(pk.values);
  d.zeta = pk.values - p_part;
  d.h1_norm = op.h1_norm(d.zeta);
  d.linf = d.zeta.cwiseAbs().maxCoeff();
  d.p_psi_h1 = op.h1_norm(p_part);
  // zeta must lie in Z: projector algebra makes the leakage pure round-off
  Vector leak = split.apply_P(d.zeta);
  if (op.h1_norm(leak) > 1e-8 * std::max(d.h1_norm, 1e-300))
    throw Error("projector", "gap direction leaks outside Z");
  return d;
}

}  // namespace gaplab
