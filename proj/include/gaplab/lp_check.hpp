#pragma once

#include "gaplab/bloch_wave.hpp"
#include "gaplab/fd_operator.hpp"
#include "gaplab/report.hpp"
#include "gaplab/split.hpp"
#include "gaplab/util.hpp"

#include <Eigen/SparseLU>

#include <complex>
#include <vector>

namespace gaplab {

// --- probe families ------------------------------------------------------------

/// L^p probes described analytically so the same function can be resampled
/// exactly on refined grids and doubled domains.
struct ProbeDescriptor {
  enum class Kind { bump, translate, packet };
  Kind kind = Kind::bump;
  double center = 0;    // in cells
  double width = 1;     // bump width in cells
  double momentum = 0;  // packet carrier, radians per cell
  double R = 1;         // packet scale

  Vector sample(const Grid1D& g) const {
    Vector u(g.n);
    Cutoff eta;
    for (int i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      switch (kind) {
        case Kind::bump:
        case Kind::translate: {
          const double t = (x - center) / width;
          u[i] = std::exp(-0.5 * t * t);
          break;
        }
        case Kind::packet:
          u[i] = eta(std::abs(x) / R) * std::cos(momentum * x) / std::sqrt(R);
          break;
      }
    }
    return u;
  }
};

struct LpProbeSet {
  std::vector<ProbeDescriptor> probes;
  std::uint64_t seed = 0;

  /// Random smooth bumps, lattice translates of one bump, scaled packets at
  /// the supplied carrier momentum. Centers stay within +-2 cells so every
  /// probe fits the smallest domain used by the scans.
  static LpProbeSet make(std::uint64_t seed, double packet_momentum, int n_bumps = 6) {
    LpProbeSet s;
    s.seed = seed;
    Rng rng(seed);
    for (int i = 0; i < n_bumps; ++i) {
      ProbeDescriptor d;
      d.kind = ProbeDescriptor::Kind::bump;
      d.center = rng.uniform(-2.0, 2.0);
      d.width = rng.uniform(0.4, 1.5);
      s.probes.push_back(d);
    }
    ProbeDescriptor base;
    base.center = -2.0;
    base.width = 0.7;
    for (int shift = 0; shift <= 3; ++shift) {
      ProbeDescriptor d = base;
      d.kind = ProbeDescriptor::Kind::translate;
      d.center = base.center + shift;
      s.probes.push_back(d);
    }
    for (double R : {1.0, 2.0}) {
      ProbeDescriptor d;
      d.kind = ProbeDescriptor::Kind::packet;
      d.momentum = packet_momentum;
      d.R = R;
      s.probes.push_back(d);
    }
    return s;
  }
};

// --- projection ratios -----------------------------------------------------------

inline double lp_projection_ratio(const SpectralSplit& split, const DiscreteOperator& op,
                                  const Vector& u, double p) {
  const double nu = op.lp_norm(u, p);
  if (!(nu > 0)) throw Error("zero-input", "probe vanishes identically");
  return op.lp_norm(split.apply_P(u), p) / nu;
}

/// Probe-set maxima of |Pu|_p/|u|_p at the base resolution, one grid
/// refinement (2m) and one domain doubling (2L). "Continuity" at desk scale
/// means those maxima do not grow by more than 1.5x under either move.
inline PropertyReport lp_continuity_scan(const PeriodicPotential& shifted, int m,
                                         int cells, const LpProbeSet& probes,
                                         const std::vector<double>& ps, int jobs = 1) {
  struct Level {
    std::string name;
    int m, cells;
  };
  const std::vector<Level> levels = {
      {"base", m, cells}, {"refined", 2 * m, cells}, {"domain_doubled", m, 2 * cells}};

  PropertyReport rep;
  rep.title = "Lp continuity of the spectral projector";
  rep.columns = {"p", "base", "refined", "domain_doubled"};

  std::vector<std::vector<double>> maxima(levels.size(), std::vector<double>(ps.size(), 0));
  for (size_t li = 0; li < levels.size(); ++li) {
    Grid1D g = Grid1D::make(levels[li].cells, levels[li].m);
    DiscreteOperator op(g, shifted);
    SpectralSplit split = SpectralSplit::from_operator(op, jobs);
    for (const auto& pd : probes.probes) {
      Vector u = pd.sample(g);
      for (size_t pi = 0; pi < ps.size(); ++pi)
        maxima[li][pi] = std::max(maxima[li][pi], lp_projection_ratio(split, op, u, ps[pi]));
    }
  }
  for (size_t pi = 0; pi < ps.size(); ++pi)
    rep.rows.push_back({ps[pi], maxima[0][pi], maxima[1][pi], maxima[2][pi]});

  for (size_t pi = 0; pi < ps.size(); ++pi) {
    const std::string tag = "p=" + format_double(ps[pi]);
    if (ps[pi] == 2.0)
      rep.verdicts.push_back(upper_bound_verdict("orthogonal baseline " + tag,
                                                 std::max({maxima[0][pi], maxima[1][pi],
                                                           maxima[2][pi]}),
                                                 1.0 + 1e-10));
    rep.verdicts.push_back(upper_bound_verdict("stable under refinement " + tag,
                                               maxima[1][pi] / maxima[0][pi], 1.5));
    rep.verdicts.push_back(upper_bound_verdict("stable under domain doubling " + tag,
                                               maxima[2][pi] / maxima[0][pi], 1.5));
  }
  return rep;
}

// --- Riesz contour projector -------------------------------------------------------

/// Rectangle contour around the negative part of the spectrum: left edge one
/// unit below the bottom, right edge crossing the gap at 0, half-height 1.
struct ContourSpec {
  double left = 0;
  double right = 0;
  double half_height = 1.0;
  int nodes_per_side = 128;
};

inline ContourSpec make_contour(const SpectralSplit& split, int nodes_per_side = 128) {
  ContourSpec c;
  c.left = split.min_eigenvalue() - 1.0;
  c.right = 0.0;
  c.nodes_per_side = nodes_per_side;
  for (double mu : split.spectrum()) {
    if (std::abs(mu - c.right) < 1e-6 || std::abs(mu - c.left) < 1e-6)
      throw Error("contour", "contour crosses the real axis too close to the spectrum");
  }
  return c;
}

namespace detail {

inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = -p1 / dp;
      t += dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

/// Quadrature nodes (z, weight*dz) of the counterclockwise rectangle,
/// Gauss-Legendre per side (the integrand is analytic along each side, so
/// the per-side rule converges geometrically; a corner-limited trapezoid
/// would not reach projector-level accuracy at sane node counts).
inline std::vector<std::pair<std::complex<double>, std::complex<double>>> contour_nodes(
    const ContourSpec& c) {
  using C = std::complex<double>;
  const C corners[4] = {C(c.left, -c.half_height), C(c.right, -c.half_height),
                        C(c.right, c.half_height), C(c.left, c.half_height)};
  std::vector<double> gx, gw;
  gauss_legendre(c.nodes_per_side, gx, gw);
  std::vector<std::pair<C, C>> nodes;
  nodes.reserve(4 * c.nodes_per_side);
  for (int s = 0; s < 4; ++s) {
    const C z0 = corners[s], z1 = corners[(s + 1) % 4];
    for (int k = 0; k < c.nodes_per_side; ++k) {
      const double t = 0.5 * (gx[k] + 1.0);
      nodes.emplace_back(z0 + t * (z1 - z0), 0.5 * gw[k] * (z1 - z0));
    }
  }
  return nodes;
}

}  // namespace detail

/// P U = (1/2 pi i) contour-integral of (z - A)^{-1} U dz, columns at once.
/// One complex factorization per node, reused across the right-hand sides.
inline Matrix riesz_apply(const DiscreteOperator& op, const ContourSpec& c,
                          const Matrix& U, int jobs = 1) {
  using C = std::complex<double>;
  const auto nodes = detail::contour_nodes(c);
  const Eigen::SparseMatrix<double> A = op.sparse();
  Eigen::SparseMatrix<C> Ac = A.cast<C>();
  const int n = int(U.rows());

  std::vector<ComplexMatrix> partial(nodes.size());
  parallel_for(int(nodes.size()), jobs, [&](int k) {
    Eigen::SparseMatrix<C> M = -Ac;
    for (int i = 0; i < n; ++i) M.coeffRef(i, i) += nodes[k].first;
    Eigen::SparseLU<Eigen::SparseMatrix<C>> lu(M);
    if (lu.info() != Eigen::Success)
      throw Error("contour", "resolvent solve failed at node " + std::to_string(k) +
                                 "; move the contour away from the spectrum");
    partial[k] = nodes[k].second * lu.solve(U.cast<C>()).eval();
  });
  ComplexMatrix acc = ComplexMatrix::Zero(U.rows(), U.cols());
  for (const auto& m : partial) acc += m;
  acc /= C(0.0, 2.0 * kPi);
  return acc.real();
}

/// Dense variant for small algebra oracles.
inline Matrix riesz_apply_dense(const Matrix& A, const ContourSpec& c, const Matrix& U) {
  using C = std::complex<double>;
  const auto nodes = detail::contour_nodes(c);
  ComplexMatrix acc = ComplexMatrix::Zero(U.rows(), U.cols());
  ComplexMatrix Ac = A.cast<C>();
  for (const auto& [z, wdz] : nodes) {
    ComplexMatrix M = -Ac;
    for (int i = 0; i < A.rows(); ++i) M(i, i) += z;
    acc += wdz * M.partialPivLu().solve(U.cast<C>());
  }
  acc /= C(0.0, 2.0 * kPi);
  return acc.real();
}

// --- direct sum in Lp ---------------------------------------------------------------

/// (i) reconstruction u = Pu + Qu holds to round-off in |.|_p;
/// (ii) transversality: normalized pairs y in Y, z in Z stay |y - z|_p-separated.
struct SumReport {
  double p = 2;
  double reconstruction_max = 0;
  double margin = 0;
  bool pass = false;
};

inline SumReport lp_direct_sum_check(const SpectralSplit& split, const DiscreteOperator& op,
                                     const LpProbeSet& probes, double p, Rng& rng,
                                     int pairs = 100) {
  SumReport r;
  r.p = p;
  for (const auto& pd : probes.probes) {
    Vector u = pd.sample(op.grid());
    Vector resid = u - split.apply_P(u) - split.apply_Q(u);
    r.reconstruction_max =
        std::max(r.reconstruction_max, op.lp_norm(resid, p) / op.lp_norm(u, p));
  }
  r.margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < pairs; ++k) {
    Vector y = split.random_Y(rng);
    Vector z = split.apply_Q(rng.gaussian_vector(op.grid().n));
    const double ny = op.lp_norm(y, p), nz = op.lp_norm(z, p);
    if (!(ny > 0) || !(nz > 0)) continue;
    r.margin = std::min(r.margin, op.lp_norm(y / ny - z / nz, p));
  }
  r.pass = r.reconstruction_max <= 1e-10 && r.margin > 0;
  return r;
}

}  // namespace gaplab
