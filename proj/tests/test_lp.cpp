#include "gaplab/gap_problem.hpp"
#include "gaplab/lp_check.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gaplab;

namespace {
struct Lab {
  GapProblem prob = make_gap_problem(PeriodicPotential::mathieu(1.0), 32, 64, 0, 0.5, 16);
  const GapProblem::Workspace& ws = prob.workspace(16);
  const SpectralSplit& sp = ws.split();
};
}  // namespace

TEST_CASE("projection ratio fixed points at p = 2") {
  Lab lab;
  Rng rng(3);
  Vector y = lab.sp.random_Y(rng);
  CHECK(lp_projection_ratio(lab.sp, lab.ws.op, y, 2.0) == Catch::Approx(1.0).margin(1e-10));
  Vector z = lab.sp.apply_Q(rng.gaussian_vector(lab.ws.grid.n));
  CHECK(lp_projection_ratio(lab.sp, lab.ws.op, z, 2.0) < 1e-9);
  // orthogonal projector never expands the L2 norm
  for (int t = 0; t < 20; ++t) {
    Vector v = rng.gaussian_vector(lab.ws.grid.n);
    CHECK(lp_projection_ratio(lab.sp, lab.ws.op, v, 2.0) <= 1.0 + 1e-10);
  }
  Vector zero = Vector::Zero(lab.ws.grid.n);
  CHECK_THROWS_AS(lp_projection_ratio(lab.sp, lab.ws.op, zero, 2.0), Error);
}

TEST_CASE("probes resample identically across grids") {
  Lab lab;
  LpProbeSet probes = LpProbeSet::make(99, kPi);
  REQUIRE(!probes.probes.empty());
  Grid1D coarse = Grid1D::make(16, 32), fine = Grid1D::make(16, 64);
  for (const auto& pd : probes.probes) {
    Vector uc = pd.sample(coarse), uf = pd.sample(fine);
    CHECK(uc.size() * 2 == uf.size());
    for (int i = 0; i < coarse.n; ++i) CHECK(uf[2 * i] == Catch::Approx(uc[i]).margin(1e-14));
  }
}

TEST_CASE("translate probes are lattice shifts of one bump") {
  LpProbeSet probes = LpProbeSet::make(7, kPi);
  Grid1D g = Grid1D::make(16, 32);
  std::vector<const ProbeDescriptor*> translates;
  for (const auto& p : probes.probes)
    if (p.kind == ProbeDescriptor::Kind::translate) translates.push_back(&p);
  REQUIRE(translates.size() >= 2);
  Vector u0 = translates[0]->sample(g), u1 = translates[1]->sample(g);
  const int shift = int(std::lround((translates[1]->center - translates[0]->center) *
                                    g.points_per_cell));
  double worst = 0;
  for (int i = 0; i + shift < g.n; ++i) worst = std::max(worst, std::abs(u1[i + shift] - u0[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("translation near-invariance of the projection ratio") {
  Lab lab;
  LpProbeSet probes = LpProbeSet::make(7, kPi);
  const ProbeDescriptor* base = nullptr;
  std::vector<const ProbeDescriptor*> translates;
  for (const auto& p : probes.probes)
    if (p.kind == ProbeDescriptor::Kind::translate) {
      if (!base) base = &p;
      else translates.push_back(&p);
    }
  REQUIRE(base);
  const double r0 = lp_projection_ratio(lab.sp, lab.ws.op, base->sample(lab.ws.grid), 4.0);
  for (const auto* t : translates) {
    const double rt = lp_projection_ratio(lab.sp, lab.ws.op, t->sample(lab.ws.grid), 4.0);
    // the discrete operator commutes with whole-cell shifts; boundary effects
    // are exponentially small for these compactly centered bumps
    CHECK(rt == Catch::Approx(r0).margin(1e-6));
  }
}

TEST_CASE("riesz projector on a diagonal two-level matrix") {
  Matrix A = Vector{{-1.0, 1.0}}.asDiagonal();
  ContourSpec c;
  c.left = -2.0;
  c.right = 0.0;
  c.half_height = 1.0;
  c.nodes_per_side = 32;
  Matrix P = riesz_apply_dense(A, c, Matrix::Identity(2, 2));
  CHECK(P(0, 0) == Catch::Approx(1.0).margin(1e-10));
  CHECK(P(1, 1) == Catch::Approx(0.0).margin(1e-10));
  CHECK(std::abs(P(0, 1)) < 1e-12);
}

TEST_CASE("riesz projector matches the eigenbasis projector on the operator") {
  Lab lab;
  Rng rng(17);
  ContourSpec c = make_contour(lab.sp, 128);
  Matrix U(lab.ws.grid.n, 8);
  for (int k = 0; k < 8; ++k) U.col(k) = rng.gaussian_vector(lab.ws.grid.n);
  Matrix PU = riesz_apply(lab.ws.op, c, U);
  for (int k = 0; k < 8; ++k) {
    Vector diff = PU.col(k) - lab.sp.apply_P(U.col(k));
    CHECK(lab.ws.op.l2_norm(diff) <= 1e-8 * lab.ws.op.l2_norm(U.col(k)));
  }
  // quadrature-level idempotence
  Matrix P2 = riesz_apply(lab.ws.op, c, PU);
  for (int k = 0; k < 8; ++k) {
    Vector diff = P2.col(k) - PU.col(k);
    CHECK(lab.ws.op.l2_norm(diff) <= 1e-8 * std::max(1.0, lab.ws.op.l2_norm(PU.col(k))));
  }
}

TEST_CASE("doubling contour nodes shrinks the disagreement") {
  Lab lab;
  Rng rng(19);
  Matrix U(lab.ws.grid.n, 4);
  for (int k = 0; k < 4; ++k) U.col(k) = rng.gaussian_vector(lab.ws.grid.n);
  auto err = [&](int nodes) {
    ContourSpec c = make_contour(lab.sp, nodes);
    Matrix PU = riesz_apply(lab.ws.op, c, U);
    double worst = 0;
    for (int k = 0; k < 4; ++k)
      worst = std::max(worst, lab.ws.op.l2_norm(Vector(PU.col(k) - lab.sp.apply_P(U.col(k)))) /
                                  lab.ws.op.l2_norm(U.col(k)));
    return worst;
  };
  const double e16 = err(16), e32 = err(32), e64 = err(64);
  CHECK(e32 < e16);
  CHECK(e64 < e32);
}

TEST_CASE("direct sum: reconstruction and transversality") {
  Lab lab;
  LpProbeSet probes = LpProbeSet::make(23, lab.prob.wave.k_star);
  Rng rng(29);
  SumReport s2 = lp_direct_sum_check(lab.sp, lab.ws.op, probes, 2.0, rng);
  CHECK(s2.reconstruction_max <= 1e-10);
  CHECK(s2.margin == Catch::Approx(std::sqrt(2.0)).margin(1e-8));
  SumReport s4 = lp_direct_sum_check(lab.sp, lab.ws.op, probes, 4.0, rng);
  CHECK(s4.reconstruction_max <= 1e-10);
  CHECK(s4.margin > 0.0);
}

TEST_CASE("continuity scan is stable on the default configuration") {
  Lab lab;
  LpProbeSet probes = LpProbeSet::make(31, lab.prob.wave.k_star);
  PropertyReport rep = lp_continuity_scan(lab.prob.potential, 32, 16, probes,
                                          {2.0, 4.0, std::numeric_limits<double>::infinity()});
  CHECK(rep.pass());
}
