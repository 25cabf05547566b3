#include "gaplab/bands.hpp"
#include "gaplab/split.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gaplab;

TEST_CASE("free bands fold and start at zero") {
  BandStructure bs = bloch_bands(PeriodicPotential::zero(), 4, 32, 32);
  // lowest eigenvalue at k = 0 is the constant mode
  int i0 = -1;
  for (int i = 0; i < bs.n_k(); ++i)
    if (bs.k[i] == 0.0) i0 = i;
  REQUIRE(i0 >= 0);
  CHECK(std::abs(bs.energies(i0, 0)) < 1e-9);
  // discrete folded dispersion: eigenvalues at momentum k are
  // (2 - 2 cos((k + 2 pi l)/m)) / h^2 for integer l
  const int m = 32;
  const double h = 1.0 / m;
  for (int i : {3, 17}) {
    double e0 = (2.0 - 2.0 * std::cos(bs.k[i] / m)) / (h * h);
    bool found = false;
    for (int j = 0; j < bs.n_bands(); ++j)
      found = found || std::abs(bs.energies(i, j) - e0) < 1e-7;
    CHECK(found);
  }
}

TEST_CASE("band symmetry under k -> -k") {
  BandStructure bs = bloch_bands(PeriodicPotential::mathieu(0.8), 4, 64, 32);
  for (int i = 1; i < bs.n_k(); ++i) {
    // the grid contains -k for every k except the endpoint -pi
    double k = bs.k[i];
    int im = -1;
    for (int j = 0; j < bs.n_k(); ++j)
      if (std::abs(bs.k[j] + k) < 1e-14) im = j;
    if (im < 0) continue;
    for (int j = 0; j < bs.n_bands(); ++j)
      CHECK(bs.energies(i, j) == Catch::Approx(bs.energies(im, j)).margin(1e-9));
  }
}

TEST_CASE("constant potential shifts every band rigidly") {
  BandStructure b0 = bloch_bands(PeriodicPotential::zero(), 4, 32, 32);
  BandStructure bc = bloch_bands(PeriodicPotential::constant(2.5), 4, 32, 32);
  double worst = 0;
  for (int i = 0; i < b0.n_k(); ++i)
    for (int j = 0; j < b0.n_bands(); ++j)
      worst = std::max(worst, std::abs(bc.energies(i, j) - b0.energies(i, j) - 2.5));
  CHECK(worst < 1e-12);
}

TEST_CASE("free operator has no interior gap") {
  BandStructure bs = bloch_bands(PeriodicPotential::zero(), 5, 64, 32);
  CHECK(find_gaps(bs, 1e-8).empty());
}

TEST_CASE("mathieu gap opens and grows with q") {
  BandStructure b1 = bloch_bands(PeriodicPotential::mathieu(0.05), 4, 64, 32);
  BandStructure b2 = bloch_bands(PeriodicPotential::mathieu(0.1), 4, 64, 32);
  auto g1 = find_gaps(b1, 1e-8), g2 = find_gaps(b2, 1e-8);
  REQUIRE(!g1.empty());
  REQUIRE(!g2.empty());
  CHECK(g1[0].band_below == 0);
  CHECK(g1[0].width() > 0);
  CHECK(g1[0].width() < g2[0].width());
  // first gap width tracks 2 q for small q
  CHECK(g1[0].width() == Catch::Approx(0.1).epsilon(0.2));
}

TEST_CASE("mathieu q=1 gap edges match a 4x momentum-resolution dense solve") {
  const int n_k = 64;
  BandStructure bs = bloch_bands(PeriodicPotential::mathieu(1.0), 4, n_k, 32);
  auto gaps = find_gaps(bs, 1e-8);
  REQUIRE(!gaps.empty());
  BandStructure fine = bloch_bands(PeriodicPotential::mathieu(1.0), 4, 4 * n_k, 32);
  auto fine_gaps = find_gaps(fine, 1e-8);
  REQUIRE(!fine_gaps.empty());
  CHECK(std::abs(gaps[0].a - fine_gaps[0].a) / std::abs(fine_gaps[0].a) < 1e-6);
  CHECK(std::abs(gaps[0].b - fine_gaps[0].b) / std::abs(fine_gaps[0].b) < 1e-6);
}

TEST_CASE("band spectrum matches a dense full-domain eigensolve") {
  // the momentum fibers of an L-cell domain must reproduce the full matrix
  // spectrum exactly: an independent check of the Bloch reduction
  const int L = 6, m = 12;
  auto V = PeriodicPotential::mathieu(0.9).shifted_by(-5.0);
  DiscreteOperator op(Grid1D::make(L, m), V);
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.dense());
  std::vector<double> from_fibers;
  const auto vt = V.cell_table(m);
  for (int j = 0; j <= L / 2; ++j) {
    CellModes cm = solve_cell_problem(vt, 1.0 / m, 2.0 * kPi * j / L);
    const int weight = (j == 0 || 2 * j == L) ? 1 : 2;
    for (int b = 0; b < m; ++b)
      for (int w = 0; w < weight; ++w) from_fibers.push_back(cm.values[b]);
  }
  std::sort(from_fibers.begin(), from_fibers.end());
  REQUIRE(int(from_fibers.size()) == L * m);
  for (int i = 0; i < L * m; ++i)
    CHECK(from_fibers[i] == Catch::Approx(es.eigenvalues()[i]).margin(1e-9));
}

TEST_CASE("shift_to_gap arithmetic") {
  SpectralGap g;
  g.a = 2;
  g.b = 3;
  auto [v1, s1] = shift_to_gap(PeriodicPotential::zero(), g);
  CHECK(s1.a == -0.5);
  CHECK(s1.b == 0.5);
  CHECK(v1.shift == -2.5);
  g.a = -1;
  g.b = 3;
  auto [v2, s2] = shift_to_gap(PeriodicPotential::zero(), g);
  CHECK(s2.a == -2.0);
  CHECK(s2.b == 2.0);
  // custom shift: 0 lands 10% below the top
  auto [v3, s3] = shift_to_gap(PeriodicPotential::zero(), g, 0.9);
  CHECK(s3.b == Catch::Approx(0.1 * g.width()));
  CHECK(s3.a == Catch::Approx(-0.9 * g.width()));
  (void)v2;
  (void)v3;
  CHECK_THROWS_AS(shift_to_gap(PeriodicPotential::zero(), g, 1.5), Error);
}

TEST_CASE("band residuals are validated") {
  CHECK_THROWS_AS(bloch_bands(PeriodicPotential::zero(), 1, 64, 32), Error);
  CHECK_THROWS_AS(bloch_bands(PeriodicPotential::zero(), 4, 4, 32), Error);
  CHECK_THROWS_AS(bloch_bands(PeriodicPotential::zero(), 64, 64, 32), Error);
}
