#include "gaplab/fd_operator.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gaplab;

namespace {
DiscreteOperator make_op(int cells = 8, int m = 16, double q = 1.0) {
  return DiscreteOperator(Grid1D::make(cells, m), PeriodicPotential::mathieu(q));
}
}  // namespace

TEST_CASE("grid geometry") {
  Grid1D g = Grid1D::make(8, 16);
  CHECK(g.n == 128);
  CHECK(g.h == 1.0 / 16);
  CHECK(g.x(g.center) == 0.0);
  CHECK(g.cell_offset(g.center) == 0);  // x = 0 sits on a cell boundary
  CHECK(g.wrap(-1) == g.n - 1);
  CHECK_THROWS_AS(Grid1D::make(0, 16), Error);
}

TEST_CASE("potential tables wrap exactly") {
  auto V = PeriodicPotential::mathieu(0.7);
  auto t = V.cell_table(32);
  Grid1D g = Grid1D::make(4, 32);
  DiscreteOperator op(g, V);
  for (int i = 0; i < g.n; ++i) CHECK(op.potential_at(i) == t[i % 32]);
  auto shifted = V.shifted_by(-2.0);
  auto ts = shifted.cell_table(32);
  for (int p = 0; p < 32; ++p) CHECK(ts[p] == t[p] - 2.0);
}

TEST_CASE("operator matrix is symmetric with periodic wrap") {
  DiscreteOperator op = make_op(4, 12);
  Matrix A = op.dense();
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(A(0, A.cols() - 1) != 0.0);
  // matvec agrees with the assembled matrix
  Rng rng(7);
  Vector u = rng.gaussian_vector(op.grid().n);
  CHECK((op.apply(u) - A * u).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("quadratic form matches the matrix pairing exactly") {
  DiscreteOperator op = make_op();
  Rng rng(11);
  for (int k = 0; k < 10; ++k) {
    Vector u = rng.gaussian_vector(op.grid().n);
    const double lhs = op.quadratic_form(u, 0.0);
    const double rhs = op.dot(op.apply(u), u);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("form is affine in lambda") {
  DiscreteOperator op = make_op();
  Rng rng(13);
  for (double lambda : {-1.5, 0.3, 2.0}) {
    Vector u = rng.gaussian_vector(op.grid().n);
    const double lhs = op.quadratic_form(u, lambda);
    const double rhs = op.quadratic_form(u, 0.0) - lambda * op.l2_norm2(u);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("form on an eigenvector is mu - lambda") {
  DiscreteOperator op = make_op(4, 12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.dense());
  const double h = op.grid().h;
  for (int j : {0, 5, 20}) {
    Vector v = es.eigenvectors().col(j) / std::sqrt(h);  // unit discrete L2 norm
    const double lambda = 0.37;
    CHECK(op.quadratic_form(v, lambda) ==
          Catch::Approx(es.eigenvalues()[j] - lambda).margin(1e-9));
  }
}

TEST_CASE("norms and mismatch errors") {
  DiscreteOperator op = make_op();
  Vector u = Vector::Ones(op.grid().n);
  CHECK(op.l2_norm(u) == Catch::Approx(std::sqrt(op.grid().length())));
  CHECK(op.lp_norm(u, std::numeric_limits<double>::infinity()) == 1.0);
  // constant function has zero gradient energy: |u|_H1 = |u|_L2
  CHECK(op.h1_norm(u) == Catch::Approx(op.l2_norm(u)));
  Vector bad = Vector::Ones(op.grid().n + 1);
  CHECK_THROWS_AS(op.apply(bad), Error);
  CHECK_THROWS_AS(op.quadratic_form(bad, 0.0), Error);
}

TEST_CASE("summation by parts is exact for the forward stencil") {
  DiscreteOperator op = make_op(6, 20, 0.3);
  Rng rng(17);
  Vector u = rng.gaussian_vector(op.grid().n);
  Vector du = op.forward_diff(u);
  const double grad_energy = op.grid().h * du.squaredNorm();
  double vterm = 0;
  for (int i = 0; i < op.grid().n; ++i) vterm += op.potential_at(i) * u[i] * u[i];
  vterm *= op.grid().h;
  CHECK(op.quadratic_form(u, 0.0) == Catch::Approx(grad_energy + vterm).margin(1e-11));
}
