#include "gaplab/energy.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gaplab;

namespace {
struct Fixture {
  DiscreteOperator op{Grid1D::make(8, 16), PeriodicPotential::mathieu(1.0).shifted_by(-9.86)};
  Nonlinearity nl = Nonlinearity::pure_power(4.0, PeriodicWeight::one_plus_cos());
  EnergyModel model{op, nl};
};
}  // namespace

TEST_CASE("zero function has zero energy and gradient") {
  Fixture f;
  Vector u = Vector::Zero(f.op.grid().n);
  CHECK(f.model.value(u, 0.3) == 0.0);
  CHECK(f.model.gradient(u, 0.3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("energy reduces to the quadratic form without the nonlinear part") {
  // a constant weight would still contribute; compare against the form directly
  Fixture f;
  Rng rng(2);
  Vector u = rng.gaussian_vector(f.op.grid().n);
  const double lambda = -0.4;
  CHECK(f.model.value(u, lambda) ==
        Catch::Approx(0.5 * f.op.quadratic_form(u, lambda) - f.model.nonlinear_sum(u)));
}

TEST_CASE("gradient matches central differences") {
  Fixture f;
  Rng rng(4);
  const double eps = 1e-5, lambda = 0.2;
  for (int k = 0; k < 20; ++k) {
    Vector u = 0.5 * rng.gaussian_vector(f.op.grid().n);
    Vector v = rng.gaussian_vector(f.op.grid().n);
    v /= f.op.l2_norm(v);
    const double fd =
        (f.model.value(u + eps * v, lambda) - f.model.value(u - eps * v, lambda)) /
        (2.0 * eps);
    const double ip = f.op.dot(f.model.gradient(u, lambda), v);
    CHECK(std::abs(fd - ip) <= 1e-6 * std::max(1.0, std::abs(ip)));
  }
}

TEST_CASE("hessian matches gradient differences") {
  Fixture f;
  Rng rng(6);
  const double eps = 1e-6, lambda = 0.1;
  Vector u = 0.3 * rng.gaussian_vector(f.op.grid().n);
  Vector v = rng.gaussian_vector(f.op.grid().n);
  v /= f.op.l2_norm(v);
  Vector fd = (f.model.gradient(u + eps * v, lambda) - f.model.gradient(u - eps * v, lambda)) /
              (2.0 * eps);
  Vector hv = f.model.hessian(u, lambda) * v;
  CHECK((fd - hv).cwiseAbs().maxCoeff() < 1e-5 * (1.0 + hv.cwiseAbs().maxCoeff()));
}

TEST_CASE("energy identity: E - (1/2)<grad, u> equals the virial sum") {
  Fixture f;
  Rng rng(8);
  for (int k = 0; k < 10; ++k) {
    Vector u = rng.gaussian_vector(f.op.grid().n);
    const double lambda = rng.uniform(-0.5, 0.5);
    const double lhs =
        f.model.value(u, lambda) - 0.5 * f.op.dot(f.model.gradient(u, lambda), u);
    CHECK(std::abs(lhs - f.model.virial_sum(u)) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    // superquadraticity makes the virial sum dominate the nonlinear mass
    CHECK(f.model.virial_sum(u) >=
          (f.nl.alpha() / 2.0 - 1.0) * f.model.nonlinear_sum(u) - 1e-10);
    CHECK(f.model.virial_sum(u) >= -1e-12);
  }
}

TEST_CASE("minorant family drives the same machinery") {
  DiscreteOperator op(Grid1D::make(8, 16), PeriodicPotential::mathieu(1.0).shifted_by(-9.86));
  Nonlinearity nl = Nonlinearity::minorant(3.0, 4.0, PeriodicWeight::constant(1.0));
  EnergyModel model(op, nl);
  Rng rng(10);
  const double eps = 1e-5, lambda = 0.0;
  for (int k = 0; k < 5; ++k) {
    Vector u = 0.5 * rng.gaussian_vector(op.grid().n);
    Vector v = rng.gaussian_vector(op.grid().n);
    v /= op.l2_norm(v);
    const double fd =
        (model.value(u + eps * v, lambda) - model.value(u - eps * v, lambda)) / (2.0 * eps);
    const double ip = op.dot(model.gradient(u, lambda), v);
    CHECK(std::abs(fd - ip) <= 1e-6 * std::max(1.0, std::abs(ip)));
  }
}
