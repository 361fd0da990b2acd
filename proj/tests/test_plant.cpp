#include "phia/manipulator.hpp"
#include "phia/plant.hpp"
#include "phia/sim.hpp"
#include "test_support.hpp"

#include <catch2/catch.hpp>

using namespace phia;

namespace {

StructureMatrices zero_structure(Index m, Index s) {
  StructureMatrices z;
  z.Jaa = Mat::Zero(m, m);
  z.Jau = Mat::Zero(m, s);
  z.Juu = Mat::Zero(s, s);
  z.Raa = Mat::Zero(m, m);
  z.Rau = Mat::Zero(m, s);
  z.Ruu = Mat::Zero(s, s);
  return z;
}

}  // namespace

TEST_CASE("validate_structure accepts zero J with identity R") {
  StructureMatrices s = zero_structure(1, 1);
  s.Raa = Mat::Identity(1, 1);
  s.Ruu = Mat::Identity(1, 1);
  const ValidationReport rep = validate_structure(s);
  REQUIRE(rep.all_pass());
  REQUIRE(rep.at("R_psd").margin == Approx(1.0).margin(1e-14));
  REQUIRE(rep.at("Jaa_skew").margin == 0.0);
}

TEST_CASE("validate_structure flags negative damping") {
  StructureMatrices s = zero_structure(1, 1);
  s.Raa = -Mat::Identity(1, 1);
  const ValidationReport rep = validate_structure(s);
  REQUIRE_FALSE(rep.all_pass());
  REQUIRE_FALSE(rep.at("R_psd").pass);
  REQUIRE(rep.at("R_psd").margin == Approx(-1.0).margin(1e-14));
}

TEST_CASE("validate_structure rejects mismatched blocks") {
  StructureMatrices s = zero_structure(2, 1);
  s.Rau = Mat::Zero(1, 2);  // wrong shape
  REQUIRE_THROWS_AS(validate_structure(s), Error);
  try {
    validate_structure(s);
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::dimension);
  }
}

TEST_CASE("manipulator damping with the negated friction sign is indefinite at rest") {
  ManipulatorParams prm;
  prm.friction_sign = FrictionSign::negated;
  const PhPlant plant = build_plant(prm);
  const StructureMatrices s = plant.structure({Vec::Zero(2), prm.qd});  // qdot = 0

  const ValidationReport rep = validate_structure(s);
  REQUIRE_FALSE(rep.at("R_psd").pass);

  // eigenvalue oracle on the assembled 4x4 damping matrix
  Eigen::SelfAdjointEigenSolver<Mat> es(s.assemble_R());
  REQUIRE(rep.at("R_psd").margin == Approx(es.eigenvalues().minCoeff()).margin(1e-12));
  REQUIRE(rep.at("R_psd").margin == Approx(-11.557900792370612).margin(1e-9));

  // the dissipative convention passes at the same state
  ManipulatorParams psd = prm;
  psd.friction_sign = FrictionSign::psd;
  REQUIRE(validate_structure(build_plant(psd).structure({Vec::Zero(2), psd.qd})).all_pass());
}

TEST_CASE("plant field vanishes at equilibrium when the input cancels the disturbance") {
  std::mt19937 rng(11);
  const PhPlant p = test::random_quadratic_plant(rng, 2, 2);
  const Vec d = test::random_vec(rng, 2);
  const auto [xa_dot, xu_dot] = plant_vector_field(p, p.x_star, d, d);
  REQUIRE(xa_dot.cwiseAbs().maxCoeff() <= 1e-14);
  REQUIRE(xu_dot.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("plant field reduces to damped gradient flow") {
  QuadraticPlantParams prm;
  prm.dims = {1, 1};
  prm.Raa = Mat::Identity(1, 1);
  prm.Ruu = Mat::Identity(1, 1);
  std::mt19937 rng(12);
  prm.Q = test::random_spd(rng, 2);
  const PhPlant p = build_quadratic_plant(prm);

  const PlantState x{Vec::Constant(1, 0.7), Vec::Constant(1, -0.4)};
  const GradH g = p.grad_hamiltonian(x);
  const auto [xa_dot, xu_dot] =
      plant_vector_field(p, x, Vec::Zero(1), Vec::Zero(1));
  REQUIRE(test::max_abs_diff(xa_dot, Vec(-g.a)) <= 1e-15);
  REQUIRE(test::max_abs_diff(xu_dot, Vec(-g.u)) <= 1e-15);
}

TEST_CASE("manipulator field at rest is driven by the shaping spring alone") {
  ManipulatorParams prm;
  const PhPlant p = build_plant(prm);
  const PlantState x{Vec::Zero(2), Vec::Zero(2)};  // p = 0, q = 0
  const auto [p_dot, q_dot] = plant_vector_field(p, x, Vec::Zero(2), Vec::Zero(2));
  // -grad_q H = -Kp (q - qd) = (600, 400)
  REQUIRE(p_dot(0) == Approx(600.0).margin(1e-10));
  REQUIRE(p_dot(1) == Approx(400.0).margin(1e-10));
  REQUIRE(q_dot.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("plant output is the actuated gradient block") {
  std::mt19937 rng(13);
  const PhPlant p = test::random_quadratic_plant(rng, 2, 1);
  REQUIRE(plant_output(p, p.x_star).cwiseAbs().maxCoeff() <= 1e-15);

  QuadraticPlantParams prm;
  prm.dims = {2, 0};
  const PhPlant ident = build_quadratic_plant(prm);
  const Vec y = plant_output(ident, {Vec{{1.0, 2.0}}, Vec(0)});
  REQUIRE(y(0) == 1.0);
  REQUIRE(y(1) == 2.0);

  ManipulatorParams mprm;
  const PhPlant manip = build_plant(mprm);
  const Eigen::Vector2d qdot(0.3, -0.2);
  const Eigen::Vector2d q(0.4, 1.1);
  const Vec pm = mass_matrix(mprm, q) * qdot;
  const Vec out = plant_output(manip, {pm, q});
  REQUIRE(test::max_abs_diff(out, qdot) <= 1e-13);
}

TEST_CASE("analytic gradients match central differences at random states") {
  std::mt19937 rng(14);
  for (int trial = 0; trial < 4; ++trial) {
    const Index m = 1 + trial % 3, s = trial % 2;
    const PhPlant p = test::random_quadratic_plant(rng, m, s);
    for (int i = 0; i < 30; ++i) {
      const PlantState x = test::random_state(rng, p.dims, 2.0);
      Vec stacked(p.dims.n());
      stacked << x.a, x.u;
      const Vec fd = central_gradient(
          [&](const Vec& v) {
            return p.hamiltonian({v.head(p.dims.m), v.tail(p.dims.s)});
          },
          stacked, 1e-6);
      const GradH g = p.grad_hamiltonian(x);
      Vec an(p.dims.n());
      an << g.a, g.u;
      const double denom = std::max(1.0, an.cwiseAbs().maxCoeff());
      REQUIRE((fd - an).cwiseAbs().maxCoeff() / denom <= 1e-5);
    }
  }
}

TEST_CASE("energy is conserved without damping and input") {
  std::mt19937 rng(15);
  const PhPlant p = test::random_quadratic_plant(rng, 2, 2, /*damped=*/false);
  const PlantState x0 = test::random_state(rng, p.dims, 1.0);
  Vec y0(p.dims.n());
  y0 << x0.a, x0.u;
  const Vec zero = Vec::Zero(p.dims.m);
  auto field = [&](double, const Vec& y) {
    const auto [da, du] =
        plant_vector_field(p, {y.head(p.dims.m), y.tail(p.dims.s)}, zero, zero);
    Vec out(p.dims.n());
    out << da, du;
    return out;
  };
  const auto [times, states] = integrate_field(field, y0, {1e-3, 10.0});
  const double h0 = p.hamiltonian(x0);
  const Vec yT = states.row(states.rows() - 1).transpose();
  const double hT = p.hamiltonian({yT.head(p.dims.m), yT.tail(p.dims.s)});
  REQUIRE(std::abs(hT - h0) / std::abs(h0) <= 1e-6);
}

TEST_CASE("energy is non-increasing with damping") {
  std::mt19937 rng(16);
  const PhPlant p = test::random_quadratic_plant(rng, 2, 1, /*damped=*/true);
  const PlantState x0 = test::random_state(rng, p.dims, 1.0);
  Vec y0(p.dims.n());
  y0 << x0.a, x0.u;
  const Vec zero = Vec::Zero(p.dims.m);
  auto field = [&](double, const Vec& y) {
    const auto [da, du] =
        plant_vector_field(p, {y.head(p.dims.m), y.tail(p.dims.s)}, zero, zero);
    Vec out(p.dims.n());
    out << da, du;
    return out;
  };
  const auto [times, states] = integrate_field(field, y0, {1e-3, 5.0});
  double prev = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < states.rows(); ++k) {
    const Vec y = states.row(k).transpose();
    const double h = p.hamiltonian({y.head(p.dims.m), y.tail(p.dims.s)});
    REQUIRE(h <= prev + 1e-9);
    prev = h;
  }
}

TEST_CASE("disturbance schedule holds values between switches") {
  DisturbanceSignal d;
  d.m = 1;
  d.steps.push_back({1.0, Vec::Constant(1, 2.0)});
  d.steps.push_back({3.0, Vec::Constant(1, -1.0)});
  d.validate();
  REQUIRE(d.value_at(0.0)(0) == 0.0);
  REQUIRE(d.value_at(1.0)(0) == 2.0);
  REQUIRE(d.value_at(2.5)(0) == 2.0);
  REQUIRE(d.value_at(3.0)(0) == -1.0);
  REQUIRE(d.value_at(100.0)(0) == -1.0);

  DisturbanceSignal bad = d;
  std::swap(bad.steps[0], bad.steps[1]);
  REQUIRE_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("non-finite gradient raises a numeric error") {
  PhPlant p;
  p.dims = {1, 0};
  p.hamiltonian = [](const PlantState&) { return 0.0; };
  p.grad_hamiltonian = [](const PlantState&) {
    return GradH{Vec::Constant(1, std::numeric_limits<double>::quiet_NaN()), Vec(0)};
  };
  p.structure = [](const PlantState&) {
    StructureMatrices s = zero_structure(1, 0);
    return s;
  };
  p.x_star = {Vec::Zero(1), Vec(0)};
  try {
    plant_vector_field(p, p.x_star, Vec::Zero(1), Vec::Zero(1));
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::numeric);
  }
}
