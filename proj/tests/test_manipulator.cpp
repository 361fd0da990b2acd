#include "phia/manipulator.hpp"
#include "phia/numerics.hpp"
#include "test_support.hpp"

#include <catch2/catch.hpp>

#include <cmath>

using namespace phia;

TEST_CASE("mass matrix values and bounds") {
  const ManipulatorParams prm;

  const Eigen::Matrix2d m0 = mass_matrix(prm, Eigen::Vector2d(0.0, 0.0));
  REQUIRE(m0(0, 0) == Approx(0.3917).margin(1e-12));
  REQUIRE(m0(0, 1) == Approx(0.1583).margin(1e-12));
  REQUIRE(m0(1, 0) == Approx(0.1583).margin(1e-12));
  REQUIRE(m0(1, 1) == Approx(0.0725).margin(1e-12));

  const Eigen::Matrix2d m90 = mass_matrix(prm, Eigen::Vector2d(0.3, M_PI / 2.0));
  REQUIRE(m90(0, 0) == Approx(prm.a1 + prm.a2).margin(1e-12));
  REQUIRE(m90(0, 1) == Approx(prm.a2).margin(1e-12));
  REQUIRE(m90(1, 1) == prm.a2);

  const double det_lo = prm.a1 * prm.a2 - prm.b * prm.b;
  const double det_hi = prm.a1 * prm.a2;
  REQUIRE(det_lo > 0.0033);
  for (int i = 0; i <= 200; ++i) {
    const double th2 = -2.0 * M_PI + 4.0 * M_PI * i / 200.0;
    const Eigen::Matrix2d m = mass_matrix(prm, Eigen::Vector2d(0.0, th2));
    const double det = m.determinant();
    REQUIRE(det >= det_lo - 1e-12);
    REQUIRE(det <= det_hi + 1e-12);
    REQUIRE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("shaped energy and its gradient") {
  const ManipulatorParams prm;

  SECTION("zero momentum leaves only the spring gradient") {
    const Eigen::Vector2d q(3.0, -1.0);
    const ManipulatorGrad g = manipulator_grad(prm, q, Eigen::Vector2d::Zero());
    REQUIRE(test::max_abs_diff(g.dq, Vec(prm.Kp * (q - prm.qd))) <= 1e-14);
    REQUIRE(g.dp.cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("the target configuration at rest is the global minimum") {
    REQUIRE(manipulator_hamiltonian(prm, prm.qd, Eigen::Vector2d::Zero()) == 0.0);
    std::mt19937 rng(61);
    for (int i = 0; i < 50; ++i) {
      const Eigen::Vector2d q = prm.qd + Eigen::Vector2d(test::random_vec(rng, 2, 2.0));
      const Eigen::Vector2d p(test::random_vec(rng, 2, 2.0));
      REQUIRE(manipulator_hamiltonian(prm, q, p) >= 0.0);
    }
  }

  SECTION("analytic gradient matches central differences") {
    std::mt19937 rng(62);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Eigen::Vector2d q = prm.qd + Eigen::Vector2d(test::random_vec(rng, 2, 3.0));
      const Eigen::Vector2d p(test::random_vec(rng, 2, 3.0));
      Vec z(4);
      z << q, p;
      const Vec fd = central_gradient(
          [&prm](const Vec& v) {
            return manipulator_hamiltonian(prm, v.head(2), v.tail(2));
          },
          z, 1e-6);
      const ManipulatorGrad g = manipulator_grad(prm, q, p);
      Vec an(4);
      an << g.dq, g.dp;
      worst = std::max(worst,
                       (fd - an).cwiseAbs().maxCoeff() / std::max(1.0, an.cwiseAbs().maxCoeff()));
    }
    REQUIRE(worst <= 1e-6);
  }
}

TEST_CASE("friction matrix") {
  const ManipulatorParams prm;

  SECTION("values at rest") {
    const Eigen::Matrix2d dp = friction_matrix(prm, Eigen::Vector2d::Zero());
    const double d = 2.0 / std::sqrt(0.1);
    REQUIRE(dp(0, 0) == Approx(2.0 * d).margin(1e-12));
    REQUIRE(dp(0, 1) == Approx(-d).margin(1e-12));
    REQUIRE(dp(1, 0) == Approx(-d).margin(1e-12));
    REQUIRE(dp(1, 1) == Approx(d).margin(1e-12));
    REQUIRE(dp(1, 1) == Approx(6.3245553203).margin(1e-9));
  }

  SECTION("positive semidefinite for every joint velocity") {
    for (double v1 = -12.0; v1 <= 12.0; v1 += 1.5) {
      for (double v2 = -12.0; v2 <= 12.0; v2 += 1.5) {
        const Eigen::Matrix2d dp = friction_matrix(prm, Eigen::Vector2d(v1, v2));
        REQUIRE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(dp).eigenvalues().minCoeff() >=
                -1e-12);
      }
    }
  }

  SECTION("zero magnitudes give zero friction") {
    ManipulatorParams frictionless = prm;
    frictionless.beta1 = frictionless.beta2 = 0.0;
    REQUIRE(max_abs(friction_matrix(frictionless, Eigen::Vector2d(1.0, -2.0))) == 0.0);
  }

  SECTION("coefficients vanish at high speed") {
    const Eigen::Matrix2d dp = friction_matrix(prm, Eigen::Vector2d(1e6, -1e6));
    REQUIRE(max_abs(dp) <= 1e-5);
  }

  SECTION("the negated convention flips every entry") {
    ManipulatorParams neg = prm;
    neg.friction_sign = FrictionSign::negated;
    const Eigen::Vector2d qdot(0.4, 1.3);
    REQUIRE(max_abs(friction_matrix(neg, qdot) + friction_matrix(prm, qdot)) == 0.0);
  }
}

TEST_CASE("friction bounds") {
  const ManipulatorParams prm;

  SECTION("supremum bound values and dominance") {
    const Eigen::Matrix2d dbar = friction_bound_supremum(prm);
    REQUIRE(dbar(1, 1) == Approx(6.3245553203).margin(1e-9));
    for (double v1 = -10.0; v1 <= 10.0; v1 += 1.0) {
      for (double v2 = -10.0; v2 <= 10.0; v2 += 1.0) {
        const Eigen::Matrix2d diff = dbar - friction_matrix(prm, Eigen::Vector2d(v1, v2));
        REQUIRE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(diff).eigenvalues().minCoeff() >=
                -1e-12);
      }
    }
  }

  SECTION("alpha-over-beta values") {
    const Eigen::Matrix2d dbar = friction_bound_alpha_over_beta(prm);
    REQUIRE(dbar(1, 1) == -0.05);
    REQUIRE(dbar(0, 0) == -0.1);
    REQUIRE(dbar(0, 1) == 0.05);
  }

  SECTION("alpha-over-beta is undefined for zero magnitudes") {
    ManipulatorParams zero = prm;
    zero.beta1 = 0.0;
    REQUIRE_THROWS_AS(friction_bound_alpha_over_beta(zero), Error);
    REQUIRE_NOTHROW(friction_bound_supremum(zero));
  }

  SECTION("friction_bound returns both candidates") {
    const FrictionBounds both = friction_bound(prm);
    REQUIRE(max_abs(both.supremum - friction_bound_supremum(prm)) == 0.0);
    REQUIRE(max_abs(both.alpha_over_beta - friction_bound_alpha_over_beta(prm)) == 0.0);
  }
}

TEST_CASE("the packaged plant reproduces the closed-form pieces") {
  const ManipulatorParams prm;
  const PhPlant plant = build_plant(prm);

  SECTION("rest at the target is an equilibrium") {
    const auto [pd, qd] =
        plant_vector_field(plant, plant.x_star, Vec::Zero(2), Vec::Zero(2));
    REQUIRE(pd.cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(qd.cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("the passive output is the joint velocity") {
    std::mt19937 rng(63);
    for (int i = 0; i < 20; ++i) {
      const Eigen::Vector2d q(test::random_vec(rng, 2, 2.0));
      const Eigen::Vector2d qdot(test::random_vec(rng, 2, 2.0));
      const Vec p = mass_matrix(prm, q) * qdot;
      REQUIRE(test::max_abs_diff(plant_output(plant, {p, q}), qdot) <= 1e-12);
    }
  }

  SECTION("structure validation passes in the dissipative convention") {
    std::mt19937 rng(64);
    for (int i = 0; i < 20; ++i) {
      const PlantState x = test::random_state(rng, plant.dims, 3.0);
      REQUIRE(validate_structure(plant.structure(x)).all_pass());
    }
  }

  SECTION("invalid inertia parameters are rejected") {
    ManipulatorParams bad = prm;
    bad.b = 0.2;  // a1 a2 < b²
    REQUIRE_THROWS_AS(build_plant(bad), Error);
  }
}
