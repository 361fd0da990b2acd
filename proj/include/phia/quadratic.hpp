#pragma once

#include "phia/plant.hpp"

namespace phia {

/// Linear test plant with quadratic energy H(x) = ½ (x − x*)ᵀ Q (x − x*) and
/// constant structure blocks. Handy for oracle tests and smoke scenarios;
/// every closed-form property of the framework is exact here.
struct QuadraticPlantParams {
  Dimensions dims;
  Mat Q;  // n x n symmetric positive definite; identity if empty
  Mat Jaa, Jau, Juu;
  Mat Raa, Rau, Ruu;
  Vec xa_star, xu_star;  // zero if empty
};

inline PhPlant build_quadratic_plant(QuadraticPlantParams prm) {
  require(prm.dims.valid(), ErrorCode::dimension, "quadratic plant needs m >= 1");
  const Index m = prm.dims.m, s = prm.dims.s, n = prm.dims.n();

  if (prm.Q.size() == 0) prm.Q = Mat::Identity(n, n);
  if (prm.Jaa.size() == 0) prm.Jaa = Mat::Zero(m, m);
  if (prm.Jau.size() == 0) prm.Jau = Mat::Zero(m, s);
  if (prm.Juu.size() == 0) prm.Juu = Mat::Zero(s, s);
  if (prm.Raa.size() == 0) prm.Raa = Mat::Zero(m, m);
  if (prm.Rau.size() == 0) prm.Rau = Mat::Zero(m, s);
  if (prm.Ruu.size() == 0) prm.Ruu = Mat::Zero(s, s);
  if (prm.xa_star.size() == 0) prm.xa_star = Vec::Zero(m);
  if (prm.xu_star.size() == 0) prm.xu_star = Vec::Zero(s);

  require(prm.Q.rows() == n && prm.Q.cols() == n, ErrorCode::dimension, "Q must be n x n");
  require(sym_residual(prm.Q) <= 1e-12 * std::max(1.0, max_abs(prm.Q)) &&
              min_symmetric_eigenvalue(prm.Q) > 0.0,
          ErrorCode::config, "Q must be symmetric positive definite");
  require(prm.xa_star.size() == m && prm.xu_star.size() == s, ErrorCode::dimension,
          "x_star blocks have wrong sizes");

  StructureMatrices structure{prm.Jaa, prm.Jau, prm.Juu, prm.Raa, prm.Rau, prm.Ruu};
  require(structure.dims_consistent(prm.dims), ErrorCode::dimension,
          "structure blocks do not match the declared dimensions");
  const ValidationReport rep = validate_structure(structure);
  if (!rep.all_pass()) {
    std::string detail;
    for (const auto& c : rep.checks)
      if (!c.pass) detail += " " + c.name;
    throw Error(ErrorCode::config, "quadratic plant structure invalid:" + detail);
  }

  Vec x_star(n);
  x_star << prm.xa_star, prm.xu_star;

  PhPlant plant;
  plant.dims = prm.dims;
  plant.hamiltonian = [Q = prm.Q, x_star, m, s](const PlantState& x) {
    Vec e(m + s);
    e << x.a, x.u;
    e -= x_star;
    return 0.5 * e.dot(Q * e);
  };
  plant.grad_hamiltonian = [Q = prm.Q, x_star, m, s](const PlantState& x) {
    Vec e(m + s);
    e << x.a, x.u;
    e -= x_star;
    const Vec g = Q * e;
    return GradH{g.head(m), g.tail(s)};
  };
  plant.structure = [structure](const PlantState&) { return structure; };
  plant.x_star = {prm.xa_star, prm.xu_star};
  return plant;
}

}  // namespace phia
