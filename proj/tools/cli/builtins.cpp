#include "cli/builtins.hpp"

#include "cli/spec_file.hpp"

namespace dofoc::cli {

const std::vector<std::string>& builtin_problem_names() {
  static const std::vector<std::string> names{"paper_example_sec4", "zero_dynamics",
                                              "classical_limit_lq"};
  return names;
}

DynamicsMaps builtin_dynamics(const std::string& name, int state_dim, int control_dim) {
  if (name == "zero") {
    return {[state_dim](double, const Vector&, const Vector&) { return Vector(Vector::Zero(state_dim)); },
            [state_dim](double, const Vector&, const Vector&) {
              return Matrix(Matrix::Zero(state_dim, state_dim));
            },
            true};
  }
  if (name == "bilinear") {
    if (state_dim != control_dim) throw SpecError("dynamics", "bilinear dynamics need as many controls as states");
    return {[](double, const Vector& x, const Vector& u) { return Vector(u.cwiseProduct(x)); },
            [](double, const Vector&, const Vector& u) { return Matrix(u.asDiagonal()); }, true};
  }
  throw SpecError("dynamics", "unknown builtin dynamics '" + name + "'");
}

CostMaps builtin_cost(const std::string& name, int state_dim, int control_dim) {
  if (name == "harvest") {
    if (state_dim != control_dim) throw SpecError("cost", "harvest cost needs as many controls as states");
    return {[](double, const Vector& x, const Vector& u) {
              return (Vector::Ones(x.size()) - 3.0 * u).dot(x);
            },
            [](double, const Vector&, const Vector& u) {
              return Vector(Vector::Ones(u.size()) - 3.0 * u);
            },
            true};
  }
  if (name == "control_energy") {
    return {[](double, const Vector&, const Vector& u) { return -u.squaredNorm(); },
            [state_dim](double, const Vector&, const Vector&) { return Vector(Vector::Zero(state_dim)); },
            false};
  }
  throw SpecError("cost", "unknown builtin cost '" + name + "'");
}

ControlProblem builtin_problem(const std::string& name, int quad_order) {
  if (name == "paper_example_sec4") {
    const DynamicsMaps f = builtin_dynamics("bilinear", 1, 1);
    const CostMaps L = builtin_cost("harvest", 1, 1);
    return ControlProblem{name, 1, 1, f.f, f.f_x, L.L, L.L_x,
                          ControlBox{Vector::Constant(1, 0.0), Vector::Constant(1, 2.0)},
                          Vector::Constant(1, 1.0), 1.0, 5.0,
                          build_distribution(polynomial_weight({0.0, 1.0 / 3.0}), quad_order), true,
                          std::nullopt};
  }
  if (name == "zero_dynamics") {
    const DynamicsMaps f = builtin_dynamics("zero", 1, 1);
    const CostMaps L = builtin_cost("control_energy", 1, 1);
    return ControlProblem{name, 1, 1, f.f, f.f_x, L.L, L.L_x,
                          ControlBox{Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
                          Vector::Constant(1, 1.0), 0.0, 1.0,
                          build_distribution(polynomial_weight({1.0}), quad_order), false,
                          std::nullopt};
  }
  if (name == "classical_limit_lq") {
    return ControlProblem{
        name, 1, 1,
        [](double, const Vector& x, const Vector& u) { return Vector(0.5 * x + u); },
        [](double, const Vector&, const Vector&) { return Matrix(Matrix::Constant(1, 1, 0.5)); },
        [](double, const Vector& x, const Vector& u) { return -0.5 * (x.squaredNorm() + u.squaredNorm()); },
        [](double, const Vector& x, const Vector&) { return Vector(-x); },
        ControlBox{Vector::Constant(1, -10.0), Vector::Constant(1, 10.0)},
        Vector::Constant(1, 1.0), 0.0, 1.0,
        build_bump_distribution(Bump{1.0, 1e-3}, quad_order), false, std::nullopt};
  }
  throw SpecError("builtin", "unknown builtin problem '" + name + "'");
}

}  // namespace dofoc::cli
