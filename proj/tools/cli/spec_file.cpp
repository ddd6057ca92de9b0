#include "cli/spec_file.hpp"

#include "cli/builtins.hpp"
#include "dofoc/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dofoc::cli {
namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw SpecError(section, section + " must be an object");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!known.count(item.key())) throw SpecError(section, "unknown key '" + item.key() + "' in " + section);
  }
}

const json& member(const json& obj, const std::string& section, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SpecError(section, std::string("missing key '") + key + "' in " + section);
  return *it;
}

double number(const json& j, const std::string& section, const std::string& what) {
  if (!j.is_number()) throw SpecError(section, what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SpecError(section, what + " must be finite");
  return v;
}

int integer(const json& j, const std::string& section, const std::string& what) {
  const double v = number(j, section, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw SpecError(section, what + " must be an integer");
  return static_cast<int>(v);
}

Vector vector_of(const json& j, const std::string& section, const std::string& what, Eigen::Index expected = -1) {
  if (!j.is_array() || j.empty()) throw SpecError(section, what + " must be a non-empty array");
  if (expected >= 0 && static_cast<Eigen::Index>(j.size()) != expected) {
    std::ostringstream os;
    os << what << " must have " << expected << " entries";
    throw SpecError(section, os.str());
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], section, what);
  return v;
}

Matrix matrix_of(const json& j, const std::string& section, const std::string& what, Eigen::Index rows,
                 Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    std::ostringstream os;
    os << what << " must have " << rows << " rows";
    throw SpecError(section, os.str());
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = vector_of(j[static_cast<std::size_t>(r)], section, what, cols).transpose();
  return m;
}

OrderDistribution parse_psi(const json& j, int quad_order) {
  const std::string section = "psi";
  if (!j.is_object()) throw SpecError(section, "psi must be an object");
  const json& kind_j = member(j, section, "kind");
  if (!kind_j.is_string()) throw SpecError(section, "psi kind must be a string");
  const std::string kind = kind_j.get<std::string>();
  try {
    if (kind == "polynomial") {
      require_keys(j, section, {"kind", "coefficients"});
      const Vector c = vector_of(member(j, section, "coefficients"), section, "psi coefficients");
      return build_distribution(polynomial_weight(std::vector<double>(c.data(), c.data() + c.size())), quad_order);
    }
    if (kind == "constant") {
      require_keys(j, section, {"kind", "value"});
      const double value = number(member(j, section, "value"), section, "psi value");
      return build_distribution([value](double) { return value; }, quad_order);
    }
    if (kind == "bump") {
      require_keys(j, section, {"kind", "center", "width"});
      const double center = number(member(j, section, "center"), section, "psi center");
      const double width = number(member(j, section, "width"), section, "psi width");
      if (!(center >= 0.0 && center <= 1.0)) throw SpecError(section, "psi center must lie in [0, 1]");
      if (!(width > 0.0 && width <= 1.0)) throw SpecError(section, "psi width must lie in (0, 1]");
      return build_bump_distribution(Bump{center, width}, quad_order);
    }
  } catch (const ValidationError& e) {
    throw SpecError(section, e.what());
  }
  throw SpecError(section, "unknown psi kind '" + kind + "'");
}

std::string kind_of(const json& j, const std::string& section) {
  if (!j.is_object()) throw SpecError(section, section + " must be an object");
  const json& k = member(j, section, "kind");
  if (!k.is_string()) throw SpecError(section, section + " kind must be a string");
  return k.get<std::string>();
}

DynamicsMaps parse_dynamics(const json& j, int n, int m) {
  const std::string section = "dynamics";
  const std::string kind = kind_of(j, section);
  if (kind == "builtin") {
    require_keys(j, section, {"kind", "name"});
    const json& name = member(j, section, "name");
    if (!name.is_string()) throw SpecError(section, "dynamics name must be a string");
    return builtin_dynamics(name.get<std::string>(), n, m);
  }
  if (kind == "affine") {
    require_keys(j, section, {"kind", "A", "B", "c"});
    const Matrix A = matrix_of(member(j, section, "A"), section, "A", n, n);
    const Matrix B = matrix_of(member(j, section, "B"), section, "B", n, m);
    const Vector c = j.contains("c") ? vector_of(j["c"], section, "c", n) : Vector(Vector::Zero(n));
    return {[A, B, c](double, const Vector& x, const Vector& u) { return Vector(A * x + B * u + c); },
            [A](double, const Vector&, const Vector&) { return A; }, true};
  }
  throw SpecError(section, "unknown dynamics kind '" + kind + "'");
}

CostMaps parse_cost(const json& j, int n, int m) {
  const std::string section = "cost";
  const std::string kind = kind_of(j, section);
  if (kind == "builtin") {
    require_keys(j, section, {"kind", "name"});
    const json& name = member(j, section, "name");
    if (!name.is_string()) throw SpecError(section, "cost name must be a string");
    return builtin_cost(name.get<std::string>(), n, m);
  }
  if (kind == "affine") {
    require_keys(j, section, {"kind", "c0", "q", "r", "Q", "R"});
    const double c0 = j.contains("c0") ? number(j["c0"], section, "c0") : 0.0;
    const Vector q = j.contains("q") ? vector_of(j["q"], section, "q", n) : Vector(Vector::Zero(n));
    const Vector r = j.contains("r") ? vector_of(j["r"], section, "r", m) : Vector(Vector::Zero(m));
    const Matrix Q = j.contains("Q") ? matrix_of(j["Q"], section, "Q", n, n) : Matrix(Matrix::Zero(n, n));
    const Matrix R = j.contains("R") ? matrix_of(j["R"], section, "R", m, m) : Matrix(Matrix::Zero(m, m));
    return {[c0, q, r, Q, R](double, const Vector& x, const Vector& u) {
              return c0 + q.dot(x) + r.dot(u) + 0.5 * x.dot(Q * x) + 0.5 * u.dot(R * u);
            },
            [q, Q](double, const Vector& x, const Vector&) {
              return Vector(q + 0.5 * (Q + Q.transpose()) * x);
            },
            R.isZero(0.0)};
  }
  throw SpecError(section, "unknown cost kind '" + kind + "'");
}

ControlBox parse_omega(const json& j) {
  const std::string section = "omega";
  if (!j.is_array() || j.empty()) throw SpecError(section, "omega must be a non-empty array of {lo, hi}");
  const auto m = static_cast<Eigen::Index>(j.size());
  ControlBox box{Vector(m), Vector(m)};
  for (Eigen::Index k = 0; k < m; ++k) {
    const json& e = j[static_cast<std::size_t>(k)];
    require_keys(e, section, {"lo", "hi"});
    box.lo[k] = number(member(e, section, "lo"), section, "omega lo");
    box.hi[k] = number(member(e, section, "hi"), section, "omega hi");
    if (box.lo[k] > box.hi[k]) throw SpecError(section, "omega lo exceeds hi");
  }
  return box;
}

template <class T>
void apply_field(const json& solver, const char* key, const std::optional<T>& override_value, T& field,
                 std::vector<std::string>& defaults_used) {
  if (override_value) {
    field = *override_value;
  } else if (solver.contains(key)) {
    if constexpr (std::is_same_v<T, int>) {
      field = integer(solver[key], "solver", key);
    } else {
      field = number(solver[key], "solver", key);
    }
  } else {
    defaults_used.emplace_back(key);
  }
}

SolverConfig parse_solver(const json& doc, const ConfigOverrides& o, std::vector<std::string>& defaults_used) {
  const json solver = doc.contains("solver") ? doc["solver"] : json::object();
  require_keys(solver, "solver",
               {"n_steps", "quad_order", "sweep_tol", "newton_tol", "max_inner_iters", "max_sweeps",
                "control_grid", "needle_tol", "gamma"});
  SolverConfig cfg;
  apply_field(solver, "n_steps", o.n_steps, cfg.n_steps, defaults_used);
  apply_field(solver, "quad_order", o.quad_order, cfg.quad_order, defaults_used);
  apply_field(solver, "sweep_tol", o.sweep_tol, cfg.sweep_tol, defaults_used);
  apply_field(solver, "newton_tol", o.newton_tol, cfg.newton_tol, defaults_used);
  apply_field(solver, "max_inner_iters", o.max_inner_iters, cfg.max_inner_iters, defaults_used);
  apply_field(solver, "max_sweeps", o.max_sweeps, cfg.max_sweeps, defaults_used);
  apply_field(solver, "control_grid", o.control_grid, cfg.control_grid, defaults_used);
  apply_field(solver, "needle_tol", o.needle_tol, cfg.needle_tol, defaults_used);
  apply_field(solver, "gamma", o.gamma, cfg.gamma, defaults_used);
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw SpecError("solver", e.what());
  }
  return cfg;
}

}  // namespace

ProblemSpec parse_problem_spec(const json& doc, const ConfigOverrides& overrides) {
  require_keys(doc, "document",
               {"name", "builtin", "horizon", "initial_state", "psi", "dynamics", "cost", "omega",
                "initial_control", "solver", "bounds"});
  std::vector<std::string> defaults_used;
  const SolverConfig cfg = parse_solver(doc, overrides, defaults_used);

  std::optional<ControlProblem> problem;
  if (doc.contains("builtin")) {
    for (const char* key : {"name", "horizon", "initial_state", "psi", "dynamics", "cost", "omega"}) {
      if (doc.contains(key)) throw SpecError("builtin", std::string("builtin problems do not take '") + key + "'");
    }
    if (!doc["builtin"].is_string()) throw SpecError("builtin", "builtin must be a string");
    problem.emplace(builtin_problem(doc["builtin"].get<std::string>(), cfg.quad_order));
  } else {
    const json& horizon = member(doc, "horizon", "horizon");
    require_keys(horizon, "horizon", {"a", "b"});
    const double a = number(member(horizon, "horizon", "a"), "horizon", "a");
    const double b = number(member(horizon, "horizon", "b"), "horizon", "b");
    if (!(a < b)) throw SpecError("horizon", "horizon requires a < b");

    const Vector x0 = vector_of(member(doc, "initial_state", "initial_state"), "initial_state", "initial_state");
    const ControlBox omega = parse_omega(member(doc, "omega", "omega"));
    const int n = static_cast<int>(x0.size());
    const int m = omega.dim();
    OrderDistribution dist = parse_psi(member(doc, "psi", "psi"), cfg.quad_order);
    const DynamicsMaps f = parse_dynamics(member(doc, "dynamics", "dynamics"), n, m);
    const CostMaps L = parse_cost(member(doc, "cost", "cost"), n, m);
    std::string name = "custom";
    if (doc.contains("name")) {
      if (!doc["name"].is_string()) throw SpecError("name", "name must be a string");
      name = doc["name"].get<std::string>();
    }
    problem.emplace(ControlProblem{name, n, m, f.f, f.f_x, L.L, L.L_x, omega, x0, a, b, std::move(dist),
                                   f.affine_in_u && L.affine_in_u, std::nullopt});
  }

  if (doc.contains("initial_control")) {
    problem->initial_control =
        vector_of(doc["initial_control"], "initial_control", "initial_control", problem->control_dim);
  }
  std::optional<LipschitzBounds> bounds;
  if (doc.contains("bounds")) {
    const json& bj = doc["bounds"];
    require_keys(bj, "bounds", {"lipschitz", "bound"});
    const double k = number(member(bj, "bounds", "lipschitz"), "bounds", "lipschitz");
    const double mb = number(member(bj, "bounds", "bound"), "bounds", "bound");
    if (k < 0.0 || mb < 0.0) throw SpecError("bounds", "bounds must be non-negative");
    bounds = LipschitzBounds{k, mb};
  }
  try {
    problem->validate();
  } catch (const ValidationError& e) {
    throw SpecError("problem", e.what());
  }
  return ProblemSpec{std::move(*problem), cfg, std::move(defaults_used), bounds, doc};
}

ProblemSpec load_problem_spec(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw SpecError("io", "cannot read problem file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw SpecError("syntax", e.what());
  }
  return parse_problem_spec(doc, overrides);
}

json config_to_json(const SolverConfig& cfg) {
  return json{{"n_steps", cfg.n_steps},         {"quad_order", cfg.quad_order},
              {"sweep_tol", cfg.sweep_tol},     {"newton_tol", cfg.newton_tol},
              {"max_inner_iters", cfg.max_inner_iters}, {"max_sweeps", cfg.max_sweeps},
              {"control_grid", cfg.control_grid}, {"needle_tol", cfg.needle_tol},
              {"gamma", cfg.gamma}};
}

}  // namespace dofoc::cli
