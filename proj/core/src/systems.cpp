#include "pgnn/systems.hpp"

#include <cmath>
#include <stdexcept>

namespace pgnn {

namespace {

Vec state2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec state3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Vec state4(double a, double b, double c, double d) {
  Vec v(4);
  v << a, b, c, d;
  return v;
}

SystemSpec build_lotka_volterra() {
  SystemSpec s;
  s.id = SystemId::LotkaVolterra;
  s.dim = 2;
  s.params = {{"alpha", 0.1}, {"beta", 0.05}, {"delta", 0.1}, {"gamma", 1.1}};
  s.terms = {InjectionTerm::LvXY};
  s.defaults.h = 0.05;
  s.defaults.final_time = 200.0;
  s.defaults.train_ics = {state2(2, 1),  state2(10, 1), state2(12, 1), state2(15, 1),
                          state2(20, 1), state2(22, 1), state2(25, 1)};
  s.defaults.test_ic = state2(5, 1);
  s.eval_window = 25.0;
  return s;
}

SystemSpec build_duffing() {
  SystemSpec s;
  s.id = SystemId::Duffing;
  s.dim = 4;
  s.params = {{"delta", 1.0}, {"alpha", 0.5}, {"beta", 1.0}, {"gamma", 3.0}, {"omega", 0.4}};
  s.terms = {InjectionTerm::DufX3, InjectionTerm::DufCos};
  s.defaults.h = 0.05;
  s.defaults.final_time = 200.0;
  // Planar ICs lifted to the reparametrised state (x, y, psi=1, theta=0).
  s.defaults.train_ics = {state4(1, 1, 1, 0),  state4(0, 1, 1, 0),  state4(-1, 1, 1, 0),
                          state4(1, -1, 1, 0), state4(0, -1, 1, 0), state4(-1, -1, 1, 0)};
  s.defaults.test_ic = state4(1, 0.5, 1, 0);
  s.eval_window = 70.0;
  return s;
}

SystemSpec build_van_der_pol() {
  SystemSpec s;
  s.id = SystemId::VanDerPol;
  s.dim = 2;
  s.params = {{"mu", 3.0}};
  s.terms = {InjectionTerm::VdpX2Y, InjectionTerm::VdpX2};
  s.defaults.h = 0.005;
  s.defaults.final_time = 20.0;
  s.defaults.train_ics = {state2(0, 6), state2(0, -2), state2(-1, 2), state2(1, -4),
                          state2(0, 0.1), state2(1, 3), state2(-2, 5)};
  s.defaults.test_ic = state2(2, -5);
  s.eval_window = 2.5;
  return s;
}

SystemSpec build_lorenz() {
  SystemSpec s;
  s.id = SystemId::Lorenz;
  s.dim = 3;
  s.params = {{"sigma", 10.0}, {"rho", 28.0}, {"beta", 8.0 / 3.0}};
  s.terms = {InjectionTerm::LorXY};
  s.defaults.h = 0.005;
  s.defaults.final_time = 25.0;
  s.defaults.train_ics = {state3(1, 1, 1),  state3(5, 1, 1), state3(1, 5, 1),
                          state3(1, 1, 5), state3(-5, 1, 1), state3(1, -5, 1)};
  s.defaults.test_ic = state3(1, 1, -5);
  s.eval_window = 2.5;
  return s;
}

SystemSpec build_henon_heiles() {
  SystemSpec s;
  s.id = SystemId::HenonHeiles;
  s.dim = 4;  // (x, y, vx, vy)
  s.params = {{"lambda", 1.0}};
  s.terms = {InjectionTerm::HhXY, InjectionTerm::HhY2};
  s.defaults.h = 0.05;
  s.defaults.final_time = 100.0;
  s.defaults.train_ics = {state4(0.1, 0.5, 0, 0), state4(0.3, 0.4, 0, 0),
                          state4(-0.35, 0.4, 0, 0), state4(0.3, -0.1, 0, 0)};
  s.defaults.test_ic = state4(-0.325, 0.4, 0, 0);
  s.eval_window = 15.0;
  return s;
}

void check_dim(const SystemSpec& spec, const Vec& x, const char* where) {
  if (x.size() != spec.dim) {
    throw std::invalid_argument(std::string(where) + ": " + to_string(spec.id) +
                                " expects state of length " + std::to_string(spec.dim) +
                                ", got " + std::to_string(x.size()));
  }
}

}  // namespace

double SystemSpec::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) {
    throw std::invalid_argument("unknown parameter '" + name + "' for " + to_string(id));
  }
  return it->second;
}

const SystemSpec& system_spec(SystemId id) {
  static const SystemSpec lv = build_lotka_volterra();
  static const SystemSpec duf = build_duffing();
  static const SystemSpec vdp = build_van_der_pol();
  static const SystemSpec lor = build_lorenz();
  static const SystemSpec hh = build_henon_heiles();
  switch (id) {
    case SystemId::LotkaVolterra: return lv;
    case SystemId::Duffing: return duf;
    case SystemId::VanDerPol: return vdp;
    case SystemId::Lorenz: return lor;
    case SystemId::HenonHeiles: return hh;
  }
  throw std::invalid_argument("unknown system id");
}

SystemSpec make_system_spec(SystemId id, std::map<std::string, double> params) {
  SystemSpec s = system_spec(id);
  for (const auto& [name, value] : params) {
    if (s.params.find(name) == s.params.end()) {
      throw std::invalid_argument("unknown parameter '" + name + "' for " + to_string(id));
    }
    s.params[name] = value;
  }
  return s;
}

const std::vector<SystemId>& all_systems() {
  static const std::vector<SystemId> ids = {
      SystemId::LotkaVolterra, SystemId::Duffing, SystemId::VanDerPol,
      SystemId::Lorenz, SystemId::HenonHeiles};
  return ids;
}

Vec rhs(const SystemSpec& spec, const Vec& x) {
  check_dim(spec, x, "rhs");
  Vec dx(spec.dim);
  switch (spec.id) {
    case SystemId::LotkaVolterra: {
      const double alpha = spec.param("alpha"), beta = spec.param("beta");
      const double delta = spec.param("delta"), gamma = spec.param("gamma");
      dx(0) = alpha * x(0) - beta * x(0) * x(1);
      dx(1) = delta * x(0) * x(1) - gamma * x(1);
      break;
    }
    case SystemId::Duffing: {
      // State (x, y, psi, theta) with psi = cos(w t), theta = sin(w t).
      const double delta = spec.param("delta"), alpha = spec.param("alpha");
      const double beta = spec.param("beta"), gamma = spec.param("gamma");
      const double omega = spec.param("omega");
      dx(0) = x(1);
      dx(1) = gamma * x(2) - delta * x(1) - alpha * x(0) - beta * x(0) * x(0) * x(0);
      dx(2) = -omega * x(3);
      dx(3) = omega * x(2);
      break;
    }
    case SystemId::VanDerPol: {
      const double mu = spec.param("mu");
      dx(0) = x(1);
      dx(1) = mu * (1.0 - x(0) * x(0)) * x(1) + x(0);
      break;
    }
    case SystemId::Lorenz: {
      const double sigma = spec.param("sigma"), rho = spec.param("rho");
      const double beta = spec.param("beta");
      dx(0) = sigma * (x(1) - x(0));
      dx(1) = x(0) * (rho - x(2)) - x(1);
      dx(2) = x(0) * x(1) - beta * x(2);
      break;
    }
    case SystemId::HenonHeiles: {
      const double lambda = spec.param("lambda");
      dx(0) = x(2);
      dx(1) = x(3);
      dx(2) = -x(0) - 2.0 * lambda * x(0) * x(1);
      dx(3) = -x(1) - 2.0 * lambda * (x(0) * x(0) - x(1) * x(1));
      break;
    }
  }
  return dx;
}

double injection_feature(InjectionTerm term, const Vec& x) {
  const SystemSpec& spec = system_spec(term_system(term));
  check_dim(spec, x, "injection_feature");
  switch (term) {
    case InjectionTerm::LvXY: return x(0) * x(1);
    case InjectionTerm::DufX3: return x(0) * x(0) * x(0);
    case InjectionTerm::DufCos: return x(2);  // psi = cos(w t)
    case InjectionTerm::VdpX2Y: return x(0) * x(0) * x(1);
    case InjectionTerm::VdpX2: return x(0) * x(0);
    case InjectionTerm::LorXY: return x(0) * x(1);
    case InjectionTerm::HhXY: return x(0) * x(1);
    case InjectionTerm::HhY2: return x(1) * x(1);
  }
  throw std::invalid_argument("unknown injection term");
}

double conserved_quantity(const SystemSpec& spec, const Vec& x) {
  check_dim(spec, x, "conserved_quantity");
  switch (spec.id) {
    case SystemId::LotkaVolterra: {
      if (x(0) <= 0.0 || x(1) <= 0.0) {
        throw std::domain_error("lotka_volterra invariant requires x > 0 and y > 0");
      }
      const double alpha = spec.param("alpha"), beta = spec.param("beta");
      const double delta = spec.param("delta"), gamma = spec.param("gamma");
      return delta * x(0) - gamma * std::log(x(0)) + beta * x(1) - alpha * std::log(x(1));
    }
    case SystemId::Duffing:
      return x(2) * x(2) + x(3) * x(3);
    case SystemId::HenonHeiles:
      return 0.5 * (x(2) * x(2) + x(3) * x(3)) + 0.5 * (x(0) * x(0) + x(1) * x(1)) +
             x(0) * x(0) * x(1) - x(1) * x(1) * x(1) / 3.0;
    case SystemId::VanDerPol:
    case SystemId::Lorenz:
      throw std::domain_error("no conserved quantity for " + to_string(spec.id));
  }
  throw std::invalid_argument("unknown system id");
}

Vec henon_heiles_hamiltonian_rhs(const Vec& x) {
  if (x.size() != 4) {
    throw std::invalid_argument("henon_heiles_hamiltonian_rhs expects state of length 4, got " +
                                std::to_string(x.size()));
  }
  Vec dx(4);
  dx(0) = x(2);
  dx(1) = x(3);
  dx(2) = -x(0) - 2.0 * x(0) * x(1);
  dx(3) = -x(1) - x(0) * x(0) + x(1) * x(1);
  return dx;
}

SystemId term_system(InjectionTerm term) {
  switch (term) {
    case InjectionTerm::LvXY: return SystemId::LotkaVolterra;
    case InjectionTerm::DufX3:
    case InjectionTerm::DufCos: return SystemId::Duffing;
    case InjectionTerm::VdpX2Y:
    case InjectionTerm::VdpX2: return SystemId::VanDerPol;
    case InjectionTerm::LorXY: return SystemId::Lorenz;
    case InjectionTerm::HhXY:
    case InjectionTerm::HhY2: return SystemId::HenonHeiles;
  }
  throw std::invalid_argument("unknown injection term");
}

std::string to_string(SystemId id) {
  switch (id) {
    case SystemId::LotkaVolterra: return "lotka_volterra";
    case SystemId::Duffing: return "duffing";
    case SystemId::VanDerPol: return "van_der_pol";
    case SystemId::Lorenz: return "lorenz";
    case SystemId::HenonHeiles: return "henon_heiles";
  }
  throw std::invalid_argument("unknown system id");
}

std::string to_string(InjectionTerm term) {
  switch (term) {
    case InjectionTerm::LvXY: return "lv_xy";
    case InjectionTerm::DufX3: return "duf_x3";
    case InjectionTerm::DufCos: return "duf_cos";
    case InjectionTerm::VdpX2Y: return "vdp_x2y";
    case InjectionTerm::VdpX2: return "vdp_x2";
    case InjectionTerm::LorXY: return "lor_xy";
    case InjectionTerm::HhXY: return "hh_xy";
    case InjectionTerm::HhY2: return "hh_y2";
  }
  throw std::invalid_argument("unknown injection term");
}

SystemId system_from_string(const std::string& name) {
  for (SystemId id : all_systems()) {
    if (to_string(id) == name) return id;
  }
  throw std::invalid_argument("unknown system '" + name + "'");
}

InjectionTerm term_from_string(const std::string& name) {
  static const InjectionTerm terms[] = {
      InjectionTerm::LvXY,   InjectionTerm::DufX3, InjectionTerm::DufCos,
      InjectionTerm::VdpX2Y, InjectionTerm::VdpX2, InjectionTerm::LorXY,
      InjectionTerm::HhXY,   InjectionTerm::HhY2};
  for (InjectionTerm t : terms) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown injection term '" + name + "'");
}

}  // namespace pgnn
