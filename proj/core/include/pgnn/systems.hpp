#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace pgnn {

using Vec = Eigen::VectorXd;

enum class SystemId { LotkaVolterra, Duffing, VanDerPol, Lorenz, HenonHeiles };

// Scalar feature of the raw state that can be concatenated into a hidden
// layer. Each term belongs to exactly one system.
enum class InjectionTerm { LvXY, DufX3, DufCos, VdpX2Y, VdpX2, LorXY, HhXY, HhY2 };

struct DatasetDefaults {
  double h = 0.0;            // resampling timestep, seconds
  double final_time = 0.0;   // integration horizon T, seconds
  std::vector<Vec> train_ics;
  Vec test_ic;
};

struct SystemSpec {
  SystemId id = SystemId::LotkaVolterra;
  int dim = 0;
  std::map<std::string, double> params;
  std::vector<InjectionTerm> terms;
  DatasetDefaults defaults;
  double eval_window = 0.0;  // RFMSE truncation horizon, seconds

  double param(const std::string& name) const;
};

// Canonical spec for a system: benchmark parameters, dataset defaults and
// evaluation window. Parameters are fixed; use make_system_spec to override
// them in tests.
const SystemSpec& system_spec(SystemId id);
SystemSpec make_system_spec(SystemId id, std::map<std::string, double> params);
const std::vector<SystemId>& all_systems();

// Instantaneous time derivative of the state.
Vec rhs(const SystemSpec& spec, const Vec& x);

// Scalar injection feature computed from the raw (unnormalised) state.
double injection_feature(InjectionTerm term, const Vec& x);

// First integral used as an integrator oracle. Defined for Lotka-Volterra
// (x, y > 0), Duffing (auxiliary circle) and Henon-Heiles (energy, valid for
// the variant below). Throws std::domain_error otherwise.
double conserved_quantity(const SystemSpec& spec, const Vec& x);

// Henon-Heiles derivative consistent with the energy function, i.e.
// vy' = -y - x^2 + y^2. The benchmark system itself uses
// vy' = -y - 2*lambda*(x^2 - y^2); this variant exists so that energy
// conservation can be used as a solver test.
Vec henon_heiles_hamiltonian_rhs(const Vec& x);

SystemId term_system(InjectionTerm term);

std::string to_string(SystemId id);
std::string to_string(InjectionTerm term);
SystemId system_from_string(const std::string& name);
InjectionTerm term_from_string(const std::string& name);

}  // namespace pgnn
