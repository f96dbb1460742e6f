#pragma once

#include <string>
#include <vector>

#include "dpt/field.hpp"
#include "dpt/inequalities.hpp"
#include "dpt/report.hpp"
#include "dpt/slab.hpp"

namespace dpt {

inline constexpr double kVacuumDensity = 1e-12;

enum class EosKind { Polytropic, PerfectGas };

struct Eos {
  EosKind kind = EosKind::Polytropic;
  double gamma = 1.4;
  double a = 1.0;  // p = a rho^gamma for the polytropic law
};

// One-dimensional gas on [lo, hi] with cell averages. `energy` is evolved only for the perfect gas.
struct FluidState {
  double lo = 0.0;
  double hi = 1.0;
  double time = 0.0;
  Eos eos;
  std::vector<double> rho;
  std::vector<double> m;
  std::vector<double> energy;

  std::size_t cells() const { return rho.size(); }
  double dy() const { return (hi - lo) / static_cast<double>(cells()); }
  double velocity(std::size_t j) const;
  double internal_energy(std::size_t j) const;  // rho e
  double pressure(std::size_t j) const;
  double total_energy(std::size_t j) const;
  void validate() const;
};

// rho = amplitude exp(-y^2 / (2 width^2)) with uniform velocity u; perfect gas gets p = rho^gamma.
FluidState gaussian_bump(std::size_t cells, double lo, double hi, double amplitude, double width, double u, Eos eos);
FluidState fluid_from_json(const nlohmann::json& j);

struct EulerTrajectory {
  FluidState initial;
  FluidState final_state;
  Slab slab;  // [[rho, m], [m, rho u^2 + p]] per step and cell
  std::vector<double> mass;    // at each step boundary
  std::vector<double> energy;
  std::vector<double> lhs_accumulator;  // running sum dt dy rho p
  double boundary_mass = 0.0;           // integrated |mass flux| through both ends
  double mass_drift = 0.0;              // max |M_k - M_0| / M_0
  double energy_increase = 0.0;         // max (E_{k+1} - E_k) / E_0
};

// Rusanov finite volumes with outflow ends.
EulerTrajectory euler_run_1d(const FluidState& init, double t_end, double cfl);
std::string trajectory_csv(const EulerTrajectory& traj);

struct FlowDiagnostics {
  int n = 1;
  double m0 = 0.0;
  double e0 = 0.0;
  double d0 = 0.0;
  double c_n = 0.0;
  double momentum_l1 = 0.0;
};

// (n+1)^{1/(2n) - 1/2} / (|S^n|^{1/n} sqrt(n))
double flow_constant(int n);
// 3^{1+1/n} / ((n+1) |S^n|^{1/n}), the constant of the momentum-flux estimate
double flux_constant(int n);
FlowDiagnostics flow_invariants(const FluidState& init);

// lhs = sum dt dy rho p; passes against the bound corrected by the scheme's divergence mass.
CheckReport euler_bound_check(const EulerTrajectory& traj, const FlowDiagnostics& diag, Tolerance tol = {});
// lhs = sum dt dy det A; ideal rhs = flux_constant(1) (|m(0)|_1 + |m(T)|_1) M0.
CheckReport absfl_bound_check(const Slab& slab, Tolerance tol = {});

// Averages over a ball: p (p + rho|v|^2)^{1/(n-1)} against the boundary and source terms.
CheckReport selfsimilar_bound_check(const ScalarField& rho, const VectorField& v, const ScalarField& p,
                                    Tolerance tol = {});

struct RelativisticHistory {
  MeshPtr space;
  std::vector<double> times;  // step boundaries
  std::vector<ScalarField> rho;  // one per step
  std::vector<VectorField> v;
};

// flux_constant(n) (c^2 + a^2) / a^3
double relativistic_coefficient(int n, double c, double a);
// lhs = int int rho^{1+1/n}; rhs = coefficient * mu0^{1+1/n}, p = a^2 rho.
CheckReport relativistic_bound_check(const RelativisticHistory& hist, double c, double a, Tolerance tol = {});

}  // namespace dpt
