#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpt/constructors.hpp"
#include "dpt/inequalities.hpp"
#include "dpt/report.hpp"
#include "dpt/slab.hpp"

namespace dpt {

// Discrete-velocity distribution on [lo, hi]; values are cell-major, f[j * nodes + k].
struct KineticState {
  double lo = 0.0;
  double hi = 1.0;
  double time = 0.0;
  double tau = 1.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> f;

  std::size_t cells() const { return nodes.empty() ? 0 : f.size() / nodes.size(); }
  std::size_t velocities() const { return nodes.size(); }
  double dy() const { return (hi - lo) / static_cast<double>(cells()); }
  double& at(std::size_t j, std::size_t k) { return f[j * nodes.size() + k]; }
  double at(std::size_t j, std::size_t k) const { return f[j * nodes.size() + k]; }
  // density, momentum and second velocity moment of cell j
  std::array<double, 3> moments(std::size_t j) const;
  SymMat moment_tensor(std::size_t j) const;
  void validate() const;
};

// Two Gaussian beams at +/- beam with spread `spread`, modulated by exp(-y^2 / (2 width^2)).
KineticState two_beam(std::size_t cells, double lo, double hi, std::size_t velocities, double vmax, double beam,
                      double spread, double width, double tau);
KineticState kinetic_from_json(const nlohmann::json& j);

// exp(a + b v + c v^2) on the nodes with the given moments; false when the fit fails.
bool discrete_maxwellian(std::span<const double> nodes, std::span<const double> weights,
                         const std::array<double, 3>& target, std::span<double> out);

struct KineticTrajectory {
  KineticState initial;
  KineticState final_state;
  std::vector<std::vector<double>> snapshots;  // distribution at the start of each step
  Slab slab;
  std::vector<double> mass;
  std::vector<double> entropy;  // sum w f log f dy
  double entropy_increase = 0.0;   // max step increase relative to |H_0| + 1
  double relaxation_defect = 0.0;  // max relative moment change in the relaxation substep
  double boundary_mass = 0.0;
  std::size_t unrelaxed_cells = 0;
};

// Upwind transport with zero inflow, then relaxation toward the discrete Maxwellian. Aborts
// with BoundaryFlux once the outflow exceeds max_outflow times the initial mass.
KineticTrajectory bgk_run_1d(const KineticState& init, double t_end, double cfl, double max_outflow = 1e-9);

struct AndreievOptions {
  double budget = 1e7;
  bool monte_carlo = false;
  std::size_t samples_per_stratum = 4096;
  std::uint64_t seed = 0x5EED;
};

struct AndreievResult {
  double direct = 0.0;
  double bruteforce = 0.0;
  double std_error = 0.0;  // zero for exhaustive enumeration
  bool exhaustive = true;
  std::uint64_t seed = 0;
};

// Moment determinant against (1/(n+1)!) sum over (n+1)-tuples of f..f times the squared simplex determinant.
AndreievResult andreiev_det(std::span<const VelocityAtom> atoms, int n, AndreievOptions opts = {});

// sum dt dy det A for the kinetic moment tensor, with nodes shifted by `velocity_shift`.
double bony_functional(const KineticTrajectory& traj, double velocity_shift = 0.0);

struct KineticDiagnostics {
  double m0 = 0.0;
  double d0 = 0.0;  // (1/2) sum sum g g' |v - v'|^2
  double c_n = 0.0;
};
KineticDiagnostics kinetic_invariants(const KineticState& init, double velocity_shift = 0.0);

CheckReport kinetic_bound_check(const KineticTrajectory& traj, const KineticDiagnostics& diag, Tolerance tol = {});

struct DefectSample {
  double rho = 0.0;
  SmallVector m;
  SymMat t;      // second velocity moments
  SymMat sigma;  // defect
};

// det [[rho, m^T], [m, T + Sigma]] >= rho det Sigma on the sample and `count` random PSD perturbations.
CheckReport defect_schur_check(const DefectSample& sample, std::size_t count, std::uint64_t seed = 0);

}  // namespace dpt
