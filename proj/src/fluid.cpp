#include "dpt/fluid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dpt/calculus.hpp"
#include "dpt/constructors.hpp"
#include "dpt/errors.hpp"
#include "dpt/numerics.hpp"

namespace dpt {

double FluidState::velocity(std::size_t j) const { return rho[j] > kVacuumDensity ? m[j] / rho[j] : 0.0; }

double FluidState::internal_energy(std::size_t j) const {
  if (eos.kind == EosKind::Polytropic) return eos.a * std::pow(rho[j], eos.gamma) / (eos.gamma - 1.0);
  return energy[j] - 0.5 * m[j] * velocity(j);
}

double FluidState::pressure(std::size_t j) const {
  if (eos.kind == EosKind::Polytropic) return eos.a * std::pow(rho[j], eos.gamma);
  const double e = internal_energy(j);
  if (e < -1e-12 * std::max(std::abs(energy[j]), kVacuumDensity))
    fail(ErrorKind::VacuumBreakdown, "negative internal energy at cell " + std::to_string(j));
  return std::max(e, 0.0) * (eos.gamma - 1.0);
}

double FluidState::total_energy(std::size_t j) const {
  if (eos.kind == EosKind::PerfectGas) return energy[j];
  return 0.5 * m[j] * velocity(j) + internal_energy(j);
}

void FluidState::validate() const {
  require(hi > lo && cells() >= 2, ErrorKind::InvalidArgument, "fluid grid needs an interval and two cells");
  require(m.size() == cells(), ErrorKind::InvalidArgument, "momentum length differs from density length");
  require(eos.gamma > 1.0 && eos.a >= 0.0, ErrorKind::InvalidArgument, "equation of state needs gamma > 1, a >= 0");
  if (eos.kind == EosKind::PerfectGas)
    require(energy.size() == cells(), ErrorKind::InvalidArgument, "energy length differs from density length");
  for (std::size_t j = 0; j < cells(); ++j) {
    if (!(rho[j] >= 0.0)) fail(ErrorKind::NegativeDensity, "density at cell " + std::to_string(j));
    require(std::isfinite(m[j]), ErrorKind::InvalidArgument, "non-finite momentum");
    if (eos.kind == EosKind::PerfectGas && !(pressure(j) >= 0.0))
      fail(ErrorKind::NegativePressure, "pressure at cell " + std::to_string(j));
  }
}

FluidState gaussian_bump(std::size_t cells, double lo, double hi, double amplitude, double width, double u, Eos eos) {
  FluidState s;
  s.lo = lo;
  s.hi = hi;
  s.eos = eos;
  s.rho.resize(cells);
  s.m.resize(cells);
  const double h = s.dy();
  for (std::size_t j = 0; j < cells; ++j) {
    const double y = lo + (static_cast<double>(j) + 0.5) * h;
    s.rho[j] = amplitude * std::exp(-y * y / (2.0 * width * width));
    s.m[j] = s.rho[j] * u;
  }
  if (eos.kind == EosKind::PerfectGas) {
    s.energy.resize(cells);
    for (std::size_t j = 0; j < cells; ++j)
      s.energy[j] = 0.5 * s.m[j] * u + std::pow(s.rho[j], eos.gamma) / (eos.gamma - 1.0);
  }
  s.validate();
  return s;
}

FluidState fluid_from_json(const nlohmann::json& j) {
  Eos eos;
  if (j.contains("eos")) {
    const auto& e = j.at("eos");
    check_keys(e, {"kind", "gamma", "a"}, "eos");
    const std::string kind = e.value("kind", "polytropic");
    if (kind == "perfect") eos.kind = EosKind::PerfectGas;
    else if (kind != "polytropic") fail(ErrorKind::ParseError, "unknown equation of state '" + kind + "'");
    eos.gamma = e.value("gamma", eos.gamma);
    eos.a = e.value("a", eos.a);
  }
  const std::string profile = j.value("profile", "cells");
  if (profile == "gaussian") {
    check_keys(j, {"profile", "cells", "lo", "hi", "amplitude", "width", "velocity", "eos"}, "fluid");
    return gaussian_bump(j.value("cells", 800), j.value("lo", -5.0), j.value("hi", 5.0), j.value("amplitude", 1.0),
                         j.value("width", 0.5), j.value("velocity", 0.0), eos);
  }
  if (profile != "cells") fail(ErrorKind::ParseError, "unknown fluid profile '" + profile + "'");
  check_keys(j, {"profile", "lo", "hi", "rho", "u", "p", "eos"}, "fluid");
  FluidState s;
  s.lo = j.at("lo").get<double>();
  s.hi = j.at("hi").get<double>();
  s.eos = eos;
  s.rho = j.at("rho").get<std::vector<double>>();
  const auto u = j.value("u", std::vector<double>(s.cells(), 0.0));
  require(u.size() == s.cells(), ErrorKind::InvalidArgument, "velocity length differs from density length");
  s.m.resize(s.cells());
  for (std::size_t k = 0; k < s.cells(); ++k) s.m[k] = s.rho[k] * u[k];
  if (eos.kind == EosKind::PerfectGas) {
    const auto p = j.at("p").get<std::vector<double>>();
    require(p.size() == s.cells(), ErrorKind::InvalidArgument, "pressure length differs from density length");
    s.energy.resize(s.cells());
    for (std::size_t k = 0; k < s.cells(); ++k) s.energy[k] = 0.5 * s.m[k] * u[k] + p[k] / (eos.gamma - 1.0);
  }
  s.validate();
  return s;
}

namespace {

double total(const std::vector<double>& v, double h) {
  std::vector<double> w(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) w[k] = v[k] * h;
  return pairwise_sum(w);
}

double total_energy(const FluidState& s) {
  std::vector<double> e(s.cells());
  for (std::size_t j = 0; j < s.cells(); ++j) e[j] = s.total_energy(j);
  return total(e, s.dy());
}

SymMat spacetime_tensor(const FluidState& s, std::size_t j) {
  SymMat a(2);
  a(0, 0) = s.rho[j];
  a(0, 1) = s.m[j];
  a(1, 1) = s.m[j] * s.velocity(j) + s.pressure(j);
  return a;
}

}  // namespace

EulerTrajectory euler_run_1d(const FluidState& init, double t_end, double cfl) {
  if (!(cfl > 0.0 && cfl <= 0.9)) fail(ErrorKind::CFLViolation, "cfl must lie in (0, 0.9]");
  require(t_end > init.time, ErrorKind::InvalidArgument, "end time must exceed the start time");
  init.validate();
  const bool perfect = init.eos.kind == EosKind::PerfectGas;
  const std::size_t n = init.cells(), comps = perfect ? 3 : 2;
  const double h = init.dy();

  EulerTrajectory traj;
  traj.initial = init;
  FluidState s = init;
  const double m0 = total(s.rho, h);
  const double e0 = total_energy(s);
  traj.mass.push_back(m0);
  traj.energy.push_back(e0);
  traj.lhs_accumulator.push_back(0.0);
  traj.slab.lo = s.lo;
  traj.slab.hi = s.hi;
  traj.slab.cells = n;
  traj.slab.times.push_back(s.time);

  std::vector<double> flux(n * comps), speed(n), iflux((n + 1) * comps), p(n), row_lhs(n);
  std::vector<SymMat> row(n, SymMat(2));
  while (s.time < t_end) {
    double smax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double u = s.velocity(j);
      p[j] = s.pressure(j);
      if (!std::isfinite(p[j])) fail(ErrorKind::VacuumBreakdown, "pressure evaluation failed");
      const double c = s.rho[j] > kVacuumDensity ? std::sqrt(s.eos.gamma * p[j] / s.rho[j]) : 0.0;
      speed[j] = std::abs(u) + c;
      smax = std::max(smax, speed[j]);
      flux[j * comps] = s.rho[j] * u;
      flux[j * comps + 1] = s.rho[j] * u * u + p[j];
      if (perfect) flux[j * comps + 2] = (s.energy[j] + p[j]) * u;
      row[j] = spacetime_tensor(s, j);
      row_lhs[j] = s.rho[j] * p[j];
    }
    double dt = smax > 0.0 ? cfl * h / smax : t_end - s.time;
    dt = std::min(dt, t_end - s.time);
    const double t_next = (t_end - s.time - dt <= 1e-14 * std::max(1.0, t_end)) ? t_end : s.time + dt;
    dt = t_next - s.time;

    auto state = [&](std::size_t j, std::size_t k) {
      return k == 0 ? s.rho[j] : k == 1 ? s.m[j] : s.energy[j];
    };
    for (std::size_t k = 0; k < comps; ++k) {
      iflux[k] = flux[k];
      iflux[n * comps + k] = flux[(n - 1) * comps + k];
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double alpha = std::max(speed[i - 1], speed[i]);
      for (std::size_t k = 0; k < comps; ++k)
        iflux[i * comps + k] = 0.5 * (flux[(i - 1) * comps + k] + flux[i * comps + k]) -
                               0.5 * alpha * (state(i, k) - state(i - 1, k));
    }
    const double r = dt / h;
    for (std::size_t j = 0; j < n; ++j) {
      s.rho[j] -= r * (iflux[(j + 1) * comps] - iflux[j * comps]);
      s.m[j] -= r * (iflux[(j + 1) * comps + 1] - iflux[j * comps + 1]);
      if (perfect) s.energy[j] -= r * (iflux[(j + 1) * comps + 2] - iflux[j * comps + 2]);
      if (!(s.rho[j] >= 0.0)) fail(ErrorKind::VacuumBreakdown, "negative density at cell " + std::to_string(j));
    }
    traj.boundary_mass += dt * (std::abs(iflux[0]) + std::abs(iflux[n * comps]));
    if (traj.boundary_mass > 1e-9 * m0) fail(ErrorKind::BoundaryFlux, "mass leaves the computational box");

    traj.slab.append(t_next, row);
    s.time = t_next;
    traj.lhs_accumulator.push_back(traj.lhs_accumulator.back() + dt * total(row_lhs, h));
    traj.mass.push_back(total(s.rho, h));
    traj.energy.push_back(total_energy(s));
    traj.mass_drift = std::max(traj.mass_drift, std::abs(traj.mass.back() - m0) / m0);
    const std::size_t k = traj.energy.size();
    traj.energy_increase = std::max(traj.energy_increase, (traj.energy[k - 1] - traj.energy[k - 2]) / e0);
  }
  traj.final_state = s;
  return traj;
}

std::string trajectory_csv(const EulerTrajectory& traj) {
  std::ostringstream os;
  os.precision(17);
  os << "t,mass,energy,lhs\n";
  for (std::size_t k = 0; k < traj.slab.times.size(); ++k)
    os << traj.slab.times[k] << ',' << traj.mass[k] << ',' << traj.energy[k] << ',' << traj.lhs_accumulator[k] << '\n';
  return os.str();
}

double flow_constant(int n) {
  require(n >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
  const double dn = n;
  return std::pow(dn + 1.0, 1.0 / (2.0 * dn) - 0.5) / (std::pow(unit_sphere_area(n + 1), 1.0 / dn) * std::sqrt(dn));
}

double flux_constant(int n) {
  require(n >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
  const double dn = n;
  return std::pow(3.0, 1.0 + 1.0 / dn) / ((dn + 1.0) * std::pow(unit_sphere_area(n + 1), 1.0 / dn));
}

FlowDiagnostics flow_invariants(const FluidState& init) {
  init.validate();
  const double h = init.dy();
  const std::size_t n = init.cells();
  FlowDiagnostics d;
  d.n = 1;
  d.c_n = flow_constant(1);
  d.m0 = total(init.rho, h);
  std::vector<double> e(n), mabs(n), spread(n), internal(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = init.total_energy(j);
    mabs[j] = std::abs(init.m[j]);
    internal[j] = init.internal_energy(j);
  }
  d.e0 = total(e, h);
  d.momentum_l1 = total(mabs, h);
  const double ubar = d.m0 > 0.0 ? total(init.m, h) / d.m0 : 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double du = init.velocity(j) - ubar;
    spread[j] = init.rho[j] * du * du;
  }
  d.d0 = d.m0 * (total(spread, h) + 2.0 * total(internal, h));
  return d;
}

CheckReport euler_bound_check(const EulerTrajectory& traj, const FlowDiagnostics& diag, Tolerance tol) {
  const double lhs = traj.lhs_accumulator.back();
  const double ideal = 2.0 * diag.c_n * std::pow(diag.m0, 1.0 / diag.n) * std::sqrt(std::max(diag.d0, 0.0));
  const SlabBound b = slab_bound(traj.slab);
  const double rhs = corrected_rhs(ideal, b);
  auto r = make_report("euler_bound", lhs, rhs, traj.initial.dy(), tol.total(),
                       "pass is against the divergence-corrected bound");
  r.extras = {{"ideal_rhs", ideal},
              {"ideal_holds", lhs <= ideal ? 1.0 : 0.0},
              {"bound_without_jumps", b.without_jumps},
              {"bound_with_jumps", b.with_jumps},
              {"divergence_mass", b.divergence_mass},
              {"lambda", b.lambda},
              {"m0", diag.m0},
              {"d0", diag.d0},
              {"c_n", diag.c_n},
              {"mass_drift", traj.mass_drift},
              {"energy_increase", traj.energy_increase},
              {"boundary_mass", traj.boundary_mass},
              {"steps", static_cast<double>(traj.slab.steps())}};
  return r;
}

CheckReport absfl_bound_check(const Slab& slab, Tolerance tol) {
  require(slab.steps() > 0, ErrorKind::InvalidArgument, "empty slab");
  const double lhs = slab_det_integral(slab);
  std::vector<double> rho0(slab.cells), m0(slab.cells), mt(slab.cells);
  for (std::size_t j = 0; j < slab.cells; ++j) {
    rho0[j] = slab.at(0, j)(0, 0) * slab.dy();
    m0[j] = std::abs(slab.at(0, j)(0, 1)) * slab.dy();
    mt[j] = std::abs(slab.at(slab.steps() - 1, j)(0, 1)) * slab.dy();
  }
  const double mass = pairwise_sum(rho0);
  const double ideal = flux_constant(1) * (pairwise_sum(m0) + pairwise_sum(mt)) * mass;
  const SlabBound b = slab_bound(slab);
  auto r = make_report("absfl_bound", lhs, corrected_rhs(ideal, b), slab.dy(), tol.total(),
                       "pass is against the divergence-corrected bound");
  r.extras = {{"ideal_rhs", ideal}, {"bound_with_jumps", b.with_jumps}, {"divergence_mass", b.divergence_mass}};
  return r;
}

CheckReport selfsimilar_bound_check(const ScalarField& rho, const VectorField& v, const ScalarField& p, Tolerance tol) {
  require_same_grid(rho, v);
  require_same_grid(rho, p);
  const auto* ball = std::get_if<Ball>(&rho.mesh().domain());
  require(ball != nullptr, ErrorKind::DomainMismatch, "self-similar estimate lives on a ball");
  const int n = rho.dim();
  require(v.components() == n, ErrorKind::DomainMismatch, "velocity has the wrong number of components");
  ScalarField body(rho.mesh_ptr()), normal(rho.mesh_ptr()), source(rho.mesh_ptr());
  for (std::size_t c = 0; c < rho.size(); ++c) {
    double v2 = 0.0;
    for (double x : v.at(c)) v2 += x * x;
    normal[c] = p[c] + rho[c] * v2;
    body[c] = p[c] * std::pow(normal[c], 1.0 / (n - 1));
    source[c] = rho[c] * std::sqrt(v2);
  }
  const double lhs = average(body);
  const double flux = boundary_integral(normal) / boundary_measure(rho.mesh());
  const double rhs = std::pow(flux + (n + 1.0) / n * ball->radius * average(source), n / (n - 1.0));
  return make_report("selfsimilar_bound", lhs, rhs, rho.mesh().spacing(), tol.total());
}

double relativistic_coefficient(int n, double c, double a) {
  require(c > 0.0 && a > 0.0, ErrorKind::InvalidArgument, "speeds must be positive");
  return flux_constant(n) * (c * c + a * a) / (a * a * a);
}

CheckReport relativistic_bound_check(const RelativisticHistory& hist, double c, double a, Tolerance tol) {
  require(hist.space && !hist.rho.empty() && hist.rho.size() == hist.v.size() &&
              hist.times.size() == hist.rho.size() + 1,
          ErrorKind::InvalidArgument, "history needs one density and velocity per step");
  const int n = hist.space->dim();
  std::vector<double> steps;
  ScalarField mu(hist.space);
  for (std::size_t k = 0; k < hist.rho.size(); ++k) {
    const ScalarField& rho = hist.rho[k];
    ScalarField q(hist.space);
    for (std::size_t cell = 0; cell < q.size(); ++cell) {
      double v2 = 0.0;
      for (double x : hist.v[k].at(cell)) v2 += x * x;
      if (!(v2 < c * c)) fail(ErrorKind::SuperluminalVelocity, "|v| >= c at step " + std::to_string(k));
      if (!(rho[cell] >= 0.0)) fail(ErrorKind::NegativeDensity, "negative density");
      q[cell] = std::pow(rho[cell], 1.0 + 1.0 / n);
      if (k == 0) mu[cell] = (rho[cell] * c * c * c * c + a * a * rho[cell] * v2) / (c * c * (c * c - v2));
    }
    steps.push_back((hist.times[k + 1] - hist.times[k]) * integrate(q));
  }
  const double lhs = pairwise_sum(steps);
  const double mu0 = integrate(mu);
  const double rhs = relativistic_coefficient(n, c, a) * std::pow(mu0, 1.0 + 1.0 / n);
  auto r = make_report("relativistic_bound", lhs, rhs, hist.space->spacing(), tol.total());
  r.extras = {{"mu0", mu0}};
  return r;
}

}  // namespace dpt
