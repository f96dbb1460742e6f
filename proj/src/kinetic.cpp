#include "dpt/kinetic.hpp"

#include <cmath>
#include <random>

#include "dpt/errors.hpp"
#include "dpt/fluid.hpp"
#include "dpt/numerics.hpp"

namespace dpt {

std::array<double, 3> KineticState::moments(std::size_t j) const {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double g = weights[k] * at(j, k);
    out[0] += g;
    out[1] += g * nodes[k];
    out[2] += g * nodes[k] * nodes[k];
  }
  return out;
}

SymMat KineticState::moment_tensor(std::size_t j) const {
  const auto mom = moments(j);
  return SymMat(2, std::vector<double>{mom[0], mom[1], mom[2]});
}

void KineticState::validate() const {
  require(hi > lo, ErrorKind::InvalidArgument, "kinetic grid needs an interval");
  require(!nodes.empty() && weights.size() == nodes.size(), ErrorKind::InvalidArgument, "nodes and weights differ");
  require(f.size() % nodes.size() == 0 && cells() >= 2, ErrorKind::InvalidArgument, "values do not fill the grid");
  if (!(tau > 0.0)) fail(ErrorKind::NegativeRelaxation, "relaxation time must be positive");
  for (double w : weights) require(w > 0.0, ErrorKind::InvalidArgument, "velocity weights must be positive");
  for (double x : f)
    if (!(x >= 0.0 && std::isfinite(x))) fail(ErrorKind::NegativeDistribution, "distribution must be nonnegative");
}

KineticState two_beam(std::size_t cells, double lo, double hi, std::size_t velocities, double vmax, double beam,
                      double spread, double width, double tau) {
  require(velocities >= 3, ErrorKind::InvalidArgument, "need at least three velocity nodes");
  KineticState s;
  s.lo = lo;
  s.hi = hi;
  s.tau = tau;
  const double dv = 2.0 * vmax / static_cast<double>(velocities - 1);
  for (std::size_t k = 0; k < velocities; ++k) {
    s.nodes.push_back(-vmax + dv * static_cast<double>(k));
    s.weights.push_back(dv);
  }
  s.f.resize(cells * velocities);
  const double h = (hi - lo) / static_cast<double>(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    const double y = lo + (static_cast<double>(j) + 0.5) * h;
    const double rho = std::exp(-y * y / (2.0 * width * width));
    for (std::size_t k = 0; k < velocities; ++k) {
      const double a = (s.nodes[k] - beam) / spread, b = (s.nodes[k] + beam) / spread;
      s.at(j, k) = rho * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
    }
  }
  s.validate();
  return s;
}

KineticState kinetic_from_json(const nlohmann::json& j) {
  const std::string profile = j.value("profile", "cells");
  if (profile == "two_beam") {
    check_keys(j, {"profile", "cells", "lo", "hi", "velocities", "vmax", "beam", "spread", "width", "tau"}, "kinetic");
    return two_beam(j.value("cells", 200), j.value("lo", -5.0), j.value("hi", 5.0), j.value("velocities", 16),
                    j.value("vmax", 3.0), j.value("beam", 1.0), j.value("spread", 0.3), j.value("width", 0.5),
                    j.value("tau", 0.1));
  }
  if (profile != "cells") fail(ErrorKind::ParseError, "unknown kinetic profile '" + profile + "'");
  check_keys(j, {"profile", "lo", "hi", "nodes", "weights", "values", "tau"}, "kinetic");
  KineticState s;
  s.lo = j.at("lo").get<double>();
  s.hi = j.at("hi").get<double>();
  s.tau = j.value("tau", 1.0);
  s.nodes = j.at("nodes").get<std::vector<double>>();
  s.weights = j.at("weights").get<std::vector<double>>();
  for (const auto& row : j.at("values")) {
    const auto r = row.get<std::vector<double>>();
    require(r.size() == s.nodes.size(), ErrorKind::InvalidArgument, "each cell needs one value per node");
    s.f.insert(s.f.end(), r.begin(), r.end());
  }
  s.validate();
  return s;
}

bool discrete_maxwellian(std::span<const double> nodes, std::span<const double> weights,
                         const std::array<double, 3>& target, std::span<double> out) {
  const std::size_t k = nodes.size();
  if (target[0] <= 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return target[0] == 0.0;
  }
  const double u = target[1] / target[0];
  const double temp = target[2] / target[0] - u * u;
  double vmax = 0.0;
  for (double v : nodes) vmax = std::max(vmax, std::abs(v));
  if (!(temp > 1e-12 * (vmax * vmax + 1.0))) return false;

  Eigen::Vector3d coef(0.0, u / temp, -0.5 / temp);
  Eigen::Vector3d goal(target[0], target[1], target[2]);
  const double scale = std::abs(target[0]) + std::abs(target[1]) + std::abs(target[2]);
  auto evaluate = [&](const Eigen::Vector3d& c, Eigen::Vector3d& res, Eigen::Matrix3d* jac) {
    res.setZero();
    if (jac) jac->setZero();
    for (std::size_t i = 0; i < k; ++i) {
      const Eigen::Vector3d phi(1.0, nodes[i], nodes[i] * nodes[i]);
      out[i] = std::exp(c.dot(phi));
      res += weights[i] * out[i] * phi;
      if (jac) *jac += weights[i] * out[i] * phi * phi.transpose();
    }
    res -= goal;
    return res.norm();
  };
  // normalize the density first so the Newton start is close
  Eigen::Vector3d res;
  evaluate(coef, res, nullptr);
  coef(0) = std::log(target[0] / (res(0) + target[0]));
  Eigen::Matrix3d jac;
  double norm = evaluate(coef, res, &jac);
  for (int it = 0; it < 60 && norm > 4e-16 * scale; ++it) {
    const Eigen::Vector3d step = jac.completeOrthogonalDecomposition().solve(-res);
    double damping = 1.0;
    Eigen::Vector3d trial_res;
    double trial = 0.0;
    for (; damping > 1e-8; damping *= 0.5) {
      trial = evaluate(coef + damping * step, trial_res, nullptr);
      if (std::isfinite(trial) && trial < norm) break;
    }
    if (damping <= 1e-8) break;
    coef += damping * step;
    norm = evaluate(coef, res, &jac);
  }
  evaluate(coef, res, nullptr);
  return norm <= 1e-12 * scale;
}

namespace {

double entropy(const KineticState& s) {
  std::vector<double> terms;
  terms.reserve(s.f.size());
  for (std::size_t j = 0; j < s.cells(); ++j)
    for (std::size_t k = 0; k < s.velocities(); ++k) {
      const double x = s.at(j, k);
      terms.push_back(x > 0.0 ? s.weights[k] * x * std::log(x) * s.dy() : 0.0);
    }
  return pairwise_sum(terms);
}

double mass(const KineticState& s) {
  std::vector<double> terms(s.cells());
  for (std::size_t j = 0; j < s.cells(); ++j) terms[j] = s.moments(j)[0] * s.dy();
  return pairwise_sum(terms);
}

// (1/2) sum sum g g' (v - v')^2, the determinant of the 2x2 moment matrix
double pair_determinant(std::span<const double> g, std::span<const double> nodes, double shift) {
  long double acc = 0.0L;
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a + 1; b < g.size(); ++b) {
      const double dv = (nodes[a] + shift) - (nodes[b] + shift);
      acc += static_cast<long double>(g[a]) * g[b] * dv * dv;
    }
  return static_cast<double>(acc);
}

}  // namespace

KineticTrajectory bgk_run_1d(const KineticState& init, double t_end, double cfl, double max_outflow) {
  init.validate();
  if (!(cfl > 0.0 && cfl <= 1.0)) fail(ErrorKind::CFLViolation, "cfl must lie in (0, 1]");
  require(t_end > init.time, ErrorKind::InvalidArgument, "end time must exceed the start time");
  const std::size_t n = init.cells(), nv = init.velocities();
  const double h = init.dy();
  double vmax = 0.0;
  for (double v : init.nodes) vmax = std::max(vmax, std::abs(v));

  KineticTrajectory traj;
  traj.initial = init;
  KineticState s = init;
  const double m0 = mass(s);
  const double h0 = entropy(s);
  traj.mass.push_back(m0);
  traj.entropy.push_back(h0);
  traj.slab.lo = s.lo;
  traj.slab.hi = s.hi;
  traj.slab.cells = n;
  traj.slab.times.push_back(s.time);

  std::vector<SymMat> row(n, SymMat(2));
  std::vector<double> next(s.f.size()), maxw(nv);
  while (s.time < t_end) {
    double dt = vmax > 0.0 ? cfl * h / vmax : t_end - s.time;
    dt = std::min(dt, t_end - s.time);
    const double t_next = (t_end - s.time - dt <= 1e-14 * std::max(1.0, t_end)) ? t_end : s.time + dt;
    dt = t_next - s.time;
    traj.snapshots.push_back(s.f);
    for (std::size_t j = 0; j < n; ++j) row[j] = s.moment_tensor(j);

    for (std::size_t k = 0; k < nv; ++k) {
      const double v = s.nodes[k], nu = v * dt / h;
      for (std::size_t j = 0; j < n; ++j) {
        const double up = v >= 0.0 ? (j > 0 ? s.at(j - 1, k) : 0.0) : (j + 1 < n ? s.at(j + 1, k) : 0.0);
        next[j * nv + k] = s.at(j, k) - std::abs(nu) * (s.at(j, k) - up);
      }
      const std::size_t exit = v >= 0.0 ? n - 1 : 0;
      traj.boundary_mass += dt * std::abs(v) * s.weights[k] * s.at(exit, k);
    }
    s.f.swap(next);
    if (traj.boundary_mass > max_outflow * m0) fail(ErrorKind::BoundaryFlux, "mass leaves the computational box");

    const double theta = -std::expm1(-dt / s.tau);
    for (std::size_t j = 0; j < n; ++j) {
      const auto before = s.moments(j);
      if (before[0] <= 0.0) continue;
      if (!discrete_maxwellian(s.nodes, s.weights, before, maxw)) {
        ++traj.unrelaxed_cells;
        continue;
      }
      for (std::size_t k = 0; k < nv; ++k) s.at(j, k) += theta * (maxw[k] - s.at(j, k));
      const auto after = s.moments(j);
      const double scale = std::abs(before[0]) + std::abs(before[1]) + std::abs(before[2]);
      for (int q = 0; q < 3; ++q)
        traj.relaxation_defect = std::max(traj.relaxation_defect, std::abs(after[q] - before[q]) / scale);
    }

    traj.slab.append(t_next, row);
    s.time = t_next;
    traj.mass.push_back(mass(s));
    traj.entropy.push_back(entropy(s));
    const std::size_t k = traj.entropy.size();
    traj.entropy_increase =
        std::max(traj.entropy_increase, (traj.entropy[k - 1] - traj.entropy[k - 2]) / (std::abs(h0) + 1.0));
  }
  traj.final_state = s;
  return traj;
}

AndreievResult andreiev_det(std::span<const VelocityAtom> atoms, int n, AndreievOptions opts) {
  require(n >= 1 && !atoms.empty(), ErrorKind::InvalidArgument, "need atoms and n >= 1");
  for (const auto& a : atoms)
    require(a.velocity.size() == n, ErrorKind::DomainMismatch, "atom velocities must have n components");
  AndreievResult r;
  r.direct = kinetic_moment_tensor(atoms).det();

  const std::size_t na = atoms.size(), d = static_cast<std::size_t>(n) + 1;
  double factorial = 1.0;
  for (std::size_t k = 2; k <= d; ++k) factorial *= static_cast<double>(k);
  std::vector<double> g(na);
  for (std::size_t i = 0; i < na; ++i) g[i] = atoms[i].weight * atoms[i].density;

  SmallMatrix m(d, d);
  auto term = [&](std::span<const std::size_t> idx) {
    double prod = 1.0;
    for (std::size_t r2 = 0; r2 < d; ++r2) {
      prod *= g[idx[r2]];
      m(0, r2) = 1.0;
      for (int a = 0; a < n; ++a) m(a + 1, r2) = atoms[idx[r2]].velocity(a);
    }
    if (prod == 0.0) return 0.0;
    const double delta = determinant(m);
    return prod * delta * delta;
  };

  std::vector<std::size_t> idx(d, 0);
  const double tuples = std::pow(static_cast<double>(na), static_cast<double>(d));
  if (tuples <= opts.budget) {
    long double acc = 0.0L;
    for (;;) {
      acc += term(idx);
      std::size_t pos = 0;
      while (pos < d && ++idx[pos] == na) idx[pos++] = 0;
      if (pos == d) break;
    }
    r.bruteforce = static_cast<double>(acc / factorial);
    return r;
  }
  if (!opts.monte_carlo)
    fail(ErrorKind::BudgetExceeded, std::to_string(tuples) + " tuples exceed the enumeration budget");

  // stratified on the first index, uniform over the remaining ones
  r.exhaustive = false;
  r.seed = opts.seed;
  const double rest = std::pow(static_cast<double>(na), static_cast<double>(n));
  long double estimate = 0.0L, variance = 0.0L;
  for (std::size_t first = 0; first < na; ++first) {
    std::mt19937_64 rng(opts.seed + first);
    std::uniform_int_distribution<std::size_t> pick(0, na - 1);
    long double sum = 0.0L, sum2 = 0.0L;
    idx[0] = first;
    for (std::size_t s = 0; s < opts.samples_per_stratum; ++s) {
      for (std::size_t p = 1; p < d; ++p) idx[p] = pick(rng);
      const long double t = term(idx) * rest;
      sum += t;
      sum2 += t * t;
    }
    const long double cnt = static_cast<long double>(opts.samples_per_stratum);
    const long double mean = sum / cnt;
    estimate += mean;
    variance += std::max(0.0L, sum2 / cnt - mean * mean) / cnt;
  }
  r.bruteforce = static_cast<double>(estimate / factorial);
  r.std_error = static_cast<double>(std::sqrt(variance) / factorial);
  return r;
}

double bony_functional(const KineticTrajectory& traj, double velocity_shift) {
  const KineticState& s = traj.initial;
  const std::size_t nv = s.velocities();
  std::vector<double> terms, g(nv);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const double dt = traj.slab.dt(k);
    for (std::size_t j = 0; j < s.cells(); ++j) {
      for (std::size_t q = 0; q < nv; ++q) g[q] = s.weights[q] * traj.snapshots[k][j * nv + q];
      terms.push_back(dt * s.dy() * pair_determinant(g, s.nodes, velocity_shift));
    }
  }
  return pairwise_sum(terms);
}

KineticDiagnostics kinetic_invariants(const KineticState& init, double velocity_shift) {
  init.validate();
  const std::size_t nv = init.velocities();
  std::vector<double> g(nv, 0.0);
  for (std::size_t k = 0; k < nv; ++k) {
    std::vector<double> col(init.cells());
    for (std::size_t j = 0; j < init.cells(); ++j) col[j] = init.weights[k] * init.at(j, k) * init.dy();
    g[k] = pairwise_sum(col);
  }
  KineticDiagnostics d;
  d.m0 = pairwise_sum(g);
  d.d0 = pair_determinant(g, init.nodes, velocity_shift);
  d.c_n = flow_constant(1);
  return d;
}

CheckReport kinetic_bound_check(const KineticTrajectory& traj, const KineticDiagnostics& diag, Tolerance tol) {
  const double lhs = bony_functional(traj);
  const double ideal = 2.0 * diag.c_n * diag.m0 * std::sqrt(std::max(diag.d0, 0.0));
  if (traj.slab.steps() == 0) return make_report("kinetic_bound", lhs, ideal, traj.initial.dy(), tol.total());
  const SlabBound b = slab_bound(traj.slab);
  auto r = make_report("kinetic_bound", lhs, corrected_rhs(ideal, b), traj.initial.dy(), tol.total(),
                       "pass is against the divergence-corrected bound");
  r.extras = {{"ideal_rhs", ideal},
              {"ideal_holds", lhs <= ideal ? 1.0 : 0.0},
              {"bound_with_jumps", b.with_jumps},
              {"divergence_mass", b.divergence_mass},
              {"m0", diag.m0},
              {"d0", diag.d0},
              {"entropy_increase", traj.entropy_increase},
              {"relaxation_defect", traj.relaxation_defect},
              {"unrelaxed_cells", static_cast<double>(traj.unrelaxed_cells)}};
  return r;
}

namespace {

double schur_margin(double rho, const SmallVector& m, const SymMat& t, const SymMat& sigma) {
  const int n = t.dim();
  SymMat a(n + 1);
  a(0, 0) = rho;
  for (int i = 0; i < n; ++i) {
    a(0, i + 1) = m(i);
    for (int j = i; j < n; ++j) a(i + 1, j + 1) = t(i, j) + sigma(i, j);
  }
  const double det = a.det(), floor = rho * sigma.det();
  return (det - floor) / (1.0 + std::abs(det) + std::abs(floor));
}

}  // namespace

CheckReport defect_schur_check(const DefectSample& sample, std::size_t count, std::uint64_t seed) {
  const int n = sample.t.dim();
  require(sample.m.size() == n && sample.sigma.dim() == n, ErrorKind::DomainMismatch, "sample blocks disagree");
  SymMat moments(n + 1);
  moments(0, 0) = sample.rho;
  for (int i = 0; i < n; ++i) {
    moments(0, i + 1) = sample.m(i);
    for (int j = i; j < n; ++j) moments(i + 1, j + 1) = sample.t(i, j);
  }
  if (!psd_check(moments) || !psd_check(sample.sigma)) fail(ErrorKind::NotPSD, "sample blocks must be PSD");

  double worst = schur_margin(sample.rho, sample.m, sample.t, sample.sigma);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> rank(1, n + 1);
  const double scale = 1.0 + moments.trace() + sample.sigma.trace();
  for (std::size_t s = 0; s < count; ++s) {
    const int r1 = rank(rng), r2 = std::min(rank(rng), n);
    SmallMatrix g(n + 1, r1), q(n, r2);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = gauss(rng);
    for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = gauss(rng);
    const double amp = scale * std::exp(gauss(rng));
    const SymMat pm = moments + SymMat::from_matrix(amp * g * g.transpose());
    const SymMat ps = sample.sigma + SymMat::from_matrix(amp * q * q.transpose());
    SmallVector m(n);
    SymMat t(n);
    for (int i = 0; i < n; ++i) {
      m(i) = pm(0, i + 1);
      for (int j = i; j < n; ++j) t(i, j) = pm(i + 1, j + 1);
    }
    worst = std::min(worst, schur_margin(pm(0, 0), m, t, ps));
  }
  auto r = make_report("defect_schur", -worst, 0.0, 0.0, 1e-12, "lhs is minus the worst normalized margin");
  r.extras = {{"min_margin", worst}, {"samples", static_cast<double>(count + 1)}};
  return r;
}

}  // namespace dpt
