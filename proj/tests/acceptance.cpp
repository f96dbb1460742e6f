#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dpt/constructors.hpp"
#include "dpt/fluid.hpp"
#include "dpt/homogenization.hpp"
#include "dpt/inequalities.hpp"
#include "dpt/kinetic.hpp"
#include "dpt/transport.hpp"

using namespace dpt;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit = 0.0;  // seconds, 0 for none
  std::function<Outcome()> run;
};

SmallVector vec(std::initializer_list<double> v) {
  SmallVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome hessian_cofactor_equality() {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{64, 64}});
  // 0.01 cos(2 pi x1) cos(2 pi x2) as two plane waves
  const TrigPolynomial psi{0.0, {{vec({1, 1}), 0.005, 0.0}, {vec({1, -1}), 0.005, 0.0}}};
  const CheckReport r = verify_periodic(hessian_cofactor({SymMat::identity(2), psi, {}, {}}, mesh));
  return {std::abs(r.slack) <= 1e-8, fmt("slack %.3e", r.slack)};
}

Outcome laminate_strict() {
  const auto spec = LaminateSpec::with_fraction(SymMat::identity(3), SymMat::from_rows({{2, 0, 0}, {0, 5, 0}, {0, 0, 1}}),
                                                vec({0, 0, 1}), 0.5);
  const CheckReport r = verify_periodic(spec);
  const long double lhs = (1.0L + std::sqrt(10.0L)) / 2.0L, rhs = std::sqrt(4.5L);
  const double oracle = static_cast<double>(rhs - lhs);
  // 0.04018 is the oracle rounded to five digits
  const bool ok = std::abs(r.lhs - lhs) <= 1e-14 && std::abs(r.rhs - rhs) <= 1e-14 &&
                  std::abs(r.slack - oracle) <= 1e-6 && std::abs(r.slack - 0.04018) <= 5e-6;
  return {ok, fmt("lhs %.15f rhs %.15f slack %.10f (oracle %.10f)", r.lhs, r.rhs, r.slack, oracle)};
}

Outcome convex_domain() {
  const SymMat id = SymMat::identity(2);
  double worst = 0.0;
  for (int m : {8, 16, 32, 64}) {
    const CheckReport disk = verify_convex(constant_field(make_mesh(Ball{vec({0, 0}), 1.0}, GridSpec{{m, 2 * m}}), id), false);
    worst = std::max({worst, std::abs(disk.lhs - pi), std::abs(disk.rhs - pi)});
  }
  double sq_err = 0.0;
  for (int m : {8, 32}) {
    const CheckReport sq = verify_convex(constant_field(make_mesh(Box{vec({0, 0}), vec({1, 1})}, GridSpec{{m, m}}), id), true);
    sq_err = std::max(sq_err, std::abs(sq.slack - (4.0 / pi - 1.0)));
  }
  return {worst <= 1e-6 && sq_err <= 1e-6, fmt("disk error %.2e, square slack error %.2e", worst, sq_err)};
}

Outcome concavity_threshold() {
  bool ok = true;
  std::ostringstream os;
  for (int d : {2, 3, 4}) {
    const double alpha = 1.0 / (d - 1);
    const CheckReport sweep = concavity_sweep(d, alpha, 50, 0x5EED + d);
    std::vector<double> diag(d, 1.0);
    diag.back() = 0.0;
    const auto probe = lambda_concavity_probe(SymMat::identity(d), SymMat::diagonal(diag), alpha + 0.05);
    const bool witness = !probe.concave && probe.witness.has_value();
    ok = ok && sweep.pass && witness;
    os << "d=" << d << (sweep.pass ? " concave" : " NOT concave") << (witness ? "/witness " : "/no witness ");
  }
  return {ok, os.str()};
}

Outcome andreiev_identity() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.1, 2.0);
  double worst = 0.0;
  bool exhaustive = true;
  for (int n = 1; n <= 2; ++n)
    for (std::size_t count = 1; count <= 8; ++count)
      for (int draw = 0; draw < 100; ++draw) {
        std::vector<VelocityAtom> atoms;
        for (std::size_t i = 0; i < count; ++i) {
          SmallVector v(n);
          for (int a = 0; a < n; ++a) v(a) = u(rng);
          atoms.push_back({v, w(rng), w(rng)});
        }
        const AndreievResult r = andreiev_det(atoms, n);
        exhaustive = exhaustive && r.exhaustive;
        worst = std::max(worst, std::abs(r.direct - r.bruteforce) / (1.0 + std::abs(r.direct)));
      }
  return {exhaustive && worst <= 1e-12, fmt("worst relative gap %.2e over 1600 draws", worst)};
}

Outcome relativistic_determinant() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0), s(-1.0, 1.0), speed(0.0, 0.99);
  const double c = 1.0;
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + trial % 3;
    const double rho = u(rng), p = u(rng);
    std::vector<double> v(n);
    double norm = 0.0;
    for (auto& x : v) {
      x = s(rng);
      norm += x * x;
    }
    const double scale = speed(rng) * c / std::sqrt(norm);
    for (auto& x : v) x *= scale;
    const double target = rho * std::pow(p, n);
    worst = std::max(worst, std::abs(relativistic_tensor(rho, v, p, c).det() - target) / (1.0 + target));
  }
  return {worst <= 1e-12, fmt("worst scaled error %.2e over 10000 states", worst)};
}

Outcome euler_bound() {
  const FluidState s = gaussian_bump(800, -5.0, 5.0, 1.0, 0.5, 0.0, {EosKind::Polytropic, 1.4, 1.0});
  const EulerTrajectory t = euler_run_1d(s, 0.5, 0.5);
  bool monotone = true;
  for (std::size_t k = 1; k < t.energy.size(); ++k) monotone = monotone && t.energy[k] <= t.energy[k - 1];
  const CheckReport r = euler_bound_check(t, flow_invariants(s));
  const bool ok = t.mass_drift <= 1e-12 && monotone && r.pass;
  return {ok, fmt("mass drift %.1e, lhs %.5f <= corrected %.5f (ideal %.5f reported), %zu steps", t.mass_drift, r.lhs,
                  r.rhs, r.extra("ideal_rhs"), t.energy.size() - 1)};
}

Outcome monge_ampere() {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{64, 64}});
  const SymMat s = SymMat::from_rows({{1.5, 0.2}, {0.2, 1.0}});
  const double a = 0.008, b = 0.006, w = 4 * pi * pi;
  const auto phi = [&](double x, double y) { return a * std::cos(2 * pi * x) + b * std::sin(2 * pi * (x + y)); };
  ScalarField f(mesh);
  for (std::size_t c = 0; c < f.size(); ++c) {
    const double x = mesh->center(c)[0], y = mesh->center(c)[1];
    const double sxy = -w * b * std::sin(2 * pi * (x + y));
    const double hxx = -w * a * std::cos(2 * pi * x) + sxy;
    f[c] = (s(0, 0) + hxx) * (s(1, 1) + sxy) - (s(0, 1) + sxy) * (s(0, 1) + sxy);
  }
  const double shift = s.det() - average(f);
  for (double& x : f.raw()) x += shift;
  const MASolution sol = solve_periodic_ma(f, s);
  double err = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c)
    err = std::max(err, std::abs(sol.phi[c] - phi(mesh->center(c)[0], mesh->center(c)[1])));

  auto grid = make_mesh(Torus::unit(2), GridSpec{{48, 48}});
  const TrigPolynomial psi{0.0, {{vec({1, 1}), 0.006, 0.0}, {vec({2, -1}), 0.0, 0.002}}};
  const ProofTrace pt = proof_trace_periodic(hessian_cofactor({SymMat::from_rows({{1.3, 0.2}, {0.2, 1.0}}), psi, {}, {}}, grid));
  const double gap_err = std::abs(pt.mean_slack - pt.periodic_gap);
  const double allowed = 2.0 * pt.report.tolerance;
  const bool ok = err <= 1e-8 && pt.min_slack >= -1e-10 && gap_err <= allowed;
  return {ok, fmt("potential error %.2e, min slack %.2e, |mean slack - gap| %.2e (allowed %.1e)", err, pt.min_slack,
                  gap_err, allowed)};
}

Outcome homogenization() {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{64, 64}});
  TensorField layers(mesh);
  for (std::size_t k = 0; k < layers.size(); ++k)
    layers.set(k, mesh->center(k)[0] < 0.5 ? SymMat::identity(2) : SymMat::identity(2, 4.0));
  const SymMat lam = effective_tensor(layers);
  const double lam_err = std::max({std::abs(lam(0, 0) - 1.6), std::abs(lam(1, 1) - 2.5), std::abs(lam(0, 1))});

  auto grid = make_mesh(Torus::unit(2), GridSpec{{32, 32}});
  const TrigPolynomial psi{0.0, {{vec({1, 1}), 0.006, 0.0}, {vec({2, -1}), 0.0, 0.002}}};
  const std::vector<TensorField> dpt_fields{
      constant_field(grid, SymMat::from_rows({{2.0, 0.3}, {0.3, 1.0}})),
      hessian_cofactor({SymMat::from_rows({{1.3, 0.2}, {0.2, 1.0}}), psi, {}, {}}, grid),
      diagonal_dpt({{TrigPolynomial{1.5, {{vec({0, 1}), 0.4, 0.0}}}, TrigPolynomial{2.0, {{vec({1, 0}), 0.0, 0.7}}}}}, grid),
      laminate(LaminateSpec::with_fraction(SymMat::identity(2), SymMat::from_rows({{3.0, 0.0}, {0.0, 1.0}}), vec({0, 1}), 0.3),
               grid)};
  double worst = 0.0;
  for (const auto& f : dpt_fields) worst = std::max(worst, (effective_tensor(f) - field_average(f)).frobenius());
  return {lam_err <= 1e-6 && worst <= 1e-8, fmt("laminate error %.2e, worst |A_eff - mean| %.2e", lam_err, worst)};
}

Outcome defect_schur() {
  double worst = 1.0;
  for (int n = 1; n <= 3; ++n) {
    DefectSample z{1.0, SmallVector::Zero(n), SymMat::identity(n), SymMat(n)};
    worst = std::min(worst, defect_schur_check(z, 100000, static_cast<std::uint64_t>(n)).extra("min_margin"));
  }
  return {worst >= -1e-12, fmt("worst normalized margin %.3e over 300000 samples", worst)};
}

Outcome galilean() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FluidState s = gaussian_bump(300, -4.0, 4.0, 2.0, 0.6, 0.0, {EosKind::Polytropic, 1.4, 0.8});
  for (std::size_t j = 0; j < s.cells(); ++j) s.m[j] = s.rho[j] * u(rng);
  const double d0 = flow_invariants(s).d0;
  double fluid_err = 0.0;
  for (double c : {0.5, -3.0, 20.0}) {
    FluidState moved = s;
    for (std::size_t j = 0; j < s.cells(); ++j) moved.m[j] += c * s.rho[j];
    fluid_err = std::max(fluid_err, std::abs(flow_invariants(moved).d0 - d0) / d0);
  }

  const KineticState k = two_beam(200, -5.0, 5.0, 16, 3.0, 1.0, 0.3, 0.5, 0.1);
  const KineticTrajectory t = bgk_run_1d(k, 0.5, 0.9);
  const double kd0 = kinetic_invariants(k).d0, it = bony_functional(t);
  double kinetic_err = 0.0;
  for (double c : {0.5, -2.0, 7.0}) {
    kinetic_err = std::max(kinetic_err, std::abs(kinetic_invariants(k, c).d0 - kd0) / kd0);
    kinetic_err = std::max(kinetic_err, std::abs(bony_functional(t, c) - it) / it);
  }
  return {fluid_err <= 1e-12 && kinetic_err <= 1e-12,
          fmt("fluid D0 relative change %.2e, kinetic D0/I_T relative change %.2e", fluid_err, kinetic_err)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"hessian_cofactor_equality", 1.0, hessian_cofactor_equality},
      {"laminate_strict_inequality", 0.0, laminate_strict},
      {"convex_domain_equality", 0.0, convex_domain},
      {"concavity_threshold", 5.0, concavity_threshold},
      {"andreiev_identity", 0.0, andreiev_identity},
      {"relativistic_determinant", 0.0, relativistic_determinant},
      {"euler_bound", 30.0, euler_bound},
      {"monge_ampere_prover", 0.0, monge_ampere},
      {"homogenization", 0.0, homogenization},
      {"defect_schur_bound", 0.0, defect_schur},
      {"galilean_invariance", 0.0, galilean},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && secs >= c.time_limit) {
      o.pass = false;
      o.detail += fmt(" [over time limit %.0f s]", c.time_limit);
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %-28s %7.3fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, c.name.c_str(), secs, o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
