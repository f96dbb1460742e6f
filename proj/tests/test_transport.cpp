#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dpt/constructors.hpp"
#include "dpt/errors.hpp"
#include "dpt/transport.hpp"

using namespace dpt;
using std::numbers::pi;

namespace {

SmallVector vec(std::initializer_list<double> v) {
  SmallVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

// phi = a cos(2 pi x) + b sin(2 pi (x + y)) on the unit square
struct Manufactured {
  double a = 0.008, b = 0.006;
  double phi(double x, double y) const { return a * std::cos(2 * pi * x) + b * std::sin(2 * pi * (x + y)); }
  double det(const SymMat& s, double x, double y) const {
    const double w = 4 * pi * pi;
    const double sxy = -w * b * std::sin(2 * pi * (x + y));
    const double hxx = -w * a * std::cos(2 * pi * x) + sxy;
    return (s(0, 0) + hxx) * (s(1, 1) + sxy) - (s(0, 1) + sxy) * (s(0, 1) + sxy);
  }
};

}  // namespace

TEST_CASE("Monge-Ampere manufactured solution") {
  for (const SymMat& s : {SymMat::identity(2), SymMat::from_rows({{1.5, 0.2}, {0.2, 1.0}})}) {
    auto mesh = make_mesh(Torus::unit(2), GridSpec{{64, 64}});
    const Manufactured m;
    ScalarField f(mesh);
    for (std::size_t c = 0; c < f.size(); ++c) f[c] = m.det(s, mesh->center(c)[0], mesh->center(c)[1]);
    // the mean of f equals det S up to roundoff; shift it exactly
    const double shift = s.det() - average(f);
    for (double& x : f.raw()) x += shift;

    const MASolution sol = solve_periodic_ma(f, s);
    CHECK(sol.residual <= 1e-10);
    CHECK(sol.newton_iterations <= 12);
    double err = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c)
      err = std::max(err, std::abs(sol.phi[c] - m.phi(mesh->center(c)[0], mesh->center(c)[1])));
    CHECK(err <= 1e-8);
    CHECK(ma_diagnostics_csv(sol).starts_with("iteration,residual,damping\n1,"));
  }
}

TEST_CASE("Monge-Ampere on a sheared lattice recovers a Hessian-cofactor potential") {
  Torus t{SmallMatrix(2, 2)};
  t.basis << 1.0, 0.0, 0.4, 1.2;
  auto mesh = make_mesh(t, GridSpec{{48, 48}});
  // dual lattice vectors keep the polynomial periodic
  const SmallMatrix dual = t.basis.inverse();
  TrigPolynomial psi{0.0, {{dual.col(0), 0.004, 0.002}, {dual.col(1), 0.0, 0.003}}};
  const SymMat s = SymMat::from_rows({{1.2, 0.1}, {0.1, 0.9}});
  const TensorField a = hessian_cofactor({s, psi, {}, {}}, mesh);
  ScalarField f = map_cells(a, [](const SymMat& m) { return m.det(); });
  const double shift = s.det() - average(f);
  for (double& x : f.raw()) x += shift;
  const MASolution sol = solve_periodic_ma(f, s);
  CHECK(sol.residual <= 1e-10);
  double err = 0.0, mean = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) mean += psi(mesh->center(c));
  mean /= static_cast<double>(f.size());
  for (std::size_t c = 0; c < f.size(); ++c)
    err = std::max(err, std::abs(sol.phi[c] - psi(mesh->center(c)) + mean));
  CHECK(err <= 1e-8);
}

TEST_CASE("Monge-Ampere input validation") {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{16, 16}});
  ScalarField f(mesh, 1.0);
  try {
    solve_periodic_ma(f, SymMat::identity(2, 1.1));
    FAIL("expected CompatibilityViolated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CompatibilityViolated);
  }
  f[3] = 0.0;
  try {
    solve_periodic_ma(f, SymMat::identity(2));
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
  MAOptions tight;
  tight.max_iterations = 0;
  ScalarField g(mesh);
  for (std::size_t c = 0; c < g.size(); ++c) g[c] = 1.0 + 0.1 * std::cos(2 * pi * mesh->center(c)[0]);
  try {
    solve_periodic_ma(g, SymMat::identity(2), tight);
    FAIL("expected MaxIterations");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MaxIterations);
  }
}

TEST_CASE("optimal shape matrix") {
  const SymMat s = optimal_shape_matrix(SymMat::from_rows({{2, 0}, {0, 1}}), 2.0);
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(1, 1) == doctest::Approx(2.0));
  CHECK(s(0, 1) == 0.0);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int d = 2; d <= 4; ++d)
    for (int trial = 0; trial < 50; ++trial) {
      SmallMatrix b(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) b(i, j) = g(rng);
      const SymMat a = SymMat::from_matrix(b * b.transpose() + SmallMatrix::Identity(d, d) * 0.1);
      const double fbar = std::exp(g(rng));
      const SymMat sh = optimal_shape_matrix(a, fbar);
      CHECK(sh.det() == doctest::Approx(fbar).epsilon(1e-10));
      const double tr = (a.matrix() * sh.matrix()).trace() / d;
      CHECK(tr == doctest::Approx(std::pow(fbar, 1.0 / d) * std::pow(a.det(), 1.0 / d)).epsilon(1e-10));
    }
  try {
    optimal_shape_matrix(SymMat::from_rows({{1, 1}, {1, 1}}), 1.0);
    FAIL("expected SingularAPlus");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularAPlus);
  }
}

TEST_CASE("lattice constants") {
  CHECK(lattice_trace_constant(SmallMatrix::Identity(2, 2)) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  SmallMatrix m(2, 2);
  m << 2, 0, 0, 1;
  CHECK(lattice_gradient_constant(m, SymMat::identity(2)) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  SmallMatrix sing(2, 2);
  sing << 1, 2, 2, 4;
  CHECK_THROWS_AS(lattice_inverse_norm(sing), Error);
}

TEST_CASE("gradient bound holds for convex periodic potentials") {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{32, 32}});
  TrigPolynomial psi{0.0, {{vec({1, 0}), 0.025, 0.0}, {vec({0, 1}), 0.0, 0.02}}};
  const SymMat s = SymMat::identity(2);
  double gmax = 0.0;
  for (std::size_t c = 0; c < mesh->size(); ++c) {
    const double x = mesh->center(c)[0], y = mesh->center(c)[1];
    gmax = std::max(gmax, std::hypot(-0.025 * 2 * pi * std::sin(2 * pi * x), 0.02 * 2 * pi * std::cos(2 * pi * y)));
  }
  CHECK(gmax <= lattice_gradient_constant(SmallMatrix::Identity(2, 2), s));
}

TEST_CASE("proof trace on Hessian-cofactor fields") {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{48, 48}});
  TrigPolynomial psi{0.0, {{vec({1, 1}), 0.006, 0.0}, {vec({2, -1}), 0.0, 0.002}}};
  const TensorField a = hessian_cofactor({SymMat::from_rows({{1.3, 0.2}, {0.2, 1.0}}), psi, {}, {}}, mesh);
  const ProofTrace pt = proof_trace_periodic(a);
  CHECK(pt.report.pass);
  CHECK(pt.min_slack >= -1e-10);
  CHECK(std::abs(pt.mean_slack - (pt.shape_gap - pt.divergence_term)) <= 1e-12);
  // two-dimensional periodic fields are equality cases
  CHECK(std::abs(pt.periodic_gap) <= 1e-9);
  CHECK(std::abs(pt.mean_slack) <= 1e-9);
}

TEST_CASE("proof trace on a non-divergence-free field") {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{48, 48}});
  TensorField a(mesh);
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double x = mesh->center(c)[0], y = mesh->center(c)[1];
    a.set(c, SymMat::from_rows({{1.0 + 0.2 * std::cos(2 * pi * x), 0.05 * std::sin(2 * pi * y)},
                                {0.05 * std::sin(2 * pi * y), 1.0 + 0.1 * std::sin(2 * pi * (x + y))}}));
  }
  const ProofTrace pt = proof_trace_periodic(a);
  CHECK(pt.min_slack >= -1e-10);
  CHECK(std::abs(pt.mean_slack - (pt.shape_gap - pt.divergence_term)) <= 1e-12);
  CHECK(pt.shape_gap >= -1e-12);
}

TEST_CASE("nondivergence bound") {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{128, 128}});
  TensorField a(mesh);
  for (std::size_t c = 0; c < a.size(); ++c) a.set(c, SymMat::diagonal(std::vector<double>{1.0 + 0.5 * std::cos(2 * pi * mesh->center(c)[0]), 1.0}));
  const CheckReport r = nondiv_bound(a);
  // |d/dx a| integrates to 2 on the period
  CHECK(r.extra("mean_divergence_mass") == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx((1 + std::sqrt(2.0)) * (1 + std::sqrt(2.0))).epsilon(1e-3));
  CHECK(r.pass);
}
