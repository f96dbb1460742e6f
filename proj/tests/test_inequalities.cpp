#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "dpt/calculus.hpp"
#include "dpt/errors.hpp"
#include "dpt/inequalities.hpp"

using namespace dpt;
using std::numbers::pi;

namespace {

SmallVector vec(std::initializer_list<double> v) {
  SmallVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

TrigPolynomial random_trig(std::mt19937_64& rng, int d, double amp) {
  std::uniform_int_distribution<int> k(-2, 2);
  std::uniform_real_distribution<double> c(-amp, amp);
  TrigPolynomial p;
  for (int t = 0; t < 4; ++t) {
    SmallVector w(d);
    for (int a = 0; a < d; ++a) w(a) = k(rng);
    p.terms.push_back({w, c(rng), c(rng)});
  }
  return p;
}

}  // namespace

TEST_CASE("laminate periodic slack in three dimensions") {
  const SymMat b = SymMat::identity(3);
  const SymMat c = SymMat::from_rows({{2, 0, 0}, {0, 5, 0}, {0, 0, 1}});
  const auto spec = LaminateSpec::with_fraction(b, c, vec({0, 0, 1}), 0.5);
  const CheckReport exact = verify_periodic(spec);
  // independent closed form: (1 + sqrt 10)/2 against sqrt 4.5
  CHECK(exact.lhs == doctest::Approx((1.0 + std::sqrt(10.0)) / 2.0).epsilon(1e-15));
  CHECK(exact.rhs == doctest::Approx(std::sqrt(4.5)).epsilon(1e-15));
  CHECK(std::abs(exact.slack - 0.0401815) < 1e-6);
  CHECK(exact.pass);
  const CheckReport sampled = verify_periodic(laminate(spec, make_mesh(Torus::unit(3), GridSpec{{4, 4, 16}})));
  CHECK(sampled.slack == doctest::Approx(exact.slack).epsilon(1e-13));
}

TEST_CASE("Hessian cofactor fields are equality cases") {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{64, 64}});
  TrigPolynomial psi{0.0, {{vec({1, 1}), 0.005, 0.0}, {vec({1, -1}), 0.005, 0.0}}};
  const CheckReport r = verify_periodic(hessian_cofactor({SymMat::identity(2), psi, {}, {}}, mesh));
  CHECK(std::abs(r.slack) <= 1e-8);
  CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const SymMat s = SymMat::from_rows({{2.0, 0.3}, {0.3, 1.5}});
    const TensorField f = hessian_cofactor({s, random_trig(rng, 2, 0.002), {}, {}}, mesh);
    const CheckReport rr = verify_periodic(f);
    CHECK(std::abs(rr.slack) <= 1e-10);
    CHECK(rr.rhs == doctest::Approx(s.det()).epsilon(1e-12));
  }
}

TEST_CASE("periodic inequality holds for random three-dimensional potentials") {
  std::mt19937_64 rng(5);
  auto mesh = make_mesh(Torus::unit(3), GridSpec{{16, 16, 16}});
  for (int trial = 0; trial < 5; ++trial) {
    const TensorField f = hessian_cofactor({SymMat::identity(3), random_trig(rng, 3, 0.0005), {}, {}}, mesh);
    CHECK(verify_periodic(f).slack >= -1e-12);
  }
}

TEST_CASE("periodic slack scales under congruence") {
  const auto spec = LaminateSpec::with_fraction(SymMat::identity(3), SymMat::from_rows({{2, 0, 0}, {0, 5, 0}, {0, 0, 1}}),
                                                vec({0, 0, 1}), 0.5);
  const TensorField f = laminate(spec, make_mesh(Torus::unit(3), GridSpec{{4, 4, 8}}));
  SmallMatrix p{{1.0, 0.5, 0.0}, {0.2, 2.0, 0.0}, {0.0, 0.3, 1.5}};
  const TensorField g = congruence(f, p);
  const double factor = std::pow(std::abs(p.determinant()), 2.0 / 2.0);
  CHECK(verify_periodic(g).slack == doctest::Approx(factor * verify_periodic(f).slack).epsilon(1e-12));
  CHECK(divergence_mass(g) <= 1e-12);
}

TEST_CASE("convex-domain inequality on the disk and the square") {
  const SymMat id = SymMat::identity(2);
  const CheckReport disk = verify_convex(constant_field(make_mesh(Ball{vec({0, 0}), 1.0}, GridSpec{{8, 16}}), id), false);
  CHECK(disk.lhs == doctest::Approx(pi).epsilon(1e-13));
  CHECK(disk.rhs == doctest::Approx(pi).epsilon(1e-13));
  const CheckReport sq = verify_convex(constant_field(make_mesh(Box{vec({0, 0}), vec({1, 1})}, GridSpec{{8, 8}}), id), true);
  CHECK(sq.lhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sq.rhs == doctest::Approx(4.0 / pi).epsilon(1e-13));
  CHECK(std::abs(sq.slack - (4.0 / pi - 1.0)) < 1e-12);
  const CheckReport ball3 =
      verify_convex(constant_field(make_mesh(Ball{vec({0, 0, 0}), 1.0}, GridSpec{{6, 8, 16}}), SymMat::identity(3)), false);
  CHECK(ball3.slack == doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS(verify_convex(constant_field(make_mesh(Torus::unit(2), GridSpec{{8, 8}}), id), false), Error);
}

TEST_CASE("radial convex potential on the disk is an equality case") {
  // theta = |x|^2/2 + |x|^4/4: both sides equal 4 pi
  double prev_lhs = 1.0, prev_rhs = 1.0;
  for (int n : {16, 32, 64}) {
    auto mesh = make_mesh(Ball{vec({0, 0}), 1.0}, GridSpec{{n, 2 * n}});
    const TensorField a = hessian_cofactor({SymMat::identity(2), {}, {1.0}, {}}, mesh);
    const CheckReport r = verify_convex(a, false);
    const double el = std::abs(r.lhs - 4 * pi), er = std::abs(r.rhs - 4 * pi);
    CHECK(el < prev_lhs / 3.0);
    CHECK(er < prev_rhs / 3.0);
    prev_lhs = el;
    prev_rhs = er;
  }
  CHECK(prev_lhs < 1e-2);
  CHECK(prev_rhs < 1e-2);
}

TEST_CASE("polygon domains") {
  ConvexPolytope tri{{{vec({-1, 0}), 0.0}, {vec({0, -1}), 0.0}, {vec({1, 1}), 1.0}}};
  const CheckReport r = verify_convex(constant_field(make_mesh(tri, GridSpec{{6, 6}}), SymMat::identity(2)), true);
  CHECK(r.lhs == doctest::Approx(0.5));
  CHECK(r.rhs == doctest::Approx(std::pow(2.0 + std::sqrt(2.0), 2) / (4 * pi)));
  CHECK(r.pass);
}

TEST_CASE("Gagliardo specialization") {
  // d = 2 is an identity by discrete Fubini
  auto mesh2 = make_mesh(Torus::unit(2), GridSpec{{16, 16}});
  DiagonalSpec two{{TrigPolynomial{1.0, {{vec({0, 1}), 0.3, 0.1}}}, TrigPolynomial{2.0, {{vec({1, 0}), 0.0, 0.7}}}}};
  const CheckReport r2 = gagliardo_check(two, mesh2);
  CHECK(r2.slack == doctest::Approx(0.0).epsilon(1e-14));

  auto mesh3 = make_mesh(Torus::unit(3), GridSpec{{4, 64, 4}});
  DiagonalSpec three{{TrigPolynomial{1.0, {{vec({0, 1, 0}), 0.0, 0.5}}}, TrigPolynomial{1.0, {}}, TrigPolynomial{1.0, {}}}};
  const CheckReport r3 = gagliardo_check(three, mesh3);
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double t) { return std::sqrt(1.0 + 0.5 * std::sin(2 * pi * t)); }, 0.0, 1.0);
  CHECK(r3.lhs == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(r3.rhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r3.lhs < 1.0);
  CHECK(r3.pass);
}

TEST_CASE("Lambda-concavity threshold") {
  for (int d : {2, 3, 4}) {
    const double alpha = 1.0 / (d - 1);
    CHECK(concavity_sweep(d, alpha, 50, 0x5EED).pass);
    std::vector<double> diag(d, 1.0);
    diag.back() = 0.0;
    const auto probe = lambda_concavity_probe(SymMat::identity(d), SymMat::diagonal(diag), alpha + 0.05);
    CHECK_FALSE(probe.concave);
    REQUIRE(probe.witness.has_value());
    CHECK((*probe.witness)[1] == doctest::Approx(0.5 * ((*probe.witness)[0] + (*probe.witness)[2])));
  }
  CHECK_THROWS_AS(lambda_concavity_probe(SymMat::identity(2), SymMat::identity(2), 1.0), Error);
  // d = 2 at alpha = 1 is affine along singular lines
  const auto affine = lambda_concavity_probe(SymMat::identity(2), SymMat::from_rows({{1, 1}, {1, 1}}), 1.0);
  CHECK(affine.concave);
  CHECK(std::abs(affine.worst_violation) < 1e-12);
}

TEST_CASE("compact support mean") {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{64, 64}});
  const TensorField bump = hessian_cofactor({SymMat::identity(2), {}, {}, {{vec({0.5, 0.5}), 0.3, 0.002}}}, mesh);
  const CheckReport r = compact_support_mean(bump, SymMat::identity(2));
  CHECK(r.pass);
  CHECK(r.lhs <= 1e-12);
  CHECK(r.extra("periodic_lhs") <= r.extra("periodic_rhs") + 1e-12);
  const auto lam = laminate(LaminateSpec::with_fraction(SymMat::identity(2), SymMat::from_rows({{2, 0}, {0, 1}}), vec({0, 1}), 0.5),
                            make_mesh(Torus::unit(2), GridSpec{{16, 16}}));
  CHECK_THROWS_AS(compact_support_mean(lam, SymMat::identity(2)), Error);
}

TEST_CASE("vanishing trace guards and bound") {
  auto mesh = make_mesh(Ball{vec({0, 0}), 1.0}, GridSpec{{16, 32}});
  const CheckReport na = vanishing_trace_check(constant_field(mesh, SymMat::identity(2)));
  CHECK_FALSE(na.applicable);
  CHECK(na.pass);
  const CheckReport small = vanishing_trace_check(constant_field(mesh, SymMat::identity(2, 1e-4)));
  CHECK(small.applicable);
  CHECK(small.pass);
  CHECK(small.lhs == doctest::Approx(2 * pi * 1e-4).epsilon(1e-10));
  // a non-solenoidal field fails the divergence guard
  TensorField grad(mesh);
  for (std::size_t c = 0; c < mesh->size(); ++c) grad.set(c, SymMat::identity(2, 1e-4 * (2.0 + mesh->center(c)[0])));
  CHECK_FALSE(vanishing_trace_check(grad, {1e-3, 1e-3}).applicable);
}

TEST_CASE("isoperimetric specialization") {
  const CheckReport ball = isoperimetric_check(Ball{vec({0, 0}), 0.5}, GridSpec{{8, 16}});
  CHECK(ball.lhs == doctest::Approx(pi * 0.25).epsilon(1e-13));
  CHECK(ball.slack == doctest::Approx(0.0).epsilon(1e-12));
  const CheckReport square = isoperimetric_check(Box{vec({0, 0}), vec({0.5, 0.5})}, GridSpec{{4, 4}});
  CHECK(square.slack == doctest::Approx(0.25 * (4.0 / pi - 1.0)).epsilon(1e-12));
}

TEST_CASE("exact laminate arithmetic rejects incompatible states") {
  SymMat b = SymMat::identity(2), c = SymMat::identity(2);
  c(0, 0) = 3.0;
  c(1, 1) = 2.0;
  SmallVector xi(2);
  xi << 1.0, 0.0;
  CHECK_THROWS_AS(verify_periodic(LaminateSpec::with_fraction(b, c, xi, 0.25)), Error);
  c(0, 0) = 1.0;
  const CheckReport r = verify_periodic(LaminateSpec::with_fraction(b, c, xi, 0.25));
  CHECK(r.pass);
  // both sides equal 0.25 * 1 + 0.75 * 2
  CHECK(r.lhs == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(r.rhs == doctest::Approx(1.75).epsilon(1e-15));
}
