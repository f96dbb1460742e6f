#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dpt/calculus.hpp"
#include "dpt/constructors.hpp"
#include "dpt/errors.hpp"

using namespace dpt;
using std::numbers::pi;

namespace {

SmallVector vec(std::initializer_list<double> v) {
  SmallVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

// 0.01 cos(2 pi x1) cos(2 pi x2) as a sum of two plane waves
TrigPolynomial product_wave(double amp) {
  return TrigPolynomial{0.0, {{vec({1, 1}), 0.5 * amp, 0.0}, {vec({1, -1}), 0.5 * amp, 0.0}}};
}

}  // namespace

TEST_CASE("pointwise physical tensors") {
  const double u3[] = {3.0};
  const SymMat e = euler_tensor(2.0, u3, 5.0);
  CHECK(e == SymMat::from_rows({{2, 6}, {6, 23}}));
  CHECK(e.det() == doctest::Approx(10.0));
  const double u0[] = {0.0};
  CHECK(euler_tensor(1.0, u0, 2.0) == SymMat::from_rows({{1, 0}, {0, 2}}));
  CHECK_THROWS_AS(euler_tensor(-1.0, u0, 1.0), Error);
  CHECK_THROWS_AS(euler_tensor(1.0, u0, -1.0), Error);

  std::vector<VelocityAtom> atoms{{vec({0.0}), 1.0, 1.0}, {vec({1.0}), 1.0, 1.0}};
  CHECK(kinetic_moment_tensor(atoms) == SymMat::from_rows({{2, 1}, {1, 1}}));
  atoms[0].density = -1.0;
  CHECK_THROWS_AS(kinetic_moment_tensor(atoms), Error);

  const double vh[] = {0.5};
  const SymMat r = relativistic_tensor(1.0, vh, 2.0, 1.0);
  CHECK(r(0, 0) == doctest::Approx(2.0));
  CHECK(r(0, 1) == doctest::Approx(2.0));
  CHECK(r(1, 1) == doctest::Approx(3.0));
  const double vfast[] = {1.0};
  CHECK_THROWS_AS(relativistic_tensor(1.0, vfast, 1.0, 1.0), Error);

  const double v10[] = {1.0, 0.0};
  const SymMat s = selfsimilar_tensor(1.0, v10, 2.0);
  CHECK(s == SymMat::from_rows({{3, 0}, {0, 2}}));
  CHECK(s.det() == doctest::Approx(6.0));
}

TEST_CASE("determinant closed forms hold on random states") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 2.0), s(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 3;
    const double rho = u(rng), p = u(rng);
    std::vector<double> v(n);
    double v2 = 0.0;
    for (auto& x : v) {
      x = s(rng);
      v2 += x * x;
    }
    CHECK(euler_tensor(rho, v, p).det() == doctest::Approx(rho * std::pow(p, n)).epsilon(1e-11));
    CHECK(selfsimilar_tensor(rho, v, p).det() ==
          doctest::Approx(std::pow(p, n - 1) * (p + rho * v2)).epsilon(1e-11));
  }
}

TEST_CASE("Hessian cofactor of a periodic potential is divergence free") {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{64, 64}});
  const TensorField a = hessian_cofactor({SymMat::identity(2), product_wave(0.01), {}, {}}, mesh);
  CHECK(divergence_mass(a) <= 1e-8);
  const SymMat mean = field_average(a);
  CHECK((mean - SymMat::identity(2)).frobenius() <= 1e-12);

  auto mesh3 = make_mesh(Torus::unit(3), GridSpec{{16, 16, 16}});
  TrigPolynomial psi{0.0, {{vec({1, 1, 0}), 0.003, 0.0}, {vec({0, 1, -1}), 0.0, 0.004}, {vec({1, 0, 1}), 0.002, 0.002}}};
  const TensorField a3 = hessian_cofactor({SymMat::identity(3), psi, {}, {}}, mesh3);
  CHECK(divergence_mass(a3) <= 1e-8);
}

TEST_CASE("Hessian cofactor rejects non-convex and non-periodic potentials") {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{16, 16}});
  CHECK_THROWS_AS(hessian_cofactor({SymMat::identity(2), product_wave(0.2), {}, {}}, mesh), Error);
  TrigPolynomial bad{0.0, {{vec({0.5, 0}), 0.01, 0.0}}};
  CHECK_THROWS_AS(hessian_cofactor({SymMat::identity(2), bad, {}, {}}, mesh), Error);
}

TEST_CASE("quadratic potential on the unit ball gives the identity") {
  auto mesh = make_mesh(Ball{vec({0, 0}), 1.0}, GridSpec{{8, 16}});
  const TensorField a = hessian_cofactor({SymMat::identity(2), {}, {}, {}}, mesh);
  for (std::size_t c = 0; c < a.size(); ++c) CHECK(a[c] == SymMat::identity(2));
}

TEST_CASE("compactly supported bump leaves the mean unchanged") {
  for (int d : {2, 3}) {
    const int n = d == 2 ? 64 : 24;
    auto mesh = make_mesh(Torus::unit(d), GridSpec{std::vector<int>(d, n)});
    SmallVector c = SmallVector::Constant(d, 0.5);
    const TensorField a = hessian_cofactor({SymMat::identity(d), {}, {}, {{c, 0.3, 0.002}}}, mesh);
    CHECK((field_average(a) - SymMat::identity(d)).frobenius() <= 1e-8);
    // far from the bump only spectral truncation error remains
    CHECK((a[0] - SymMat::identity(d)).frobenius() <= 1e-4);
  }
}

TEST_CASE("laminate compatibility and averages") {
  auto mesh = make_mesh(Torus::unit(3), GridSpec{{4, 4, 8}});
  const SymMat b = SymMat::identity(3);
  const SymMat c = SymMat::from_rows({{2, 0, 0}, {0, 5, 0}, {0, 0, 1}});
  const TensorField f = laminate(LaminateSpec::with_fraction(b, c, vec({0, 0, 1}), 0.5), mesh);
  CHECK(field_average(f) == SymMat::from_rows({{1.5, 0, 0}, {0, 3, 0}, {0, 0, 1}}));
  CHECK(divergence_mass(f) <= 1e-12);
  CHECK_THROWS_AS(laminate(LaminateSpec::with_fraction(b, c, vec({1, 0, 0}), 0.5), mesh), Error);
}

TEST_CASE("diagonal tensors") {
  auto mesh = make_mesh(Torus::unit(2), GridSpec{{16, 16}});
  DiagonalSpec spec{{TrigPolynomial{1.0, {{vec({0, 1}), 0.0, 0.5}}}, TrigPolynomial{2.0, {{vec({1, 0}), 0.3, 0.0}}}}};
  const TensorField f = diagonal_dpt(spec, mesh);
  CHECK(divergence_mass(f) <= 1e-12);
  spec.entries[0].constant = 0.1;
  CHECK_THROWS_AS(diagonal_dpt(spec, mesh), Error);
  DiagonalSpec self{{TrigPolynomial{1.0, {{vec({1, 0}), 0.0, 0.5}}}, TrigPolynomial{1.0, {}}}};
  CHECK_THROWS_AS(diagonal_dpt(self, mesh), Error);
}

TEST_CASE("self-similar rest state is an exact solution") {
  // rho = 1, u = 0, p = 1: v = -x and Div A = -(n+1) rho v
  auto mesh = make_mesh(Ball{vec({0, 0}), 1.0}, GridSpec{{16, 32}});
  ScalarField rho(mesh, 1.0), p(mesh, 1.0);
  VectorField v(mesh, 2);
  for (std::size_t c = 0; c < mesh->size(); ++c)
    for (int i = 0; i < 2; ++i) v.at(c)[i] = -mesh->center(c)[i];
  const auto [a, source] = selfsimilar_tensor(rho, v, p);
  const VectorField div = discrete_divergence(a);
  double err = 0.0;
  for (std::size_t c = 0; c < mesh->size(); ++c)
    for (int i = 0; i < 2; ++i) err = std::max(err, std::abs(div.at(c)[i] - source.at(c)[i]));
  CHECK(err <= 1e-10);
  // divergence mass is (n+1) times the integral of rho |v|, i.e. 3 * 2 pi / 3
  CHECK(divergence_mass(a) == doctest::Approx(2 * pi).epsilon(1e-3));
}

TEST_CASE("field files round trip bit exactly") {
  const nlohmann::json spec = {
      {"tag", "hessian_cofactor"},
      {"domain", {{"kind", "torus"}, {"dim", 2}}},
      {"grid", {8, 8}},
      {"s", {{1, 0}, {0, 1}}},
      {"psi", {{"terms", {{{"k", {1, 1}}, {"cos", 0.005}}, {{"k", {1, -1}}, {"cos", 0.005}}}}}}};
  const TensorField f = build_field(spec);
  const TensorField g = tensor_field_from_json(nlohmann::json::parse(to_json(f).dump()));
  CHECK(g.raw() == f.raw());
  CHECK(g.tag() == "hessian_cofactor");
  CHECK(g.mesh().same_grid(f.mesh()));

  const std::string path = "roundtrip_field.json";
  save_field(f, path);
  CHECK(load_field(path).raw() == f.raw());
  std::remove(path.c_str());

  nlohmann::json bad = spec;
  bad["colour"] = 1;
  CHECK_THROWS_AS(build_field(bad), Error);
}

TEST_CASE("relativistic determinant equals rho p^n") {
  std::mt19937_64 rng(34);
  // unit-scale states; the rounding error grows like eps (rho + p)^2 / (1 - |v|^2)^2
  std::uniform_real_distribution<double> u(0.0, 1.0), s(-1.0, 1.0), speed(0.0, 0.99);
  double worst = 0.0;
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 1 + trial % 3;
    const double c = 1.0, rho = u(rng), p = u(rng);
    std::vector<double> dir(n);
    double norm = 0.0;
    for (auto& x : dir) {
      x = s(rng);
      norm += x * x;
    }
    const double scale = speed(rng) * c / std::sqrt(norm);
    for (auto& x : dir) x *= scale;
    const double target = rho * std::pow(p, n);
    worst = std::max(worst, std::abs(relativistic_tensor(rho, dir, p, c).det() - target) / (1.0 + target));
  }
  CHECK(worst <= 1e-12);
}
