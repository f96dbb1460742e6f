#include <cmath>
#include <random>

#include "doctest.h"
#include "dpt/errors.hpp"
#include "dpt/numerics.hpp"
#include "dpt/sym_mat.hpp"

using namespace dpt;

namespace {

SymMat random_sym(std::mt19937_64& rng, int d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  SymMat a(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) a(i, j) = n(rng);
  return a;
}

SymMat random_psd(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  SmallMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = n(rng);
  return SymMat::from_matrix(g * g.transpose());
}

}  // namespace

TEST_CASE("cofactor of worked examples") {
  CHECK(cofactor(SymMat::from_rows({{2, 1}, {1, 3}})) == SymMat::from_rows({{3, -1}, {-1, 2}}));
  CHECK(cofactor(SymMat::from_rows({{2, 0}, {0, 3}})) == SymMat::from_rows({{3, 0}, {0, 2}}));
  // rank-one 3x3 has vanishing adjugate
  const double v[] = {1.0, 2.0, 3.0};
  const SymMat c = cofactor(SymMat::outer(v));
  CHECK(c.frobenius() < 1e-14);
}

TEST_CASE("cofactor identity on random matrices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + trial % 4;
    const SymMat a = random_sym(rng, d, 2.0);
    const SmallMatrix prod = cofactor(a).matrix() * a.matrix();
    const SmallMatrix expect = SmallMatrix::Identity(d, d) * a.det();
    const double scale = 1.0 + std::pow(a.norm2(), d);
    CHECK((prod - expect).cwiseAbs().maxCoeff() <= 1e-10 * scale);
  }
}

TEST_CASE("det_power values and homogeneity") {
  CHECK(det_power(SymMat::from_rows({{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}), 0.5) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
  CHECK(det_power(SymMat::from_rows({{1, 0}, {0, 0}}), 1.0) == 0.0);
  CHECK_THROWS_AS(det_power(SymMat::from_rows({{1, 0}, {0, -1}}), 1.0), Error);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 3;
    const SymMat a = random_psd(rng, d) + SymMat::identity(d, 0.1);
    const double t = ut(rng);
    const double alpha = 1.0 / (d - 1);
    const double lhs = det_power(t * a, alpha);
    const double rhs = std::pow(t, d * alpha) * det_power(a, alpha);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
  }
}

TEST_CASE("psd_check tolerance is relative") {
  CHECK(psd_check(SymMat::from_rows({{1e6, 0}, {0, -1e-6}})));
  CHECK_FALSE(psd_check(SymMat::from_rows({{1, 0}, {0, -1e-6}})));
}

TEST_CASE("extended precision determinant matches Eigen on well conditioned input") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const SymMat a = random_sym(rng, 4);
    CHECK(a.det() == doctest::Approx(a.matrix().determinant()).epsilon(1e-10));
  }
}

TEST_CASE("hexfloat round trip is bit exact") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = n(rng);
    CHECK(parse_hexfloat(to_hexfloat(v)) == v);
  }
  CHECK(parse_hexfloat(to_hexfloat(-0.0)) == 0.0);
  CHECK_THROWS_AS(parse_hexfloat("1.5"), Error);
}

TEST_CASE("pairwise sum is order deterministic and accurate") {
  std::vector<double> v(100001, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(10000.1).epsilon(1e-14));
}
