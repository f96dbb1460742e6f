#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dpt/field.hpp"

namespace dpt {

struct TrigTerm {
  SmallVector wavevector;
  double cos_coef = 0.0;
  double sin_coef = 0.0;
};

// c + sum a cos(2 pi k.x) + b sin(2 pi k.x)
struct TrigPolynomial {
  double constant = 0.0;
  std::vector<TrigTerm> terms;

  double operator()(std::span<const double> x) const;
  SymMat hessian(std::span<const double> x) const;
};

// eps * exp(-1 / (1 - |x - c|^2 / r^2)) inside the ball, zero outside.
struct Bump {
  SmallVector center;
  double radius = 1.0;
  double amplitude = 0.0;

  double operator()(std::span<const double> x) const;
  SymMat hessian(std::span<const double> x) const;
};

// theta(x) = x^T S x / 2 + psi(x) + sum_k radial[k] |x|^(2k+4) / (2k+4) + bumps.
struct PotentialSpec {
  SymMat s;
  TrigPolynomial psi;
  std::vector<double> radial;
  std::vector<Bump> bumps;
};

struct DiagonalSpec {
  std::vector<TrigPolynomial> entries;  // entry j must not depend on x_j
};

struct LaminateSpec {
  SymMat b;  // state where the profile equals one
  SymMat c;
  SmallVector xi;
  std::vector<std::pair<double, double>> intervals;  // subsets of [0,1) where the profile is one
  double smoothing = 0.0;  // Gaussian mollifier width in the laminate coordinate

  static LaminateSpec with_fraction(SymMat b, SymMat c, SmallVector xi, double theta);
  double fraction() const;
  double profile(double t) const;
  // States PSD with (c - b) xi = 0.
  void validate() const;
};

TensorField constant_field(MeshPtr mesh, const SymMat& a);
TensorField diagonal_dpt(const DiagonalSpec& spec, MeshPtr mesh);
TensorField hessian_cofactor(const PotentialSpec& spec, MeshPtr mesh);
TensorField laminate(const LaminateSpec& spec, MeshPtr mesh);

SymMat euler_tensor(double rho, std::span<const double> u, double p);
TensorField euler_tensor(const ScalarField& rho, const VectorField& u, const ScalarField& p);

struct VelocityAtom {
  SmallVector velocity;
  double weight = 1.0;  // quadrature weight
  double density = 0.0;  // distribution value
};
SymMat kinetic_moment_tensor(std::span<const VelocityAtom> atoms);

SymMat relativistic_tensor(double rho, std::span<const double> v, double p, double c);
TensorField relativistic_tensor(const ScalarField& rho, const VectorField& v, const ScalarField& p, double c);

SymMat selfsimilar_tensor(double rho, std::span<const double> v, double p);
// Tensor rho v(x)v + p I and the source -(n+1) rho v matching Div A for exact solutions.
std::pair<TensorField, VectorField> selfsimilar_tensor(const ScalarField& rho, const VectorField& v,
                                                       const ScalarField& p);

// Field from a JSON constructor spec: {"tag": ..., "domain": ..., "grid": [...], ...}.
TensorField build_field(const nlohmann::json& spec);
TrigPolynomial trig_from_json(const nlohmann::json& j);
SymMat sym_from_json(const nlohmann::json& j);
SmallVector vector_from_json(const nlohmann::json& j);
// Throws UnknownKey when `j` has a key outside `allowed`.
void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace dpt
