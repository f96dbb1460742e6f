#pragma once

#include <cstdint>
#include <vector>

#include "dpt/field.hpp"
#include "dpt/report.hpp"

namespace dpt {

struct CellCorrector {
  SmallVector xi;
  ScalarField u;  // periodic, mean zero
  double residual = 0.0;  // relative residual of -div(A(xi + grad u)) = 0
  int iterations = 0;
  double max_gradient = 0.0;
};

struct Homogenized {
  SymMat a_eff;
  std::vector<CellCorrector> correctors;  // e_1, ..., e_d
  double asymmetry = 0.0;  // |B - B^T| of the energy matrix before symmetrization
  double alpha = 0.0;      // ellipticity bounds on the grid
  double beta = 0.0;
};

struct HomogOptions {
  double tolerance = 1e-12;
  int max_iterations = 1000;
};

// Cell problems by preconditioned conjugate gradients; A_eff from the energy formula.
Homogenized homogenize(const TensorField& field, HomogOptions opts = {});
SymMat effective_tensor(const TensorField& field, HomogOptions opts = {});

SymMat harmonic_mean(const TensorField& field);

// Two-state layered material with unit normal xi and volume fraction theta of b.
SymMat laminate_effective(const SymMat& b, const SymMat& c, const SmallVector& xi, double theta);

enum class HomogMode { Bounds, DPTEquivalence, TemptFalsifier };

struct HomogCheckOptions {
  std::size_t budget = 10000;
  std::uint64_t seed = 0;
  double gap_small = 1e-8;   // relative to |A+|
  double mass_small = 1e-4;  // relative to |A+|
  HomogOptions solver;
};

CheckReport homog_checks(const TensorField& field, HomogMode mode, HomogCheckOptions opts = {});

}  // namespace dpt
