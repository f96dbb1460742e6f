#pragma once

#include <string>
#include <vector>

#include "dpt/field.hpp"
#include "dpt/inequalities.hpp"
#include "dpt/report.hpp"

namespace dpt {

struct MAOptions {
  double tolerance = 1e-10;  // on the band-limited residual
  int max_iterations = 30;
  double min_step = 1e-6;
  int max_linear_iterations = 400;
};

struct MAIteration {
  int iteration = 0;
  double residual = 0.0;  // sup norm after the step
  double damping = 1.0;
  int linear_iterations = 0;
};

struct MASolution {
  SymMat s;
  ScalarField phi;        // mean zero, no Nyquist content
  double residual = 0.0;  // sup |det(S + Hess phi) - f|
  double projected_residual = 0.0;  // same, after removing the Nyquist modes
  int newton_iterations = 0;
  std::vector<MAIteration> history;
};

// det(S + Hess phi) = f on a two-dimensional torus by damped Newton with a spectral
// preconditioner. Requires f > 0 and det S equal to the mean of f.
MASolution solve_periodic_ma(const ScalarField& f, const SymMat& s, MAOptions opts = {});
std::string ma_diagnostics_csv(const MASolution& sol);

// S = lambda cofactor(A+) with lambda^d det(A+)^{d-1} = fbar.
SymMat optimal_shape_matrix(const SymMat& a_plus, double fbar);

// max over sign vectors s of |M^{-1} s|, M the matrix with rows gamma_j.
double lattice_inverse_norm(const SmallMatrix& basis);
// Bound on sup |grad phi| for periodic phi with S + Hess phi >= 0.
double lattice_gradient_constant(const SmallMatrix& basis, const SymMat& s);
// |M^{-1}|_{inf->2} max_j |gamma_j|^2 / 2
double lattice_trace_constant(const SmallMatrix& basis);

struct ProofTrace {
  MASolution solution;
  ScalarField slack;       // (1/d) Tr(A (S + Hess phi)) - f
  double mean_slack = 0.0;
  double min_slack = 0.0;
  double shape_gap = 0.0;        // (1/d) Tr(A+ S) - mean f
  double divergence_term = 0.0;  // (1/d) mean of Div A . grad phi
  double periodic_gap = 0.0;     // det(A+)^{1/(d-1)} - mean f
  CheckReport report;
};

ProofTrace proof_trace_periodic(const TensorField& field, MAOptions opts = {}, double slack_tol = 1e-10);

// Mean of (det A)^{1/(d-1)} against det(A+ + c |Div A| I)^{1/(d-1)} with the cell-averaged mass.
CheckReport nondiv_bound(const TensorField& field, Tolerance tol = {});

}  // namespace dpt
