#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dpt/field.hpp"

namespace dpt {

enum class DerivativeMethod { Spectral, FiniteDifference };

// d/dx_j of cell samples via the chain rule in computational coordinates. Spectral
// differentiates periodic axes in Fourier space; open axes always use fourth-order
// differences with one-sided stencils near their ends.
std::vector<double> physical_derivative(const Mesh& mesh, std::span<const double> f, int j,
                                        DerivativeMethod method = DerivativeMethod::Spectral);

// Spectral Hessian on a torus, packed upper triangle per cell.
std::vector<std::vector<double>> physical_hessian(const Mesh& mesh, std::span<const double> f);

// Row-wise divergence, (Div A)_i = sum_j d_j A_ij.
VectorField discrete_divergence(const TensorField& field, DerivativeMethod method = DerivativeMethod::Spectral);
// Sum over cells of |v| times cell volume.
double total_variation_mass(const VectorField& v);
double divergence_mass(const TensorField& field, DerivativeMethod method = DerivativeMethod::Spectral);

struct BoundaryNode {
  SmallVector x;
  SmallVector normal;  // outward unit normal
  double weight = 0.0;  // surface measure
  std::vector<std::pair<std::size_t, double>> stencil;  // second-order extrapolation from cells
};

// Composite Gauss-Legendre nodes on every boundary face, with cell stencils.
std::vector<BoundaryNode> boundary_nodes(const Mesh& mesh, int order = 8);

double boundary_trace_norm(const TensorField& field);
double boundary_integral(const ScalarField& f);
double boundary_measure(const Mesh& mesh);
SymMat trace_at(const TensorField& field, const BoundaryNode& node);
double trace_at(const ScalarField& field, const BoundaryNode& node);

// y = P x applied to a periodic field: B(y) = P A(P^{-1} y) P^T on the image torus.
TensorField congruence(const TensorField& field, const SmallMatrix& p);

}  // namespace dpt
