#pragma once

#include <cstddef>
#include <vector>

#include "dpt/sym_mat.hpp"

namespace dpt {

// Piecewise-constant 2x2 space-time tensor on [times.front(), times.back()] x [lo, hi].
// Index 0 is time, index 1 is space.
struct Slab {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t cells = 0;
  std::vector<double> times;
  std::vector<SymMat> values;  // step-major

  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
  double dy() const { return (hi - lo) / static_cast<double>(cells); }
  double dt(std::size_t step) const { return times[step + 1] - times[step]; }
  const SymMat& at(std::size_t step, std::size_t cell) const { return values[step * cells + cell]; }
  void append(double t_next, const std::vector<SymMat>& row);
};

// sum dt dy det(A)
double slab_det_integral(const Slab& slab);

// Pieces of the boundary and jump terms after the time stretch t -> lambda t.
struct SlabFluxes {
  double time_faces = 0.0;
  double lateral = 0.0;
  double jumps = 0.0;
};
SlabFluxes slab_fluxes(const Slab& slab, double lambda);

struct SlabBound {
  double without_jumps = 0.0;  // optimized bound ignoring the divergence measure
  double with_jumps = 0.0;     // optimized bound including it; rigorous for the slab field
  double lambda = 1.0;
  double divergence_mass = 0.0;  // at lambda = 1
};
SlabBound slab_bound(const Slab& slab);

// max(ideal, bound without jumps) plus the increment the jumps cause.
double corrected_rhs(double ideal, const SlabBound& b);

}  // namespace dpt
