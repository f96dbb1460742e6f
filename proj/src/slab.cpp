#include "dpt/slab.hpp"

#include <cmath>
#include <numbers>

#include "dpt/errors.hpp"
#include "dpt/numerics.hpp"

namespace dpt {

void Slab::append(double t_next, const std::vector<SymMat>& row) {
  require(row.size() == cells, ErrorKind::DomainMismatch, "slab row has the wrong length");
  require(!times.empty() && t_next > times.back(), ErrorKind::InvalidArgument, "slab times must increase");
  times.push_back(t_next);
  values.insert(values.end(), row.begin(), row.end());
}

double slab_det_integral(const Slab& slab) {
  std::vector<double> terms;
  terms.reserve(slab.values.size());
  for (std::size_t k = 0; k < slab.steps(); ++k)
    for (std::size_t j = 0; j < slab.cells; ++j)
      terms.push_back(slab.dt(k) * slab.dy() * std::max(slab.at(k, j).det(), 0.0));
  return pairwise_sum(terms);
}

SlabFluxes slab_fluxes(const Slab& slab, double lambda) {
  SlabFluxes out;
  const std::size_t last = slab.steps() - 1;
  std::vector<double> faces, lateral, jumps;
  for (std::size_t j = 0; j < slab.cells; ++j) {
    for (std::size_t k : {std::size_t{0}, last}) {
      const SymMat& a = slab.at(k, j);
      faces.push_back(slab.dy() * std::hypot(lambda * a(0, 0), a(0, 1)));
    }
    for (std::size_t k = 1; k <= last; ++k) {
      const SymMat& a = slab.at(k, j);
      const SymMat& b = slab.at(k - 1, j);
      jumps.push_back(slab.dy() * std::hypot(lambda * (a(0, 0) - b(0, 0)), a(0, 1) - b(0, 1)));
    }
  }
  for (std::size_t k = 0; k <= last; ++k) {
    for (std::size_t j : {std::size_t{0}, slab.cells - 1}) {
      const SymMat& a = slab.at(k, j);
      lateral.push_back(slab.dt(k) * std::hypot(lambda * a(0, 1), a(1, 1)));
    }
    for (std::size_t j = 1; j < slab.cells; ++j) {
      const SymMat& a = slab.at(k, j);
      const SymMat& b = slab.at(k, j - 1);
      jumps.push_back(slab.dt(k) * std::hypot(lambda * (a(0, 1) - b(0, 1)), a(1, 1) - b(1, 1)));
    }
  }
  out.time_faces = pairwise_sum(faces);
  out.lateral = pairwise_sum(lateral);
  out.jumps = pairwise_sum(jumps);
  return out;
}

SlabBound slab_bound(const Slab& slab) {
  require(slab.steps() > 0 && slab.cells > 1, ErrorKind::InvalidArgument, "empty slab");
  // convex-domain bound in the plane: 1 / (2 |S^1|) X^2, after the stretch lambda^{-1} X(lambda)^2
  const double k = 1.0 / (4.0 * std::numbers::pi);
  auto bound = [&](double lambda, bool with_jumps) {
    const SlabFluxes f = slab_fluxes(slab, lambda);
    const double x = f.time_faces + f.lateral + (with_jumps ? f.jumps : 0.0);
    return k * x * x / lambda;
  };
  SlabBound b;
  const double l0 = minimize_log_scale([&](double l) { return bound(l, false); }, 1e-8, 1e8);
  b.without_jumps = bound(l0, false);
  b.lambda = minimize_log_scale([&](double l) { return bound(l, true); }, 1e-8, 1e8);
  b.with_jumps = bound(b.lambda, true);
  b.divergence_mass = slab_fluxes(slab, 1.0).jumps;
  return b;
}

double corrected_rhs(double ideal, const SlabBound& b) {
  return std::max(ideal, b.without_jumps) + (b.with_jumps - b.without_jumps);
}

}  // namespace dpt
