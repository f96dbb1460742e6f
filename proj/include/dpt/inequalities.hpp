#pragma once

#include <array>
#include <optional>
#include <random>

#include "dpt/constructors.hpp"
#include "dpt/report.hpp"

namespace dpt {

// Pass tolerance: a fixed floor plus a measured discretization estimate.
struct Tolerance {
  double base = 1e-7;
  double discretization = 0.0;
  double total() const { return base + discretization; }
};

// Average of (det A)^{1/(d-1)} against (det of the average)^{1/(d-1)} on a torus.
CheckReport verify_periodic(const TensorField& field, Tolerance tol = {});
// Exact two-state arithmetic for laminates.
CheckReport verify_periodic(const LaminateSpec& spec, Tolerance tol = {});

// Integral of (det A)^{1/(d-1)} against the boundary-trace bound on a convex domain.
CheckReport verify_convex(const TensorField& field, bool include_measure, Tolerance tol = {});

// (1/(d |S^{d-1}|^{1/(d-1)})) t^{d/(d-1)}, evaluated in log space.
double convex_bound(int d, double total_trace);

CheckReport gagliardo_check(const DiagonalSpec& spec, MeshPtr mesh, Tolerance tol = {});

struct ConcavityProbe {
  bool concave = true;
  double worst_violation = 0.0;  // max of (f(t0) + f(t2))/2 - f(t1)
  std::optional<std::array<double, 3>> witness;  // t0 < t1 < t2 with t1 the midpoint
};

// Midpoint concavity of t -> det(a + t b)^alpha on [0,1] for singular b.
ConcavityProbe lambda_concavity_probe(const SymMat& a, const SymMat& b, double alpha, int samples = 65);

struct SingularSegment {
  SymMat a;
  SymMat b;
};
// a SPD with eigenvalues >= 1, b = Q diag(beta) Q^T with one zero eigenvalue and
// eigenvalues in [-0.5, 2].
SingularSegment random_singular_segment(std::mt19937_64& rng, int d);

// Aggregate probe over `count` random singular segments.
CheckReport concavity_sweep(int d, double alpha, int count, std::uint64_t seed, int samples = 65);

// Field minus `abar` must vanish on the outer `margin` cells of the periodic cell, up to
// `support_tol` times its largest deviation anywhere.
CheckReport compact_support_mean(const TensorField& field, const SymMat& abar, int margin = 2,
                                 double support_tol = 1e-2, Tolerance tol = {});

struct VanishingTraceOptions {
  double trace_eps = 1e-3;      // applicability: max n.A n on the boundary
  double div_constant = 1.0;    // applicability: divergence mass <= div_constant h^2
};

// Integral of Tr A against R (|A n| boundary L1 norm + divergence mass), R the
// largest distance from the centroid.
CheckReport vanishing_trace_check(const TensorField& field, VanishingTraceOptions opts = {});

// A = 1_E I with E compactly inside a convex domain: |E| against the perimeter bound.
CheckReport isoperimetric_check(const DomainSpec& set, const GridSpec& grid, Tolerance tol = {});

}  // namespace dpt
