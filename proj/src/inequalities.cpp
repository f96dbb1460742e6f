#include "dpt/inequalities.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dpt/calculus.hpp"
#include "dpt/errors.hpp"
#include "dpt/numerics.hpp"

namespace dpt {

namespace {

double det_root(const SymMat& a) { return det_power(a, 1.0 / (a.dim() - 1)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require_torus(const Mesh& mesh, const char* what) {
  require(mesh.periodic(), ErrorKind::UnsupportedDomain, std::string(what) + " needs a periodic field");
}

}  // namespace

CheckReport verify_periodic(const TensorField& field, Tolerance tol) {
  require_torus(field.mesh(), "verify_periodic");
  require(field.dim() >= 2, ErrorKind::InvalidArgument, "dimension must be at least 2");
  const double lhs = average(map_cells(field, det_root));
  const SymMat mean = field_average(field);
  const double rhs = det_root(mean);
  auto r = make_report("verify_periodic", lhs, rhs, field.mesh().spacing(), tol.total());
  r.extras = {{"discretization", tol.discretization}};
  return r;
}

CheckReport verify_periodic(const LaminateSpec& spec, Tolerance tol) {
  spec.validate();
  const double theta = spec.fraction();
  require(theta >= 0.0 && theta <= 1.0, ErrorKind::InvalidArgument, "volume fraction outside [0,1]");
  const double lhs = theta * det_root(spec.b) + (1.0 - theta) * det_root(spec.c);
  const double rhs = det_root(theta * spec.b + (1.0 - theta) * spec.c);
  auto r = make_report("verify_periodic_laminate", lhs, rhs, 0.0, tol.total(), "exact two-state arithmetic");
  r.extras = {{"theta", theta}};
  return r;
}

double convex_bound(int d, double total_trace) {
  if (total_trace <= 0.0) return 0.0;
  const double e = static_cast<double>(d) / (d - 1);
  return std::exp(e * std::log(total_trace) - std::log(static_cast<double>(d)) -
                  std::log(unit_sphere_area(d)) / (d - 1));
}

CheckReport verify_convex(const TensorField& field, bool include_measure, Tolerance tol) {
  const Mesh& mesh = field.mesh();
  require(!mesh.periodic(), ErrorKind::UnsupportedDomain, "verify_convex needs a bounded convex domain");
  const int d = field.dim();
  require(d >= 2, ErrorKind::InvalidArgument, "dimension must be at least 2");
  const double lhs = integrate(map_cells(field, det_root));
  const double trace = boundary_trace_norm(field);
  const double measure = include_measure ? divergence_mass(field) : 0.0;
  const double rhs = convex_bound(d, trace + measure);
  auto r = make_report(include_measure ? "verify_convex_measure" : "verify_convex", lhs, rhs, mesh.spacing(),
                       tol.total(), "trace=" + fmt(trace) + " measure=" + fmt(measure));
  r.extras = {{"trace", trace}, {"measure", measure}, {"discretization", tol.discretization}};
  return r;
}

CheckReport gagliardo_check(const DiagonalSpec& spec, MeshPtr mesh, Tolerance tol) {
  const TensorField field = diagonal_dpt(spec, mesh);
  const int d = field.dim();
  const double e = 1.0 / (d - 1);
  ScalarField prod(mesh);
  for (std::size_t c = 0; c < field.size(); ++c) {
    double p = 1.0;
    for (int j = 0; j < d; ++j) p *= std::pow(field[c](j, j), e);
    prod[c] = p;
  }
  const double lhs = average(prod);
  double rhs = 1.0;
  for (int j = 0; j < d; ++j) {
    ScalarField g(mesh);
    for (std::size_t c = 0; c < field.size(); ++c) g[c] = field[c](j, j);
    rhs *= std::pow(average(g), e);
  }
  return make_report("gagliardo", lhs, rhs, mesh->spacing(), tol.total());
}

ConcavityProbe lambda_concavity_probe(const SymMat& a, const SymMat& b, double alpha, int samples) {
  require(a.dim() == b.dim(), ErrorKind::InvalidArgument, "segment endpoints differ in dimension");
  require(samples >= 3, ErrorKind::InvalidArgument, "need at least three samples");
  const int d = a.dim();
  require(psd_check(a) && psd_check(a + b), ErrorKind::NotPSD, "segment endpoints must be PSD");
  if (std::abs(b.det()) > 1e-10 * (1.0 + std::pow(b.norm2(), d)))
    fail(ErrorKind::NotSingularDirection, "det b = " + fmt(b.det()));
  std::vector<double> t(samples), f(samples);
  double scale = 0.0;
  for (int i = 0; i < samples; ++i) {
    t[i] = static_cast<double>(i) / (samples - 1);
    f[i] = det_power(a + t[i] * b, alpha);
    scale = std::max(scale, std::abs(f[i]));
  }
  ConcavityProbe probe;
  probe.worst_violation = -std::numeric_limits<double>::infinity();
  const double tol = 1e-12 * (1.0 + scale);
  for (int i = 0; i < samples; ++i)
    for (int k = i + 2; k < samples; k += 2) {
      const int j = (i + k) / 2;
      const double v = 0.5 * (f[i] + f[k]) - f[j];
      if (v > probe.worst_violation) {
        probe.worst_violation = v;
        if (v > tol) probe.witness = std::array<double, 3>{t[i], t[j], t[k]};
      }
    }
  probe.concave = probe.worst_violation <= tol;
  if (probe.concave) probe.witness.reset();
  return probe;
}

SingularSegment random_singular_segment(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SmallMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = n(rng);
  const SymMat a = SymMat::from_matrix(g * g.transpose() / d) + SymMat::identity(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = n(rng);
  const SmallMatrix q = Eigen::HouseholderQR<SmallMatrix>(g).householderQ();
  SmallVector beta(d);
  for (int i = 0; i < d; ++i) beta(i) = -0.5 + 2.5 * u(rng);
  beta(static_cast<int>(u(rng) * d) % d) = 0.0;
  const SymMat b = SymMat::from_matrix(q * beta.asDiagonal() * q.transpose());
  return {a, b};
}

CheckReport concavity_sweep(int d, double alpha, int count, std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  int concave = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < count; ++k) {
    const auto seg = random_singular_segment(rng, d);
    const auto probe = lambda_concavity_probe(seg.a, seg.b, alpha, samples);
    concave += probe.concave ? 1 : 0;
    worst = std::max(worst, probe.worst_violation);
  }
  auto r = make_report("lambda_concavity", worst, 0.0, 1.0 / (samples - 1), 1e-12,
                       std::to_string(concave) + "/" + std::to_string(count) + " segments concave");
  r.pass = concave == count;
  r.extras = {{"alpha", alpha}, {"concave_segments", concave}, {"segments", count}};
  return r;
}

CheckReport compact_support_mean(const TensorField& field, const SymMat& abar, int margin, double support_tol,
                                 Tolerance tol) {
  const Mesh& mesh = field.mesh();
  require(mesh.periodic() || std::holds_alternative<Box>(mesh.domain()), ErrorKind::UnsupportedDomain,
          "compact support check runs on a periodic cell or a box");
  require(abar.dim() == field.dim(), ErrorKind::InvalidArgument, "background dimension");
  const Block& b = mesh.blocks().front();
  std::vector<int> idx(field.dim());
  double spread = 0.0;
  for (std::size_t c = 0; c < field.size(); ++c) spread = std::max(spread, (field[c] - abar).frobenius());
  const double limit = support_tol * spread + 1e-14 * (1.0 + abar.norm2());
  for (std::size_t c = 0; c < field.size(); ++c) {
    b.unravel(c, idx);
    bool near = false;
    for (int a = 0; a < field.dim(); ++a) near = near || idx[a] < margin || idx[a] >= b.shape[a] - margin;
    if (near && (field[c] - abar).frobenius() > limit)
      fail(ErrorKind::SupportTouchesBoundary, "field differs from background at cell " + std::to_string(c));
  }
  const SymMat mean = field_average(field);
  const double err = (mean - abar).frobenius();
  auto r = make_report("compact_support_mean", err, 0.0, mesh.spacing(), tol.total(),
                       "mean deviation from background");
  const double lhs = average(map_cells(field, det_root));
  r.extras = {{"periodic_lhs", lhs}, {"periodic_rhs", det_root(mean)}};
  return r;
}

CheckReport vanishing_trace_check(const TensorField& field, VanishingTraceOptions opts) {
  const Mesh& mesh = field.mesh();
  if (mesh.periodic()) return not_applicable("vanishing_trace", "domain has no boundary");
  const double h = mesh.spacing();
  const double div = divergence_mass(field);
  if (div > opts.div_constant * h * h)
    return not_applicable("vanishing_trace", "divergence mass " + fmt(div) + " exceeds " + fmt(opts.div_constant * h * h));
  const auto nodes = boundary_nodes(mesh);
  double eps = 0.0;
  std::vector<double> an(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const SymMat a = trace_at(field, nodes[k]);
    const SmallVector v = a.matrix() * nodes[k].normal;
    eps = std::max(eps, nodes[k].normal.dot(v));
    an[k] = v.norm() * nodes[k].weight;
  }
  if (eps > opts.trace_eps)
    return not_applicable("vanishing_trace", "boundary normal trace " + fmt(eps) + " exceeds " + fmt(opts.trace_eps));
  const double trace = pairwise_sum(an);

  SmallVector centroid = SmallVector::Zero(field.dim());
  for (std::size_t c = 0; c < field.size(); ++c)
    for (int a = 0; a < field.dim(); ++a) centroid(a) += mesh.center(c)[a] * mesh.volume(c);
  centroid /= mesh.total_volume();
  double radius = 0.0;
  for (const auto& n : nodes) radius = std::max(radius, (n.x - centroid).norm());

  const double lhs = integrate(map_cells(field, [](const SymMat& a) { return a.trace(); }));
  double max_norm = 0.0;
  for (std::size_t c = 0; c < field.size(); ++c) max_norm = std::max(max_norm, field[c].norm2());
  auto r = make_report("vanishing_trace", lhs, radius * (trace + div), h, 1e-12 * (1.0 + lhs),
                       "integral of trace against R(|An| + |Div A|)");
  r.extras = {{"boundary_eps", eps}, {"max_cell_norm", max_norm}, {"trace", trace}, {"measure", div}};
  return r;
}

CheckReport isoperimetric_check(const DomainSpec& set, const GridSpec& grid, Tolerance tol) {
  auto mesh = make_mesh(set, grid);
  require(!mesh->periodic(), ErrorKind::UnsupportedDomain, "the set must be bounded");
  const int d = mesh->dim();
  const TensorField indicator = constant_field(mesh, SymMat::identity(d));
  // The jump of 1_E I across the boundary of E is the identity, so the divergence
  // mass equals the perimeter and the outer trace vanishes.
  const double lhs = mesh->total_volume();
  const double perimeter = boundary_trace_norm(indicator);
  auto r = make_report("isoperimetric", lhs, convex_bound(d, perimeter), mesh->spacing(), tol.total(),
                       "perimeter=" + fmt(perimeter));
  r.extras = {{"perimeter", perimeter}};
  return r;
}

}  // namespace dpt
