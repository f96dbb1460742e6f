#include "dpt/transport.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dpt/calculus.hpp"
#include "dpt/errors.hpp"
#include "dpt/numerics.hpp"
#include "dpt/spectral.hpp"

namespace dpt {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  Vec p(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) p[k] = a[k] * b[k];
  return pairwise_sum(p);
}

double sup(const Vec& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

// Periodic two-dimensional Monge-Ampere operator on band-limited potentials.
class MAProblem {
 public:
  MAProblem(const Mesh& mesh, const SymMat& s, const Vec& f)
      : sp_(mesh.blocks().front().shape), g_(mesh.inverse_jacobian(0)), s_(s), f_(f) {}

  // Physical wavevector of Fourier mode m.
  void wave(std::span<const int> m, double& k0, double& k1) const {
    k0 = g_(0, 0) * m[0] + g_(1, 0) * m[1];
    k1 = g_(0, 1) * m[0] + g_(1, 1) * m[1];
  }

  std::array<Vec, 3> hessian(const Vec& phi) const {
    const auto spec = sp_.forward(phi);
    const double tau2 = 4.0 * std::numbers::pi * std::numbers::pi;
    std::array<Vec, 3> h;
    const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
    for (int p = 0; p < 3; ++p) {
      auto sc = spec;
      sp_.for_each_mode([&](std::size_t k, std::span<const int> m, bool nyq) {
        double k0, k1;
        wave(m, k0, k1);
        const double ka = pairs[p][0] == 0 ? k0 : k1, kb = pairs[p][1] == 0 ? k0 : k1;
        sc[k] = nyq ? 0.0 : sc[k] * (-tau2 * ka * kb);
      });
      h[p] = sp_.backward(std::move(sc));
    }
    return h;
  }

  // det(S + H) - f and the cofactor coefficients of the linearization.
  Vec residual(const Vec& phi, std::array<Vec, 3>* cof, bool* convex) const {
    const auto h = hessian(phi);
    Vec r(phi.size());
    if (cof)
      for (auto& c : *cof) c.assign(phi.size(), 0.0);
    bool ok = true;
    for (std::size_t k = 0; k < phi.size(); ++k) {
      const double m00 = s_(0, 0) + h[0][k], m01 = s_(0, 1) + h[1][k], m11 = s_(1, 1) + h[2][k];
      const double det = m00 * m11 - m01 * m01;
      ok = ok && det > 0.0 && m00 > 0.0;
      r[k] = det - f_[k];
      if (cof) {
        (*cof)[0][k] = m11;
        (*cof)[1][k] = -m01;
        (*cof)[2][k] = m00;
      }
    }
    if (convex) *convex = ok;
    return r;
  }

  Vec band_limit(const Vec& v) const {
    return sp_.apply(v, [](std::span<const int> m) { return (m[0] == 0 && m[1] == 0) ? 0.0 : 1.0; });
  }

  Vec apply_jacobian(const std::array<Vec, 3>& cof, const Vec& dphi) const {
    const auto h = hessian(dphi);
    Vec out(dphi.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = cof[0][k] * h[0][k] + 2.0 * cof[1][k] * h[1][k] + cof[2][k] * h[2][k];
    return band_limit(out);
  }

  Vec precondition(const SymMat& cbar, const Vec& v) const {
    const double tau2 = 4.0 * std::numbers::pi * std::numbers::pi;
    return sp_.apply(v, [&](std::span<const int> m) {
      if (m[0] == 0 && m[1] == 0) return 0.0;
      double k0, k1;
      wave(m, k0, k1);
      return 1.0 / (-tau2 * (cbar(0, 0) * k0 * k0 + 2.0 * cbar(0, 1) * k0 * k1 + cbar(1, 1) * k1 * k1));
    });
  }

 private:
  Spectral sp_;
  SmallMatrix g_;
  SymMat s_;
  Vec f_;
};

// Right-preconditioned BiCGSTAB; x is returned in the original variables.
template <class Op, class Prec>
int bicgstab(const Op& op, const Prec& prec, const Vec& b, Vec& x, double rtol, int max_iter) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  Vec r = b, rhat = b, p(n, 0.0), v(n, 0.0), s(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return 0;
  for (int it = 1; it <= max_iter; ++it) {
    const double rho_new = dot(rhat, r);
    if (rho_new == 0.0) return it;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
    const Vec phat = prec(p);
    v = op(phat);
    alpha = rho / dot(rhat, v);
    for (std::size_t k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];
    if (std::sqrt(dot(s, s)) <= rtol * bnorm) {
      for (std::size_t k = 0; k < n; ++k) x[k] += alpha * phat[k];
      return it;
    }
    const Vec shat = prec(s);
    t = op(shat);
    omega = dot(t, s) / dot(t, t);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * phat[k] + omega * shat[k];
      r[k] = s[k] - omega * t[k];
    }
    if (std::sqrt(dot(r, r)) <= rtol * bnorm) return it;
  }
  return max_iter;
}

double det_root(const SymMat& a) { return det_power(a, 1.0 / (a.dim() - 1)); }

}  // namespace

MASolution solve_periodic_ma(const ScalarField& f, const SymMat& s, MAOptions opts) {
  const Mesh& mesh = f.mesh();
  require(mesh.periodic() && mesh.dim() == 2, ErrorKind::UnsupportedDomain, "Monge-Ampere solver runs on a 2-D torus");
  require(s.dim() == 2 && s.min_eigenvalue() > 0.0, ErrorKind::InvalidArgument, "shape matrix must be positive definite");
  const Vec& fv = f.raw();
  for (double x : fv) require(x > 0.0 && std::isfinite(x), ErrorKind::InvalidArgument, "right-hand side must be positive");
  const double fbar = average(f);
  if (std::abs(s.det() - fbar) > 1e-10 * (1.0 + fbar))
    fail(ErrorKind::CompatibilityViolated, "det S differs from the mean of f by " + std::to_string(s.det() - fbar));

  const MAProblem prob(mesh, s, fv);
  MASolution sol;
  sol.s = s;
  Vec phi(fv.size(), 0.0);
  std::array<Vec, 3> cof;
  bool convex = true;
  Vec r = prob.residual(phi, &cof, &convex);
  Vec pr = prob.band_limit(r);
  double pres = sup(pr);

  int it = 0;
  while (pres > opts.tolerance) {
    if (it >= opts.max_iterations)
      fail(ErrorKind::MaxIterations, "Newton stalled at residual " + std::to_string(pres));
    ++it;
    SymMat cbar(2);
    for (int k = 0; k < 3; ++k) {
      Vec c = cof[k];
      cbar.packed()[k] = pairwise_sum(c) / static_cast<double>(c.size());
    }
    Vec rhs(pr.size());
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = -pr[k];
    Vec dphi;
    const int lin = bicgstab([&](const Vec& v) { return prob.apply_jacobian(cof, v); },
                             [&](const Vec& v) { return prob.precondition(cbar, v); }, rhs, dphi, 1e-13,
                             opts.max_linear_iterations);

    double step = 1.0;
    Vec trial(phi.size());
    std::array<Vec, 3> tcof;
    Vec tr, tpr;
    double tpres = 0.0;
    for (;;) {
      for (std::size_t k = 0; k < phi.size(); ++k) trial[k] = phi[k] + step * dphi[k];
      tr = prob.residual(trial, &tcof, &convex);
      tpr = prob.band_limit(tr);
      tpres = sup(tpr);
      if (convex && (tpres < pres || tpres <= opts.tolerance)) break;
      step *= 0.5;
      if (step < opts.min_step)
        fail(ErrorKind::NotConvexIterate, "damping fell below " + std::to_string(opts.min_step));
    }
    phi = trial;
    cof = std::move(tcof);
    r = std::move(tr);
    pr = std::move(tpr);
    pres = tpres;
    sol.history.push_back({it, sup(r), step, lin});
  }
  sol.phi = ScalarField(f.mesh_ptr());
  sol.phi.raw() = prob.band_limit(phi);
  sol.residual = sup(r);
  sol.projected_residual = pres;
  sol.newton_iterations = it;
  return sol;
}

std::string ma_diagnostics_csv(const MASolution& sol) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,residual,damping\n";
  for (const auto& h : sol.history) os << h.iteration << ',' << h.residual << ',' << h.damping << '\n';
  return os.str();
}

SymMat optimal_shape_matrix(const SymMat& a_plus, double fbar) {
  const int d = a_plus.dim();
  require(fbar > 0.0, ErrorKind::InvalidArgument, "mean of f must be positive");
  const double det = a_plus.det();
  if (!(det > 1e-14 * std::pow(std::max(a_plus.norm2(), 1e-300), d)))
    fail(ErrorKind::SingularAPlus, "mean tensor is singular");
  const double lambda = std::exp((std::log(fbar) - (d - 1) * std::log(det)) / d);
  return lambda * cofactor(a_plus);
}

double lattice_inverse_norm(const SmallMatrix& basis) {
  const int d = static_cast<int>(basis.rows());
  require(std::abs(basis.determinant()) > 1e-12, ErrorKind::SingularLattice, "lattice basis is singular");
  const SmallMatrix inv = basis.inverse();
  double best = 0.0;
  SmallVector sgn(d);
  for (unsigned mask = 0; mask < (1U << d); ++mask) {
    for (int j = 0; j < d; ++j) sgn(j) = (mask >> j) & 1U ? -1.0 : 1.0;
    best = std::max(best, (inv * sgn).norm());
  }
  return best;
}

double lattice_gradient_constant(const SmallMatrix& basis, const SymMat& s) {
  const double n = lattice_inverse_norm(basis);
  double m = 0.0;
  for (Eigen::Index j = 0; j < basis.rows(); ++j) {
    const SmallVector g = basis.row(j).transpose();
    m = std::max(m, 0.5 * g.dot(s.matrix() * g));
  }
  return n * m;
}

double lattice_trace_constant(const SmallMatrix& basis) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < basis.rows(); ++j) m = std::max(m, 0.5 * basis.row(j).squaredNorm());
  return lattice_inverse_norm(basis) * m;
}

ProofTrace proof_trace_periodic(const TensorField& field, MAOptions opts, double slack_tol) {
  const Mesh& mesh = field.mesh();
  require(mesh.periodic() && field.dim() == 2, ErrorKind::UnsupportedDomain, "proof trace runs on a 2-D torus");
  const int d = 2;
  ScalarField f = map_cells(field, det_root);
  double fmax = 0.0;
  for (double x : f.raw()) fmax = std::max(fmax, x);
  for (double& x : f.raw()) x = std::max(x, 1e-8 * fmax);
  const SymMat a_plus = field_average(field);
  const double fbar = average(f);
  const SymMat s = optimal_shape_matrix(a_plus, fbar);

  ProofTrace pt;
  pt.solution = solve_periodic_ma(f, s, opts);
  const auto hess = physical_hessian(mesh, pt.solution.phi.raw());
  pt.slack = ScalarField(field.mesh_ptr());
  for (std::size_t c = 0; c < field.size(); ++c) {
    SymMat m = s;
    for (int k = 0; k < packed_size(d); ++k) m.packed()[k] += hess[k][c];
    pt.slack[c] = (field[c].matrix() * m.matrix()).trace() / d - f[c];
  }
  pt.mean_slack = average(pt.slack);
  pt.min_slack = *std::min_element(pt.slack.raw().begin(), pt.slack.raw().end());
  pt.shape_gap = (a_plus.matrix() * s.matrix()).trace() / d - fbar;
  pt.periodic_gap = det_root(a_plus) - fbar;

  const VectorField div = discrete_divergence(field);
  ScalarField dg(field.mesh_ptr());
  std::array<Vec, 2> grad = {physical_derivative(mesh, pt.solution.phi.raw(), 0),
                             physical_derivative(mesh, pt.solution.phi.raw(), 1)};
  for (std::size_t c = 0; c < field.size(); ++c) dg[c] = div.at(c)[0] * grad[0][c] + div.at(c)[1] * grad[1][c];
  pt.divergence_term = average(dg) / d;

  // mean slack = shape gap - divergence term, exactly up to roundoff
  const double identity_err = std::abs(pt.mean_slack - (pt.shape_gap - pt.divergence_term));
  pt.report = make_report("proof_trace_periodic", fbar, fbar + pt.shape_gap, mesh.spacing(), slack_tol);
  pt.report.pass = pt.min_slack >= -slack_tol && identity_err <= 1e-10 * (1.0 + fbar) && pt.report.pass;
  pt.report.notes = "min slack and accounting identity";
  pt.report.extras = {{"mean_slack", pt.mean_slack},        {"min_slack", pt.min_slack},
                      {"shape_gap", pt.shape_gap},          {"divergence_term", pt.divergence_term},
                      {"periodic_gap", pt.periodic_gap},    {"ma_residual", pt.solution.residual},
                      {"newton_iterations", pt.solution.newton_iterations}, {"identity_error", identity_err}};
  return pt;
}

CheckReport nondiv_bound(const TensorField& field, Tolerance tol) {
  const auto* torus = std::get_if<Torus>(&field.mesh().domain());
  require(torus != nullptr, ErrorKind::UnsupportedDomain, "nondivergence bound needs a torus");
  const int d = field.dim();
  const double lhs = average(map_cells(field, det_root));
  const double mass = divergence_mass(field) / field.mesh().total_volume();
  const double c = lattice_trace_constant(torus->basis);
  const double rhs = det_root(field_average(field) + SymMat::identity(d, c * mass));
  auto r = make_report("nondiv_bound", lhs, rhs, field.mesh().spacing(), tol.total());
  r.extras = {{"lattice_constant", c}, {"mean_divergence_mass", mass}};
  return r;
}

}  // namespace dpt
