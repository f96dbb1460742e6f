#include "dpt/homogenization.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dpt/calculus.hpp"
#include "dpt/constructors.hpp"
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

class CellProblem {
 public:
  explicit CellProblem(const TensorField& a)
      : a_(a), mesh_(a.mesh()), d_(a.dim()), sp_(mesh_.blocks().front().shape), g_(mesh_.inverse_jacobian(0)),
        a_plus_(field_average(a)) {}

  std::vector<Vec> gradient(const Vec& u) const {
    std::vector<Vec> g;
    for (int j = 0; j < d_; ++j) g.push_back(physical_derivative(mesh_, u, j));
    return g;
  }

  // -div(A (xi + grad u)) with xi optional
  Vec apply(const Vec& u, const SmallVector* xi) const {
    const auto g = gradient(u);
    Vec out(u.size(), 0.0);
    for (int i = 0; i < d_; ++i) {
      Vec flux(u.size(), 0.0);
      for (std::size_t c = 0; c < u.size(); ++c) {
        const SymMat a = a_[c];
        for (int j = 0; j < d_; ++j) flux[c] += a(i, j) * (g[j][c] + (xi ? (*xi)(j) : 0.0));
      }
      const Vec df = physical_derivative(mesh_, flux, i);
      for (std::size_t c = 0; c < u.size(); ++c) out[c] -= df[c];
    }
    return out;
  }

  // inverse of -div(A+ grad) on mean-zero band-limited functions
  Vec precondition(const Vec& r) const {
    const double tau2 = 4.0 * std::numbers::pi * std::numbers::pi;
    return sp_.apply(r, [&](std::span<const int> m) {
      SmallVector k = SmallVector::Zero(d_);
      bool zero = true;
      for (int a = 0; a < d_; ++a) {
        zero = zero && m[a] == 0;
        for (int j = 0; j < d_; ++j) k(j) += g_(a, j) * m[a];
      }
      return zero ? 0.0 : 1.0 / (tau2 * k.dot(a_plus_.matrix() * k));
    });
  }

  Vec band_limit(const Vec& v) const {
    return sp_.apply(v, [&](std::span<const int> m) {
      for (int a = 0; a < d_; ++a)
        if (m[a] != 0) return 1.0;
      return 0.0;
    });
  }

 private:
  const TensorField& a_;
  const Mesh& mesh_;
  int d_;
  Spectral sp_;
  SmallMatrix g_;
  SymMat a_plus_;
};

CellCorrector solve_cell(const CellProblem& prob, const TensorField& field, const SmallVector& xi, HomogOptions opts) {
  const std::size_t n = field.size();
  CellCorrector cc;
  cc.xi = xi;
  Vec u(n, 0.0);
  Vec r = prob.band_limit(prob.apply(u, &xi));
  for (double& x : r) x = -x;
  const double bnorm = std::sqrt(dot(r, r));
  const double scale = std::max(bnorm, 1e-300);
  Vec z = prob.precondition(r), p = z;
  double rz = dot(r, z);
  int it = 0;
  while (std::sqrt(dot(r, r)) > opts.tolerance * scale && bnorm > 1e-14) {
    if (it >= opts.max_iterations)
      fail(ErrorKind::SolverDiverged, "cell problem did not converge in " + std::to_string(it) + " iterations");
    ++it;
    const Vec ap = prob.band_limit(prob.apply(p, nullptr));
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) fail(ErrorKind::SolverDiverged, "cell operator lost positivity");
    const double alpha = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      u[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    z = prob.precondition(r);
    const double rz_new = dot(r, z);
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + (rz_new / rz) * p[k];
    rz = rz_new;
  }
  cc.u = ScalarField(field.mesh_ptr());
  cc.u.raw() = u;
  const Vec res = prob.band_limit(prob.apply(u, &xi));
  cc.residual = std::sqrt(dot(res, res)) / std::max(1.0, bnorm);
  cc.iterations = it;
  for (const auto& g : prob.gradient(u))
    for (double x : g) cc.max_gradient = std::max(cc.max_gradient, std::abs(x));
  return cc;
}

}  // namespace

Homogenized homogenize(const TensorField& field, HomogOptions opts) {
  require(field.mesh().periodic(), ErrorKind::UnsupportedDomain, "cell problems need a torus");
  const int d = field.dim();
  Homogenized h;
  h.alpha = INFINITY;
  for (std::size_t c = 0; c < field.size(); ++c) {
    const auto ev = field[c].eigenvalues();
    h.alpha = std::min(h.alpha, ev(0));
    h.beta = std::max(h.beta, ev(ev.size() - 1));
  }
  if (!(h.alpha > 1e-12 * h.beta)) fail(ErrorKind::NotElliptic, "smallest eigenvalue " + std::to_string(h.alpha));

  const CellProblem prob(field);
  for (int i = 0; i < d; ++i) h.correctors.push_back(solve_cell(prob, field, SmallVector::Unit(d, i), opts));

  std::vector<std::vector<Vec>> grads;
  for (const auto& cc : h.correctors) grads.push_back(prob.gradient(cc.u.raw()));
  SmallMatrix energy(d, d);
  Vec terms(field.size());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      for (std::size_t c = 0; c < field.size(); ++c) {
        const SymMat a = field[c];
        double s = 0.0;
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q)
            s += ((p == i) + grads[i][p][c]) * a(p, q) * ((q == j) + grads[j][q][c]);
        terms[c] = s;
      }
      energy(i, j) = pairwise_sum(terms) / static_cast<double>(field.size());
    }
  h.asymmetry = (energy - energy.transpose()).norm();
  h.a_eff = SymMat::from_matrix(0.5 * (energy + energy.transpose()));
  return h;
}

SymMat effective_tensor(const TensorField& field, HomogOptions opts) { return homogenize(field, opts).a_eff; }

SymMat harmonic_mean(const TensorField& field) {
  SmallMatrix acc = SmallMatrix::Zero(field.dim(), field.dim());
  for (std::size_t c = 0; c < field.size(); ++c) acc += field[c].matrix().inverse();
  return SymMat::from_matrix((acc / static_cast<double>(field.size())).inverse());
}

SymMat laminate_effective(const SymMat& b, const SymMat& c, const SmallVector& xi, double theta) {
  const SmallVector n = xi.normalized();
  const SmallVector jump = (b - c).matrix() * n;
  const double denom = n.dot(((1.0 - theta) * b + theta * c).matrix() * n);
  return SymMat::from_matrix(theta * b.matrix() + (1.0 - theta) * c.matrix() -
                             theta * (1.0 - theta) * jump * jump.transpose() / denom);
}

namespace {

double det_root(const SymMat& a) { return det_power(a, 1.0 / (a.dim() - 1)); }

SymMat random_spd(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  SmallMatrix m(d, d);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = g(rng);
  return SymMat::from_matrix(m * m.transpose() + 0.05 * SmallMatrix::Identity(d, d));
}

std::string describe(const SymMat& a) {
  std::ostringstream os;
  os.precision(6);
  os << '[';
  for (int i = 0; i < a.dim(); ++i) {
    os << (i ? ",[" : "[");
    for (int j = 0; j < a.dim(); ++j) os << (j ? "," : "") << a(i, j);
    os << ']';
  }
  os << ']';
  return os.str();
}

CheckReport tempt_falsifier(const TensorField& field, const HomogCheckOptions& opts) {
  const int d = field.dim();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double best = -INFINITY, best_lhs = 0.0, best_rhs = 0.0;
  std::string witness = "none";
  auto consider = [&](double lhs, double rhs, const std::string& what) {
    const double margin = (lhs - rhs) / rhs;
    if (margin > best) {
      best = margin;
      best_lhs = lhs;
      best_rhs = rhs;
      witness = what;
    }
  };
  // the supplied field first
  {
    const double lhs = average(map_cells(field, det_root));
    consider(lhs, det_root(effective_tensor(field, opts.solver)), "input field");
  }
  auto mesh = make_mesh(Torus::unit(d), GridSpec{std::vector<int>(d, 16)});
  std::normal_distribution<double> gauss;
  for (std::size_t it = 1; it < opts.budget; ++it) {
    if (it % 64 == 0) {
      // smooth SPD field: constant plus a trigonometric perturbation of bounded size
      const SymMat base = random_spd(rng, d);
      const SymMat bump = random_spd(rng, d);
      const double amp = 0.9 * base.min_eigenvalue() / bump.norm2();
      SmallVector k = SmallVector::Zero(d);
      k(it / 64 % d) = 1.0 + static_cast<double>(it / 128 % 2);
      TensorField f(mesh, "trig");
      for (std::size_t c = 0; c < f.size(); ++c) {
        double phase = 0.0;
        for (int a = 0; a < d; ++a) phase += k(a) * mesh->center(c)[a];
        f.set(c, base + std::sin(2.0 * std::numbers::pi * phase) * amp * bump);
      }
      consider(average(map_cells(f, det_root)), det_root(effective_tensor(f, opts.solver)),
               "trig base=" + describe(base) + " bump=" + describe(amp * bump));
      continue;
    }
    const SymMat b = random_spd(rng, d), c = random_spd(rng, d);
    SmallVector xi(d);
    for (int a = 0; a < d; ++a) xi(a) = gauss(rng);
    xi.normalize();
    const double theta = 0.05 + 0.9 * unit(rng);
    const double lhs = theta * det_root(b) + (1.0 - theta) * det_root(c);
    std::ostringstream what;
    what << "laminate B=" << describe(b) << " C=" << describe(c) << " theta=" << theta;
    consider(lhs, det_root(laminate_effective(b, c, xi, theta)), what.str());
  }
  CheckReport r = make_report("tempt_falsifier", best_lhs, best_rhs, 0.0, 0.0);
  r.pass = true;
  r.notes = (best > 0.0 ? "witness found: " : "no witness: ") + witness;
  r.extras = {{"best_margin", best}, {"witness_found", best > 0.0 ? 1.0 : 0.0},
              {"budget", static_cast<double>(opts.budget)}};
  return r;
}

}  // namespace

CheckReport homog_checks(const TensorField& field, HomogMode mode, HomogCheckOptions opts) {
  if (mode == HomogMode::TemptFalsifier) return tempt_falsifier(field, opts);
  const Homogenized h = homogenize(field, opts.solver);
  const SymMat a_plus = field_average(field);
  const double scale = a_plus.norm2();
  if (mode == HomogMode::Bounds) {
    const SymMat a_minus = harmonic_mean(field);
    const double lower = (h.a_eff - a_minus).min_eigenvalue();
    const double upper = (a_plus - h.a_eff).min_eigenvalue();
    const double eps = 1e-9 * scale;
    auto r = make_report("homog_bounds", -std::min(lower, upper), 0.0, field.mesh().spacing(), eps,
                         "lhs is minus the smaller PSD margin");
    r.extras = {{"lower_margin", lower}, {"upper_margin", upper}, {"asymmetry", h.asymmetry},
                {"a_eff_00", h.a_eff(0, 0)}, {"a_eff_01", h.a_eff(0, 1)}, {"a_eff_11", h.a_eff(1, 1)}};
    return r;
  }
  const double gap = (h.a_eff - a_plus).frobenius();
  const double mass = divergence_mass(field);
  const bool gap_small = gap <= opts.gap_small * scale;
  const bool mass_small = mass <= opts.mass_small * scale;
  auto r = make_report("homog_dpt_equivalence", gap, opts.gap_small * scale, field.mesh().spacing(), 0.0,
                       "pass iff the gap and the divergence mass are both small or both large");
  r.pass = gap_small == mass_small;
  double max_res = 0.0, max_grad = 0.0;
  for (const auto& cc : h.correctors) {
    max_res = std::max(max_res, cc.residual);
    max_grad = std::max(max_grad, cc.max_gradient);
  }
  r.extras = {{"divergence_mass", mass}, {"corrector_residual", max_res}, {"corrector_gradient", max_grad}};
  return r;
}

}  // namespace dpt
