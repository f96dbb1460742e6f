#include "dpt/constructors.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "dpt/calculus.hpp"
#include "dpt/errors.hpp"

namespace dpt {

using nlohmann::json;
using std::numbers::pi;

namespace {

double dot(const SmallVector& k, std::span<const double> x) {
  double s = 0.0;
  for (Eigen::Index a = 0; a < k.size(); ++a) s += k(a) * x[a];
  return s;
}

void require_dual(const SmallVector& k, const Torus& torus, const std::string& what) {
  for (Eigen::Index j = 0; j < torus.basis.rows(); ++j) {
    const double pairing = torus.basis.row(j).dot(k.transpose());
    require(std::abs(pairing - std::round(pairing)) <= 1e-9, ErrorKind::NotPeriodic,
            what + " wavevector is not in the dual lattice");
  }
}

}  // namespace

double TrigPolynomial::operator()(std::span<const double> x) const {
  double v = constant;
  for (const auto& t : terms) {
    const double arg = 2.0 * pi * dot(t.wavevector, x);
    v += t.cos_coef * std::cos(arg) + t.sin_coef * std::sin(arg);
  }
  return v;
}

SymMat TrigPolynomial::hessian(std::span<const double> x) const {
  SymMat h(static_cast<int>(x.size()));
  for (const auto& t : terms) {
    const double arg = 2.0 * pi * dot(t.wavevector, x);
    const double amp = -4.0 * pi * pi * (t.cos_coef * std::cos(arg) + t.sin_coef * std::sin(arg));
    h += SymMat::outer({t.wavevector.data(), static_cast<std::size_t>(t.wavevector.size())}, amp);
  }
  return h;
}

double Bump::operator()(std::span<const double> x) const {
  double r2 = 0.0;
  for (Eigen::Index a = 0; a < center.size(); ++a) r2 += (x[a] - center(a)) * (x[a] - center(a));
  const double q = 1.0 - r2 / (radius * radius);
  return q <= 0.0 ? 0.0 : amplitude * std::exp(-1.0 / q);
}

SymMat Bump::hessian(std::span<const double> x) const {
  const int d = static_cast<int>(center.size());
  SmallVector y(d);
  for (int a = 0; a < d; ++a) y(a) = x[a] - center(a);
  const double r2inv = 1.0 / (radius * radius);
  const double q = 1.0 - y.squaredNorm() * r2inv;
  SymMat h(d);
  if (q <= 0.0) return h;
  const double b = amplitude * std::exp(-1.0 / q);
  const SmallVector gq = -2.0 * r2inv * y;  // grad q
  const SmallVector g = gq / (q * q);      // grad(-1/q)
  const SmallMatrix hg = (-2.0 * r2inv / (q * q)) * SmallMatrix::Identity(d, d) - (2.0 / (q * q * q)) * gq * gq.transpose();
  return SymMat::from_matrix(b * (g * g.transpose() + hg));
}

LaminateSpec LaminateSpec::with_fraction(SymMat b, SymMat c, SmallVector xi, double theta) {
  require(theta >= 0.0 && theta <= 1.0, ErrorKind::InvalidArgument, "volume fraction outside [0,1]");
  return LaminateSpec{std::move(b), std::move(c), std::move(xi), {{0.0, theta}}, 0.0};
}

double LaminateSpec::fraction() const {
  double t = 0.0;
  for (const auto& [a, e] : intervals) t += e - a;
  return t;
}

double LaminateSpec::profile(double t) const {
  if (smoothing <= 0.0) {
    const double f = t - std::floor(t);
    for (const auto& [a, e] : intervals)
      if (f >= a && f < e) return 1.0;
    return 0.0;
  }
  // Periodic Gaussian mollification of the indicator, summed over nearby periods.
  double g = 0.0;
  for (const auto& [a, e] : intervals)
    for (int m = -3; m <= 3; ++m)
      g += 0.5 * (std::erf((t - a + m) / smoothing) - std::erf((t - e + m) / smoothing));
  return g;
}

TensorField constant_field(MeshPtr mesh, const SymMat& a) {
  TensorField f(std::move(mesh), "constant");
  for (std::size_t c = 0; c < f.size(); ++c) f.set(c, a);
  return f;
}

TensorField diagonal_dpt(const DiagonalSpec& spec, MeshPtr mesh) {
  const int d = mesh->dim();
  require(static_cast<int>(spec.entries.size()) == d, ErrorKind::InvalidArgument, "one diagonal entry per axis");
  const auto* torus = std::get_if<Torus>(&mesh->domain());
  require(torus != nullptr, ErrorKind::UnsupportedDomain, "diagonal tensors are built on a torus");
  require(torus->basis.isDiagonal(), ErrorKind::UnsupportedDomain, "diagonal tensors need an axis-aligned lattice");
  for (int j = 0; j < d; ++j)
    for (const auto& t : spec.entries[j].terms) {
      require(t.wavevector.size() == d, ErrorKind::InvalidArgument, "wavevector dimension");
      require(t.wavevector(j) == 0.0, ErrorKind::InvalidArgument,
              "diagonal entry " + std::to_string(j) + " depends on its own coordinate");
      require_dual(t.wavevector, *torus, "diagonal entry");
    }
  TensorField f(mesh, "diagonal");
  for (std::size_t c = 0; c < f.size(); ++c) {
    SymMat a(d);
    for (int j = 0; j < d; ++j) {
      a(j, j) = spec.entries[j](mesh->center(c));
      if (a(j, j) < 0.0)
        fail(ErrorKind::NegativeEntry, "entry " + std::to_string(j) + " is negative at cell " + std::to_string(c));
    }
    f.set(c, a);
  }
  return f;
}

TensorField hessian_cofactor(const PotentialSpec& spec, MeshPtr mesh) {
  const int d = mesh->dim();
  require(spec.s.dim() == d, ErrorKind::InvalidArgument, "shape matrix dimension");
  std::vector<SymMat> hess(mesh->size(), SymMat(d));
  if (const auto* torus = std::get_if<Torus>(&mesh->domain())) {
    require(spec.radial.empty(), ErrorKind::NotPeriodic, "radial potential terms are not periodic");
    for (const auto& t : spec.psi.terms) require_dual(t.wavevector, *torus, "potential");
    const SmallMatrix to_frac = torus->basis.transpose().inverse();
    std::vector<double> psi(mesh->size());
    SmallVector y(d);
    for (std::size_t c = 0; c < mesh->size(); ++c) {
      const auto x = mesh->center(c);
      psi[c] = spec.psi(x);
      for (const auto& b : spec.bumps) {
        // minimum image of x relative to the bump centre
        for (int a = 0; a < d; ++a) y(a) = x[a] - b.center(a);
        SmallVector s = to_frac * y;
        for (int a = 0; a < d; ++a) s(a) -= std::round(s(a));
        const SmallVector img = b.center + torus->basis.transpose() * s;
        psi[c] += b({img.data(), static_cast<std::size_t>(d)});
      }
    }
    const auto h = physical_hessian(*mesh, psi);
    for (std::size_t c = 0; c < mesh->size(); ++c)
      for (int k = 0; k < packed_size(d); ++k) hess[c].packed()[k] = h[k][c];
  } else {
    for (std::size_t c = 0; c < mesh->size(); ++c) {
      const auto x = mesh->center(c);
      SymMat h = spec.psi.hessian(x);
      for (const auto& b : spec.bumps) h += b.hessian(x);
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
      for (std::size_t k = 0; k < spec.radial.size(); ++k) {
        const double m = static_cast<double>(k + 2);  // |x|^(2m) / (2m)
        h += SymMat::identity(d, spec.radial[k] * std::pow(r2, m - 1.0));
        if (m > 1.0) h += SymMat::outer(x, spec.radial[k] * (2.0 * m - 2.0) * std::pow(r2, m - 2.0));
      }
      hess[c] = h;
    }
  }
  TensorField f(mesh, "hessian_cofactor");
  double worst = 0.0;
  std::size_t worst_cell = 0;
  for (std::size_t c = 0; c < mesh->size(); ++c) {
    const SymMat m = spec.s + hess[c];
    const double lo = m.min_eigenvalue() / (1.0 + m.norm2());
    if (lo < worst) {
      worst = lo;
      worst_cell = c;
    }
    f.set(c, cofactor(m));
  }
  if (worst < -kDefaultPsdTol)
    fail(ErrorKind::NotConvex, "potential Hessian is indefinite; worst cell " + std::to_string(worst_cell) +
                                   " with relative eigenvalue " + std::to_string(worst));
  return f;
}

void LaminateSpec::validate() const {
  require(b.dim() == c.dim() && xi.size() == b.dim(), ErrorKind::InvalidArgument, "laminate dimension mismatch");
  require(psd_check(b) && psd_check(c), ErrorKind::NotPSD, "laminate states must be PSD");
  for (const auto& [lo, hi] : intervals)
    require(0.0 <= lo && lo <= hi && hi <= 1.0, ErrorKind::InvalidArgument, "profile intervals must lie in [0,1]");
  const SymMat jump = c - b;
  const double defect = (jump.matrix() * xi).norm();
  require(defect <= 1e-12 * jump.frobenius() * xi.norm(), ErrorKind::IncompatiblePair,
          "(c - b) xi = " + std::to_string(defect) + " is not zero");
}

TensorField laminate(const LaminateSpec& spec, MeshPtr mesh) {
  const int d = mesh->dim();
  require(spec.b.dim() == d, ErrorKind::InvalidArgument, "laminate dimension mismatch");
  spec.validate();
  if (const auto* torus = std::get_if<Torus>(&mesh->domain())) require_dual(spec.xi, *torus, "laminate");
  TensorField f(mesh, "laminate");
  for (std::size_t c = 0; c < mesh->size(); ++c) {
    const double g = spec.profile(dot(spec.xi, mesh->center(c)));
    f.set(c, g * spec.b + (1.0 - g) * spec.c);
  }
  return f;
}

SymMat euler_tensor(double rho, std::span<const double> u, double p) {
  if (!(rho >= 0.0)) fail(ErrorKind::NegativeDensity, "density " + std::to_string(rho));
  if (!(p >= 0.0)) fail(ErrorKind::NegativePressure, "pressure " + std::to_string(p));
  const int n = static_cast<int>(u.size());
  SymMat a(n + 1);
  a(0, 0) = rho;
  for (int i = 0; i < n; ++i) {
    a(0, i + 1) = rho * u[i];
    for (int j = i; j < n; ++j) a(i + 1, j + 1) = rho * u[i] * u[j] + (i == j ? p : 0.0);
  }
  return a;
}

TensorField euler_tensor(const ScalarField& rho, const VectorField& u, const ScalarField& p) {
  require_same_grid(rho, u);
  require_same_grid(rho, p);
  require(u.components() + 1 == rho.dim(), ErrorKind::DomainMismatch, "space-time dimension is n + 1");
  TensorField f(rho.mesh_ptr(), "euler");
  for (std::size_t c = 0; c < f.size(); ++c) f.set(c, euler_tensor(rho[c], u.at(c), p[c]));
  return f;
}

SymMat kinetic_moment_tensor(std::span<const VelocityAtom> atoms) {
  require(!atoms.empty(), ErrorKind::InvalidArgument, "no velocity atoms");
  const int n = static_cast<int>(atoms.front().velocity.size());
  SymMat a(n + 1);
  std::vector<double> lifted(n + 1);
  for (const auto& atom : atoms) {
    if (!(atom.density >= 0.0) || !(atom.weight >= 0.0))
      fail(ErrorKind::NegativeDistribution, "negative distribution value or weight");
    lifted[0] = 1.0;
    for (int i = 0; i < n; ++i) lifted[i + 1] = atom.velocity(i);
    a += SymMat::outer(lifted, atom.weight * atom.density);
  }
  return a;
}

SymMat relativistic_tensor(double rho, std::span<const double> v, double p, double c) {
  if (!(rho >= 0.0)) fail(ErrorKind::NegativeDensity, "density " + std::to_string(rho));
  if (!(p >= 0.0)) fail(ErrorKind::NegativePressure, "pressure " + std::to_string(p));
  double v2 = 0.0;
  for (double x : v) v2 += x * x;
  if (!(v2 < c * c)) fail(ErrorKind::SuperluminalVelocity, "|v| >= c");
  const int n = static_cast<int>(v.size());
  const double w = (rho * c * c + p) / (c * c - v2);
  SymMat a(n + 1);
  a(0, 0) = w - p / (c * c);
  for (int i = 0; i < n; ++i) {
    a(0, i + 1) = w * v[i];
    for (int j = i; j < n; ++j) a(i + 1, j + 1) = w * v[i] * v[j] + (i == j ? p : 0.0);
  }
  return a;
}

TensorField relativistic_tensor(const ScalarField& rho, const VectorField& v, const ScalarField& p, double c) {
  require_same_grid(rho, v);
  require_same_grid(rho, p);
  require(v.components() + 1 == rho.dim(), ErrorKind::DomainMismatch, "space-time dimension is n + 1");
  TensorField f(rho.mesh_ptr(), "relativistic");
  for (std::size_t k = 0; k < f.size(); ++k) f.set(k, relativistic_tensor(rho[k], v.at(k), p[k], c));
  return f;
}

SymMat selfsimilar_tensor(double rho, std::span<const double> v, double p) {
  if (!(rho >= 0.0)) fail(ErrorKind::NegativeDensity, "density " + std::to_string(rho));
  if (!(p >= 0.0)) fail(ErrorKind::NegativePressure, "pressure " + std::to_string(p));
  const int n = static_cast<int>(v.size());
  return SymMat::outer(v, rho) + SymMat::identity(n, p);
}

std::pair<TensorField, VectorField> selfsimilar_tensor(const ScalarField& rho, const VectorField& v,
                                                       const ScalarField& p) {
  require_same_grid(rho, v);
  require_same_grid(rho, p);
  const int n = rho.dim();
  require(v.components() == n, ErrorKind::DomainMismatch, "velocity has one component per axis");
  TensorField a(rho.mesh_ptr(), "selfsimilar");
  VectorField source(rho.mesh_ptr(), n);
  for (std::size_t c = 0; c < a.size(); ++c) {
    a.set(c, selfsimilar_tensor(rho[c], v.at(c), p[c]));
    for (int i = 0; i < n; ++i) source.at(c)[i] = -(n + 1) * rho[c] * v.at(c)[i];
  }
  return {std::move(a), std::move(source)};
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  require(j.is_object(), ErrorKind::ParseError, where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(ErrorKind::UnknownKey, where + ": unknown key '" + it.key() + "'");
  }
}

SmallVector vector_from_json(const json& j) {
  require(j.is_array() && !j.empty(), ErrorKind::ParseError, "expected a numeric array");
  SmallVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

SymMat sym_from_json(const json& j) {
  require(j.is_array() && !j.empty(), ErrorKind::ParseError, "expected a matrix");
  const int d = static_cast<int>(j.size());
  SmallMatrix m(d, d);
  for (int i = 0; i < d; ++i) {
    require(j[i].is_array() && static_cast<int>(j[i].size()) == d, ErrorKind::ParseError, "matrix must be square");
    for (int k = 0; k < d; ++k) m(i, k) = j[i][k].get<double>();
  }
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + m.cwiseAbs().maxCoeff()), ErrorKind::ParseError,
          "matrix must be symmetric");
  return SymMat::from_matrix(m);
}

TrigPolynomial trig_from_json(const json& j) {
  check_keys(j, {"constant", "terms"}, "trig polynomial");
  TrigPolynomial t;
  t.constant = j.value("constant", 0.0);
  if (j.contains("terms"))
    for (const auto& term : j.at("terms")) {
      check_keys(term, {"k", "cos", "sin"}, "trig term");
      t.terms.push_back({vector_from_json(term.at("k")), term.value("cos", 0.0), term.value("sin", 0.0)});
    }
  return t;
}

TensorField build_field(const json& spec) {
  try {
    const std::string tag = spec.at("tag").get<std::string>();
    if (tag == "file") {
      check_keys(spec, {"tag", "path"}, "file field");
      return load_field(spec.at("path").get<std::string>());
    }
    auto mesh = make_mesh(domain_from_json(spec.at("domain")), GridSpec{spec.at("grid").get<std::vector<int>>()});
    if (tag == "constant") {
      check_keys(spec, {"tag", "domain", "grid", "value"}, "constant field");
      return constant_field(mesh, sym_from_json(spec.at("value")));
    }
    if (tag == "diagonal") {
      check_keys(spec, {"tag", "domain", "grid", "entries"}, "diagonal field");
      DiagonalSpec d;
      for (const auto& e : spec.at("entries")) d.entries.push_back(trig_from_json(e));
      return diagonal_dpt(d, mesh);
    }
    if (tag == "hessian_cofactor") {
      check_keys(spec, {"tag", "domain", "grid", "s", "psi", "radial", "bumps"}, "hessian_cofactor field");
      PotentialSpec p;
      p.s = sym_from_json(spec.at("s"));
      if (spec.contains("psi")) p.psi = trig_from_json(spec.at("psi"));
      if (spec.contains("radial")) p.radial = spec.at("radial").get<std::vector<double>>();
      if (spec.contains("bumps"))
        for (const auto& b : spec.at("bumps")) {
          check_keys(b, {"center", "radius", "amplitude"}, "bump");
          p.bumps.push_back({vector_from_json(b.at("center")), b.at("radius").get<double>(), b.at("amplitude").get<double>()});
        }
      return hessian_cofactor(p, mesh);
    }
    if (tag == "laminate") {
      check_keys(spec, {"tag", "domain", "grid", "b", "c", "xi", "theta", "intervals", "smoothing"}, "laminate field");
      LaminateSpec l;
      l.b = sym_from_json(spec.at("b"));
      l.c = sym_from_json(spec.at("c"));
      l.xi = vector_from_json(spec.at("xi"));
      if (spec.contains("intervals")) {
        for (const auto& iv : spec.at("intervals")) l.intervals.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
      } else {
        l = LaminateSpec::with_fraction(l.b, l.c, l.xi, spec.at("theta").get<double>());
      }
      l.smoothing = spec.value("smoothing", 0.0);
      return laminate(l, mesh);
    }
    fail(ErrorKind::UnknownOperation, "unknown constructor tag '" + tag + "'");
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("constructor spec: ") + e.what());
  }
}

}  // namespace dpt
