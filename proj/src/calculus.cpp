#include "dpt/calculus.hpp"

#include <cmath>
#include <numbers>

#include "dpt/errors.hpp"
#include "dpt/numerics.hpp"
#include "dpt/spectral.hpp"

namespace dpt {

namespace {

// Derivative along computational axis `axis` inside every block.
std::vector<double> computational_derivative(const Mesh& mesh, std::span<const double> f, int axis,
                                             DerivativeMethod method) {
  std::vector<double> out(f.size());
  if (mesh.periodic() && method == DerivativeMethod::Spectral) {
    const Spectral sp(mesh.blocks().front().shape);
    return sp.derivative(f, axis);
  }
  const int d = mesh.dim();
  std::vector<int> idx(d);
  for (const auto& b : mesh.blocks()) {
    const int n = b.shape[axis];
    std::size_t stride = 1;
    for (int a = d - 1; a > axis; --a) stride *= b.shape[a];
    std::vector<double> line(n), dline(n);
    const bool spectral_line = b.periodic[axis] && method == DerivativeMethod::Spectral;
    const Spectral sp1({n});
    for (std::size_t local = 0; local < b.size; ++local) {
      b.unravel(local, idx);
      if (idx[axis] != 0) continue;
      for (int i = 0; i < n; ++i) line[i] = f[b.offset + local + i * stride];
      if (spectral_line)
        dline = sp1.derivative(line, 0);
      else
        fd4_derivative(line, b.step(axis), b.periodic[axis], dline);
      for (int i = 0; i < n; ++i) out[b.offset + local + i * stride] = dline[i];
    }
  }
  return out;
}

}  // namespace

std::vector<double> physical_derivative(const Mesh& mesh, std::span<const double> f, int j, DerivativeMethod method) {
  const int d = mesh.dim();
  std::vector<double> out(f.size(), 0.0);
  for (int a = 0; a < d; ++a) {
    const auto da = computational_derivative(mesh, f, a, method);
    for (std::size_t c = 0; c < f.size(); ++c) {
      const double g = mesh.periodic() ? mesh.inverse_jacobian(0)(a, j) : mesh.inverse_jacobian(c)(a, j);
      out[c] += g * da[c];
    }
  }
  return out;
}

std::vector<std::vector<double>> physical_hessian(const Mesh& mesh, std::span<const double> f) {
  require(mesh.periodic(), ErrorKind::UnsupportedDomain, "spectral Hessian needs a torus");
  const int d = mesh.dim();
  const Spectral sp(mesh.blocks().front().shape);
  const SmallMatrix g = mesh.inverse_jacobian(0);
  const double tau2 = 4.0 * std::numbers::pi * std::numbers::pi;
  std::vector<std::vector<double>> h;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      h.push_back(sp.apply(f, [&](std::span<const int> m) {
        double ki = 0.0, kj = 0.0;
        for (int a = 0; a < d; ++a) {
          ki += g(a, i) * m[a];
          kj += g(a, j) * m[a];
        }
        return std::complex<double>(-tau2 * ki * kj, 0.0);
      }));
    }
  }
  return h;
}

VectorField discrete_divergence(const TensorField& field, DerivativeMethod method) {
  const Mesh& mesh = field.mesh();
  const int d = mesh.dim();
  VectorField div(field.mesh_ptr(), d);
  // Derivatives of every packed component along every computational axis.
  std::vector<std::vector<std::vector<double>>> dc(packed_size(d));
  {
    int k = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j, ++k) {
        const auto comp = field.component(k);
        for (int a = 0; a < d; ++a) dc[k].push_back(computational_derivative(mesh, comp, a, method));
      }
  }
  const auto packed_index = [d](int i, int j) {
    if (i > j) std::swap(i, j);
    return i * d - i * (i - 1) / 2 + (j - i);
  };
  SmallMatrix g = mesh.inverse_jacobian(0);
  for (std::size_t c = 0; c < field.size(); ++c) {
    if (!mesh.periodic()) g = mesh.inverse_jacobian(c);
    auto out = div.at(c);
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) {
        const auto& dk = dc[packed_index(i, j)];
        for (int a = 0; a < d; ++a) s += g(a, j) * dk[a][c];
      }
      out[i] = s;
    }
  }
  return div;
}

double total_variation_mass(const VectorField& v) {
  std::vector<double> w(v.size());
  for (std::size_t c = 0; c < v.size(); ++c) {
    double s = 0.0;
    for (double x : v.at(c)) s += x * x;
    w[c] = std::sqrt(s) * v.mesh().volume(c);
  }
  return pairwise_sum(w);
}

double divergence_mass(const TensorField& field, DerivativeMethod method) {
  return total_variation_mass(discrete_divergence(field, method));
}

std::vector<BoundaryNode> boundary_nodes(const Mesh& mesh, int order) {
  require(!mesh.periodic(), ErrorKind::UnsupportedDomain, "a torus has no boundary");
  const int d = mesh.dim();
  const QuadratureRule rule = gauss_legendre(order);
  const int q = static_cast<int>(rule.nodes.size());
  std::vector<BoundaryNode> nodes;
  std::vector<int> idx(d), face_idx(d);
  std::vector<double> xi(d);
  SmallVector x;
  SmallMatrix jac;

  for (const auto& b : mesh.blocks()) {
    for (int a = 0; a < d; ++a) {
      for (int side = 0; side < 2; ++side) {
        if (!(side == 0 ? b.boundary_lo[a] : b.boundary_hi[a])) continue;
        const int n = b.shape[a];
        const int i0 = side == 0 ? 0 : n - 1;
        const int i1 = side == 0 ? 1 : n - 2;
        // tangential axes
        std::vector<int> tang;
        for (int t = 0; t < d; ++t)
          if (t != a) tang.push_back(t);
        std::size_t nq = 1;
        for (std::size_t t = 0; t < tang.size(); ++t) nq *= q;

        for (std::size_t local = 0; local < b.size; ++local) {
          b.unravel(local, idx);
          if (idx[a] != i0) continue;
          for (std::size_t k = 0; k < nq; ++k) {
            std::size_t rem = k;
            double w = 1.0;
            // per tangential axis: (cell index, coefficient) pairs
            std::vector<std::vector<std::pair<int, double>>> tcoef(tang.size());
            xi[a] = side == 0 ? 0.0 : 1.0;
            for (std::size_t t = 0; t < tang.size(); ++t) {
              const int ax = tang[t];
              const int qi = static_cast<int>(rem % q);
              rem /= q;
              const double h = b.step(ax);
              xi[ax] = (idx[ax] + rule.nodes[qi]) * h;
              w *= rule.weights[qi] * h;
              const double p = rule.nodes[qi] - 0.5;
              const int nb = b.shape[ax];
              int other = idx[ax] + (p >= 0 ? 1 : -1);
              double cj = 1.0 - std::abs(p), co = std::abs(p);
              if (b.periodic[ax]) {
                other = (other % nb + nb) % nb;
              } else if (other < 0 || other >= nb) {
                other = idx[ax] + (p >= 0 ? -1 : 1);
                cj = 1.0 + std::abs(p);
                co = -std::abs(p);
              }
              tcoef[t] = {{idx[ax], cj}, {other, co}};
            }
            b.map(xi, x, jac);
            const double det = jac.determinant();
            const SmallVector area = std::abs(det) * jac.inverse().row(a).transpose();
            BoundaryNode node;
            node.x = x;
            node.weight = w * area.norm();
            node.normal = (side == 0 ? -1.0 : 1.0) * area / area.norm();
            // tensor-product stencil
            const std::size_t nt = std::size_t{1} << tang.size();
            for (int nsel = 0; nsel < 2; ++nsel) {
              for (std::size_t sel = 0; sel < nt; ++sel) {
                face_idx = idx;
                face_idx[a] = nsel == 0 ? i0 : i1;
                double coef = nsel == 0 ? 1.5 : -0.5;
                for (std::size_t t = 0; t < tang.size(); ++t) {
                  const auto& pr = tcoef[t][(sel >> t) & 1U];
                  face_idx[tang[t]] = pr.first;
                  coef *= pr.second;
                }
                if (coef != 0.0) node.stencil.emplace_back(b.offset + b.linear(face_idx), coef);
              }
            }
            nodes.push_back(std::move(node));
          }
        }
      }
    }
  }
  return nodes;
}

SymMat trace_at(const TensorField& field, const BoundaryNode& node) {
  SymMat a(field.dim());
  for (const auto& [cell, coef] : node.stencil) a += coef * field[cell];
  return a;
}

double trace_at(const ScalarField& field, const BoundaryNode& node) {
  double v = 0.0;
  for (const auto& [cell, coef] : node.stencil) v += coef * field[cell];
  return v;
}

double boundary_trace_norm(const TensorField& field) {
  const auto nodes = boundary_nodes(field.mesh());
  std::vector<double> w(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const SmallVector an = trace_at(field, nodes[k]).matrix() * nodes[k].normal;
    w[k] = an.norm() * nodes[k].weight;
    if (!std::isfinite(w[k])) fail(ErrorKind::TraceUnavailable, "boundary extrapolation is not finite");
  }
  return pairwise_sum(w);
}

double boundary_integral(const ScalarField& f) {
  const auto nodes = boundary_nodes(f.mesh());
  std::vector<double> w(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) w[k] = trace_at(f, nodes[k]) * nodes[k].weight;
  return pairwise_sum(w);
}

double boundary_measure(const Mesh& mesh) {
  const auto nodes = boundary_nodes(mesh);
  std::vector<double> w(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) w[k] = nodes[k].weight;
  return pairwise_sum(w);
}

TensorField congruence(const TensorField& field, const SmallMatrix& p) {
  const auto* torus = std::get_if<Torus>(&field.mesh().domain());
  require(torus != nullptr, ErrorKind::UnsupportedDomain, "congruence resampling needs a periodic field");
  require(p.rows() == field.dim() && p.cols() == field.dim(), ErrorKind::InvalidArgument, "transform size mismatch");
  require(std::abs(p.determinant()) >= 1e-12, ErrorKind::SingularTransform, "transform is singular");
  // The image lattice has rows gamma_j P^T; fractional cell coordinates coincide on both grids.
  Torus image{torus->basis * p.transpose()};
  TensorField out(make_mesh(image, field.mesh().grid()), field.tag());
  for (std::size_t c = 0; c < field.size(); ++c) out.set(c, congruence(field[c], p));
  return out;
}

}  // namespace dpt
