#include "dpt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "dpt/errors.hpp"
#include "dpt/numerics.hpp"

namespace dpt {

Torus Torus::unit(int dim, double side) {
  SmallMatrix basis = SmallMatrix::Identity(dim, dim) * side;
  return Torus{basis};
}

int dimension(const DomainSpec& domain) {
  return std::visit(
      [](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Torus>) return static_cast<int>(d.basis.rows());
        else if constexpr (std::is_same_v<T, Ball>) return static_cast<int>(d.center.size());
        else if constexpr (std::is_same_v<T, Box>) return static_cast<int>(d.lo.size());
        else return d.halfspaces.empty() ? 0 : static_cast<int>(d.halfspaces.front().normal.size());
      },
      domain);
}

bool is_torus(const DomainSpec& domain) { return std::holds_alternative<Torus>(domain); }

bool same_domain(const DomainSpec& a, const DomainSpec& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, Torus>) return x.basis == y.basis;
        else if constexpr (std::is_same_v<T, Ball>) return x.center == y.center && x.radius == y.radius;
        else if constexpr (std::is_same_v<T, Box>) return x.lo == y.lo && x.hi == y.hi;
        else {
          if (x.halfspaces.size() != y.halfspaces.size()) return false;
          for (std::size_t k = 0; k < x.halfspaces.size(); ++k)
            if (x.halfspaces[k].normal != y.halfspaces[k].normal || x.halfspaces[k].offset != y.halfspaces[k].offset)
              return false;
          return true;
        }
      },
      a);
}

std::size_t Block::linear(std::span<const int> index) const {
  std::size_t k = 0;
  for (std::size_t a = 0; a < shape.size(); ++a) k = k * shape[a] + index[a];
  return k;
}

void Block::unravel(std::size_t local, std::span<int> index) const {
  for (std::size_t a = shape.size(); a-- > 0;) {
    index[a] = static_cast<int>(local % shape[a]);
    local /= shape[a];
  }
}

std::vector<SmallVector> polygon_vertices(const ConvexPolytope& polytope) {
  const auto& hs = polytope.halfspaces;
  require(hs.size() >= 3, ErrorKind::UnsupportedDomain, "polygon needs at least three halfspaces");
  for (const auto& h : hs)
    require(h.normal.size() == 2, ErrorKind::UnsupportedDomain, "polytopes are supported in two dimensions only");
  double scale = 1.0;
  for (const auto& h : hs) scale = std::max(scale, std::abs(h.offset) / std::max(h.normal.norm(), 1e-300));
  const double feas_tol = 1e-10 * scale;

  std::vector<SmallVector> verts;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      Eigen::Matrix2d m;
      m << hs[i].normal(0), hs[i].normal(1), hs[j].normal(0), hs[j].normal(1);
      if (std::abs(m.determinant()) < 1e-14 * hs[i].normal.norm() * hs[j].normal.norm()) continue;
      const Eigen::Vector2d p = m.inverse() * Eigen::Vector2d(hs[i].offset, hs[j].offset);
      bool feasible = true;
      for (const auto& h : hs)
        if (h.normal(0) * p(0) + h.normal(1) * p(1) > h.offset + feas_tol * h.normal.norm()) feasible = false;
      if (!feasible) continue;
      bool dup = false;
      for (const auto& v : verts)
        if ((v - SmallVector(p)).norm() <= 1e-10 * scale) dup = true;
      if (!dup) verts.emplace_back(SmallVector(p));
    }
  }
  require(verts.size() >= 3, ErrorKind::UnsupportedDomain, "halfspaces do not bound a polygon with interior");

  // Bounded iff the normals positively span the plane: no angular gap of pi or more.
  std::vector<double> angles;
  for (const auto& h : hs) angles.push_back(std::atan2(h.normal(1), h.normal(0)));
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t k = 1; k < angles.size(); ++k) gap = std::max(gap, angles[k] - angles[k - 1]);
  require(gap < std::numbers::pi - 1e-12, ErrorKind::UnsupportedDomain, "halfspaces do not bound a polygon");

  SmallVector c = SmallVector::Zero(2);
  for (const auto& v : verts) c += v;
  c /= static_cast<double>(verts.size());
  std::sort(verts.begin(), verts.end(), [&](const SmallVector& a, const SmallVector& b) {
    return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
  });
  return verts;
}

namespace {

Block make_block(std::vector<int> shape, Block::Map map) {
  Block b;
  const std::size_t d = shape.size();
  b.shape = std::move(shape);
  b.periodic.assign(d, false);
  b.boundary_lo.assign(d, false);
  b.boundary_hi.assign(d, false);
  b.map = std::move(map);
  b.size = 1;
  for (int n : b.shape) b.size *= static_cast<std::size_t>(n);
  return b;
}

std::vector<Block> build_blocks(const DomainSpec& domain, const GridSpec& grid, int d) {
  const auto& shape = grid.shape;
  for (int n : shape) require(n >= 4, ErrorKind::InvalidArgument, "every grid shape entry must be at least 4");
  std::vector<Block> blocks;

  if (const auto* t = std::get_if<Torus>(&domain)) {
    require(t->basis.rows() == d && t->basis.cols() == d, ErrorKind::InvalidArgument, "lattice basis must be square");
    require(static_cast<int>(shape.size()) == d, ErrorKind::DomainMismatch, "grid rank differs from dimension");
    require(std::abs(t->basis.determinant()) > 1e-12, ErrorKind::SingularLattice, "lattice basis is singular");
    const SmallMatrix jac = t->basis.transpose();
    Block b = make_block(shape, [jac](std::span<const double> xi, SmallVector& x, SmallMatrix& j) {
      x = jac * Eigen::Map<const Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(xi.size()));
      j = jac;
    });
    b.periodic.assign(d, true);
    b.affine = true;
    blocks.push_back(std::move(b));
  } else if (const auto* bx = std::get_if<Box>(&domain)) {
    require(static_cast<int>(shape.size()) == d, ErrorKind::DomainMismatch, "grid rank differs from dimension");
    require(bx->hi.size() == d && ((bx->hi - bx->lo).array() > 0).all(), ErrorKind::InvalidArgument,
            "box corners must satisfy lo < hi");
    const SmallVector lo = bx->lo;
    const SmallVector width = bx->hi - bx->lo;
    Block b = make_block(shape, [lo, width](std::span<const double> xi, SmallVector& x, SmallMatrix& j) {
      const auto n = lo.size();
      x.resize(n);
      j = SmallMatrix::Zero(n, n);
      for (Eigen::Index a = 0; a < n; ++a) {
        x(a) = lo(a) + xi[a] * width(a);
        j(a, a) = width(a);
      }
    });
    b.boundary_lo.assign(d, true);
    b.boundary_hi.assign(d, true);
    b.affine = true;
    blocks.push_back(std::move(b));
  } else if (const auto* ball = std::get_if<Ball>(&domain)) {
    require(ball->radius > 0, ErrorKind::InvalidArgument, "ball radius must be positive");
    require(static_cast<int>(shape.size()) == d, ErrorKind::DomainMismatch, "grid rank differs from dimension");
    const SmallVector c = ball->center;
    const double r = ball->radius;
    constexpr double pi = std::numbers::pi;
    if (d == 2) {
      Block b = make_block(shape, [c, r](std::span<const double> xi, SmallVector& x, SmallMatrix& j) {
        const double s = xi[0], phi = 2.0 * pi * xi[1];
        x = c;
        x(0) += r * s * std::cos(phi);
        x(1) += r * s * std::sin(phi);
        j.resize(2, 2);
        j << r * std::cos(phi), -2.0 * pi * r * s * std::sin(phi), r * std::sin(phi), 2.0 * pi * r * s * std::cos(phi);
      });
      b.periodic[1] = true;
      b.boundary_hi[0] = true;
      blocks.push_back(std::move(b));
    } else if (d == 3) {
      Block b = make_block(shape, [c, r](std::span<const double> xi, SmallVector& x, SmallMatrix& j) {
        const double s = xi[0], th = pi * xi[1], phi = 2.0 * pi * xi[2];
        const double st = std::sin(th), ct = std::cos(th), sp = std::sin(phi), cp = std::cos(phi);
        x = c;
        x(0) += r * s * st * cp;
        x(1) += r * s * st * sp;
        x(2) += r * s * ct;
        j.resize(3, 3);
        j << r * st * cp, pi * r * s * ct * cp, -2.0 * pi * r * s * st * sp,  //
            r * st * sp, pi * r * s * ct * sp, 2.0 * pi * r * s * st * cp,    //
            r * ct, -pi * r * s * st, 0.0;
      });
      b.periodic[2] = true;
      b.boundary_hi[0] = true;
      blocks.push_back(std::move(b));
    } else {
      fail(ErrorKind::UnsupportedDomain, "balls are supported in dimensions 2 and 3");
    }
  } else {
    const auto& poly = std::get<ConvexPolytope>(domain);
    require(d == 2, ErrorKind::UnsupportedDomain, "polytopes are supported in two dimensions only");
    require(shape.size() == 2, ErrorKind::DomainMismatch, "polygon grid is (radial, along-facet)");
    const auto verts = polygon_vertices(poly);
    SmallVector c = SmallVector::Zero(2);
    for (const auto& v : verts) c += v;
    c /= static_cast<double>(verts.size());
    for (std::size_t k = 0; k < verts.size(); ++k) {
      const SmallVector v0 = verts[k];
      const SmallVector v1 = verts[(k + 1) % verts.size()];
      Block b = make_block(shape, [c, v0, v1](std::span<const double> xi, SmallVector& x, SmallMatrix& j) {
        const double s = xi[0], t = xi[1];
        const SmallVector edge_point = (1.0 - t) * v0 + t * v1;
        x = c + s * (edge_point - c);
        j.resize(2, 2);
        j.col(0) = edge_point - c;
        j.col(1) = s * (v1 - v0);
      });
      b.boundary_hi[0] = true;
      blocks.push_back(std::move(b));
    }
  }
  return blocks;
}

}  // namespace

Mesh::Mesh(DomainSpec domain, GridSpec grid) : domain_(std::move(domain)), grid_(std::move(grid)) {
  dim_ = dimension(domain_);
  require(dim_ >= 1 && dim_ <= kMaxDim, ErrorKind::InvalidArgument, "unsupported dimension");
  blocks_ = build_blocks(domain_, grid_, dim_);
  std::size_t total = 0;
  for (auto& b : blocks_) {
    b.offset = total;
    total += b.size;
  }
  centers_.resize(total * dim_);
  volumes_.resize(total);
  inverse_jacobians_.resize(total * dim_ * dim_);

  using Rule = boost::math::quadrature::gauss<double, 4>;
  std::vector<double> nodes, weights;
  for (double a : Rule::abscissa()) {
    if (a == 0.0) {
      nodes.push_back(0.0);
    } else {
      nodes.push_back(a);
      nodes.push_back(-a);
    }
  }
  for (std::size_t k = 0; k < Rule::weights().size(); ++k) {
    weights.push_back(Rule::weights()[k]);
    if (Rule::abscissa()[k] != 0.0) weights.push_back(Rule::weights()[k]);
  }
  const int q = static_cast<int>(nodes.size());

  std::vector<int> idx(dim_), qi(dim_);
  std::vector<double> xi(dim_), xq(dim_);
  SmallVector x;
  SmallMatrix jac;
  for (const auto& b : blocks_) {
    double cell_measure = 1.0;
    for (int a = 0; a < dim_; ++a) cell_measure *= b.step(a);
    for (std::size_t local = 0; local < b.size; ++local) {
      b.unravel(local, idx);
      for (int a = 0; a < dim_; ++a) xi[a] = (idx[a] + 0.5) * b.step(a);
      b.map(xi, x, jac);
      const std::size_t cell = b.offset + local;
      for (int a = 0; a < dim_; ++a) centers_[cell * dim_ + a] = x(a);
      const SmallMatrix inv = jac.inverse();
      for (int a = 0; a < dim_; ++a)
        for (int k = 0; k < dim_; ++k) inverse_jacobians_[(cell * dim_ + a) * dim_ + k] = inv(a, k);
      for (int a = 0; a < dim_; ++a) spacing_ = std::max(spacing_, jac.col(a).norm() * b.step(a));

      double vol = 0.0;
      if (b.affine) {
        vol = std::abs(jac.determinant()) * cell_measure;
      } else {
        std::size_t nq = 1;
        for (int a = 0; a < dim_; ++a) nq *= q;
        for (std::size_t k = 0; k < nq; ++k) {
          std::size_t rem = k;
          double w = cell_measure;
          for (int a = 0; a < dim_; ++a) {
            qi[a] = static_cast<int>(rem % q);
            rem /= q;
            xq[a] = xi[a] + 0.5 * b.step(a) * nodes[qi[a]];
            w *= 0.5 * weights[qi[a]];
          }
          b.map(xq, x, jac);
          vol += w * std::abs(jac.determinant());
        }
      }
      volumes_[cell] = vol;
    }
  }
  total_volume_ = pairwise_sum(volumes_);
}

SmallMatrix Mesh::inverse_jacobian(std::size_t cell) const {
  SmallMatrix m(dim_, dim_);
  for (int a = 0; a < dim_; ++a)
    for (int k = 0; k < dim_; ++k) m(a, k) = inverse_jacobians_[(cell * dim_ + a) * dim_ + k];
  return m;
}

bool Mesh::same_grid(const Mesh& other) const {
  return this == &other || (grid_.shape == other.grid_.shape && same_domain(domain_, other.domain_));
}

MeshPtr make_mesh(DomainSpec domain, GridSpec grid) {
  return std::make_shared<const Mesh>(std::move(domain), std::move(grid));
}

double unit_sphere_area(int d) {
  require(d >= 1, ErrorKind::InvalidArgument, "sphere dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace dpt
