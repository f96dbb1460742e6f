#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "dpt/sym_mat.hpp"

namespace dpt {

// Flat torus R^d / Z-span of the rows of `basis`.
struct Torus {
  SmallMatrix basis;
  static Torus unit(int dim, double side = 1.0);
};

struct Ball {
  SmallVector center;
  double radius = 1.0;
};

struct Box {
  SmallVector lo;
  SmallVector hi;
};

// normal . x <= offset
struct Halfspace {
  SmallVector normal;
  double offset = 0.0;
};

struct ConvexPolytope {
  std::vector<Halfspace> halfspaces;
};

using DomainSpec = std::variant<Torus, Ball, Box, ConvexPolytope>;

int dimension(const DomainSpec& domain);
bool is_torus(const DomainSpec& domain);
bool same_domain(const DomainSpec& a, const DomainSpec& b);

// Cells per computational axis. Torus and Box: one entry per Cartesian axis.
// Ball: (radial, angular...) in spherical coordinates. Polygon: (radial, along-facet),
// repeated for every facet.
struct GridSpec {
  std::vector<int> shape;
};

// Vertices of a bounded 2-D halfspace intersection in counter-clockwise order.
std::vector<SmallVector> polygon_vertices(const ConvexPolytope& polytope);

// Structured mapped block: cells are the tensor product of uniform intervals of [0,1]
// in computational coordinates, mapped to physical space.
struct Block {
  using Map = std::function<void(std::span<const double> xi, SmallVector& x, SmallMatrix& jacobian)>;

  std::vector<int> shape;
  std::vector<bool> periodic;
  std::vector<bool> boundary_lo;
  std::vector<bool> boundary_hi;
  std::size_t offset = 0;
  std::size_t size = 0;
  bool affine = false;
  Map map;

  double step(int axis) const { return 1.0 / shape[axis]; }
  std::size_t linear(std::span<const int> index) const;
  void unravel(std::size_t local, std::span<int> index) const;
};

class Mesh {
 public:
  Mesh(DomainSpec domain, GridSpec grid);

  const DomainSpec& domain() const { return domain_; }
  const GridSpec& grid() const { return grid_; }
  int dim() const { return dim_; }
  std::size_t size() const { return volumes_.size(); }
  bool periodic() const { return is_torus(domain_); }
  const std::vector<Block>& blocks() const { return blocks_; }

  std::span<const double> center(std::size_t cell) const {
    return {centers_.data() + cell * dim_, static_cast<std::size_t>(dim_)};
  }
  double volume(std::size_t cell) const { return volumes_[cell]; }
  std::span<const double> volumes() const { return volumes_; }
  // Row a is the physical gradient of computational coordinate a at the cell center.
  SmallMatrix inverse_jacobian(std::size_t cell) const;
  double total_volume() const { return total_volume_; }
  // Largest physical cell edge.
  double spacing() const { return spacing_; }

  bool same_grid(const Mesh& other) const;

 private:
  DomainSpec domain_;
  GridSpec grid_;
  int dim_ = 0;
  std::vector<Block> blocks_;
  std::vector<double> centers_;
  std::vector<double> volumes_;
  std::vector<double> inverse_jacobians_;
  double total_volume_ = 0.0;
  double spacing_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;
MeshPtr make_mesh(DomainSpec domain, GridSpec grid);

// Area of the unit sphere in R^d.
double unit_sphere_area(int d);

}  // namespace dpt
