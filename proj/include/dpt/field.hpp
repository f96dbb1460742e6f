#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpt/domain.hpp"
#include "dpt/sym_mat.hpp"

namespace dpt {

// Cell-centred samples with a fixed number of components per cell.
class CellData {
 public:
  CellData() = default;
  CellData(MeshPtr mesh, int components, double fill = 0.0);

  const MeshPtr& mesh_ptr() const { return mesh_; }
  const Mesh& mesh() const { return *mesh_; }
  int dim() const { return mesh_->dim(); }
  std::size_t size() const { return mesh_->size(); }
  int components() const { return components_; }

  std::span<const double> at(std::size_t cell) const {
    return {values_.data() + cell * components_, static_cast<std::size_t>(components_)};
  }
  std::span<double> at(std::size_t cell) {
    return {values_.data() + cell * components_, static_cast<std::size_t>(components_)};
  }
  std::vector<double>& raw() { return values_; }
  const std::vector<double>& raw() const { return values_; }

  // Values of one component over all cells.
  std::vector<double> component(int k) const;
  void set_component(int k, std::span<const double> values);

 protected:
  MeshPtr mesh_;
  int components_ = 0;
  std::vector<double> values_;
};

class ScalarField : public CellData {
 public:
  ScalarField() = default;
  explicit ScalarField(MeshPtr mesh, double fill = 0.0) : CellData(std::move(mesh), 1, fill) {}
  double operator[](std::size_t cell) const { return values_[cell]; }
  double& operator[](std::size_t cell) { return values_[cell]; }
};

class VectorField : public CellData {
 public:
  VectorField() = default;
  VectorField(MeshPtr mesh, int components) : CellData(std::move(mesh), components) {}
};

class TensorField : public CellData {
 public:
  TensorField() = default;
  TensorField(MeshPtr mesh, std::string tag = {});

  SymMat operator[](std::size_t cell) const { return SymMat(dim(), at(cell)); }
  void set(std::size_t cell, const SymMat& a);
  const std::string& tag() const { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

 private:
  std::string tag_;
};

void require_same_grid(const CellData& a, const CellData& b);

// Integral over the domain and volume average.
double integrate(const ScalarField& f);
double average(const ScalarField& f);
SymMat field_average(const TensorField& field);

// Pointwise map to a scalar field.
template <class F>
ScalarField map_cells(const TensorField& field, F&& f) {
  ScalarField out(field.mesh_ptr());
  for (std::size_t c = 0; c < field.size(); ++c) out[c] = f(field[c]);
  return out;
}

nlohmann::json domain_to_json(const DomainSpec& domain);
DomainSpec domain_from_json(const nlohmann::json& j);

// Header {d, domain, grid, tag} plus bit-exact hexfloat values.
nlohmann::json to_json(const TensorField& field);
TensorField tensor_field_from_json(const nlohmann::json& j);
void save_field(const TensorField& field, const std::string& path);
TensorField load_field(const std::string& path);

}  // namespace dpt
