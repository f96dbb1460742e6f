#include "dpt/field.hpp"

#include <fstream>

#include "json.hpp"

#include "dpt/errors.hpp"
#include "dpt/numerics.hpp"

namespace dpt {

using nlohmann::json;

CellData::CellData(MeshPtr mesh, int components, double fill)
    : mesh_(std::move(mesh)), components_(components), values_(mesh_->size() * components, fill) {}

std::vector<double> CellData::component(int k) const {
  std::vector<double> out(size());
  for (std::size_t c = 0; c < size(); ++c) out[c] = values_[c * components_ + k];
  return out;
}

void CellData::set_component(int k, std::span<const double> values) {
  for (std::size_t c = 0; c < size(); ++c) values_[c * components_ + k] = values[c];
}

TensorField::TensorField(MeshPtr mesh, std::string tag) : CellData(mesh, packed_size(mesh->dim())), tag_(std::move(tag)) {}

void TensorField::set(std::size_t cell, const SymMat& a) {
  require(a.dim() == dim(), ErrorKind::InvalidArgument, "tensor dimension differs from field dimension");
  const auto p = a.packed();
  std::copy(p.begin(), p.end(), at(cell).begin());
}

void require_same_grid(const CellData& a, const CellData& b) {
  require(a.mesh().same_grid(b.mesh()), ErrorKind::DomainMismatch, "fields live on different grids");
}

double integrate(const ScalarField& f) {
  std::vector<double> w(f.size());
  for (std::size_t c = 0; c < f.size(); ++c) w[c] = f[c] * f.mesh().volume(c);
  return pairwise_sum(w);
}

double average(const ScalarField& f) { return integrate(f) / f.mesh().total_volume(); }

SymMat field_average(const TensorField& field) {
  const int d = field.dim();
  SymMat mean(d);
  std::vector<double> w(field.size());
  for (int k = 0; k < packed_size(d); ++k) {
    for (std::size_t c = 0; c < field.size(); ++c) w[c] = field.at(c)[k] * field.mesh().volume(c);
    mean.packed()[k] = pairwise_sum(w) / field.mesh().total_volume();
  }
  return mean;
}

namespace {

json vec_json(const SmallVector& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

SmallVector vec_from(const json& j) {
  require(j.is_array() && !j.empty(), ErrorKind::ParseError, "expected a non-empty numeric array");
  SmallVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

}  // namespace

json domain_to_json(const DomainSpec& domain) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Torus>) {
          json rows = json::array();
          for (Eigen::Index i = 0; i < d.basis.rows(); ++i) rows.push_back(vec_json(d.basis.row(i).transpose()));
          return {{"kind", "torus"}, {"basis", rows}};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return {{"kind", "ball"}, {"center", vec_json(d.center)}, {"radius", d.radius}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return {{"kind", "box"}, {"lo", vec_json(d.lo)}, {"hi", vec_json(d.hi)}};
        } else {
          json hs = json::array();
          for (const auto& h : d.halfspaces) hs.push_back({{"normal", vec_json(h.normal)}, {"offset", h.offset}});
          return {{"kind", "polytope"}, {"halfspaces", hs}};
        }
      },
      domain);
}

DomainSpec domain_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "torus") {
      if (j.contains("side")) return Torus::unit(j.at("dim").get<int>(), j.at("side").get<double>());
      if (!j.contains("basis")) return Torus::unit(j.at("dim").get<int>());
      const auto& rows = j.at("basis");
      const auto d = static_cast<Eigen::Index>(rows.size());
      SmallMatrix m(d, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        const SmallVector r = vec_from(rows[i]);
        require(r.size() == d, ErrorKind::ParseError, "lattice basis must be square");
        m.row(i) = r.transpose();
      }
      return Torus{m};
    }
    if (kind == "ball") return Ball{vec_from(j.at("center")), j.at("radius").get<double>()};
    if (kind == "box") return Box{vec_from(j.at("lo")), vec_from(j.at("hi"))};
    if (kind == "polytope") {
      ConvexPolytope p;
      for (const auto& h : j.at("halfspaces")) p.halfspaces.push_back({vec_from(h.at("normal")), h.at("offset").get<double>()});
      return p;
    }
    fail(ErrorKind::ParseError, "unknown domain kind '" + kind + "'");
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("domain: ") + e.what());
  }
}

json to_json(const TensorField& field) {
  json values = json::array();
  for (double v : field.raw()) values.push_back(to_hexfloat(v));
  return {{"d", field.dim()},
          {"domain", domain_to_json(field.mesh().domain())},
          {"grid", field.mesh().grid().shape},
          {"tag", field.tag()},
          {"values", std::move(values)}};
}

TensorField tensor_field_from_json(const json& j) {
  try {
    const int d = j.at("d").get<int>();
    auto mesh = make_mesh(domain_from_json(j.at("domain")), GridSpec{j.at("grid").get<std::vector<int>>()});
    require(mesh->dim() == d, ErrorKind::ParseError, "header dimension disagrees with domain");
    TensorField field(mesh, j.value("tag", std::string{}));
    const auto& values = j.at("values");
    require(values.size() == field.raw().size(), ErrorKind::ParseError, "value count does not match grid");
    for (std::size_t k = 0; k < values.size(); ++k) field.raw()[k] = parse_hexfloat(values[k].get<std::string>());
    return field;
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("field: ") + e.what());
  }
}

void save_field(const TensorField& field, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::IOError, "cannot write " + path);
  out << to_json(field).dump() << '\n';
}

TensorField load_field(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::IOError, "cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
  return tensor_field_from_json(j);
}

}  // namespace dpt
