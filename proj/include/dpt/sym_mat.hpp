#pragma once

#include <array>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dpt {

inline constexpr int kMaxDim = 6;
inline constexpr double kDefaultPsdTol = 1e-10;

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

constexpr int packed_size(int dim) { return dim * (dim + 1) / 2; }

// Symmetric matrix stored as its packed upper triangle, row by row.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(int dim);
  SymMat(int dim, std::span<const double> packed);

  static SymMat identity(int dim, double scale = 1.0);
  static SymMat diagonal(std::span<const double> diag);
  static SymMat from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static SymMat from_matrix(const SmallMatrix& m);
  static SymMat outer(std::span<const double> v, double weight = 1.0);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }
  double& operator()(int i, int j) { return data_[index(i, j)]; }
  std::span<const double> packed() const { return {data_.data(), static_cast<std::size_t>(packed_size(dim_))}; }
  std::span<double> packed() { return {data_.data(), static_cast<std::size_t>(packed_size(dim_))}; }

  SmallMatrix matrix() const;
  double trace() const;
  double det() const;
  double norm2() const;  // spectral norm
  double frobenius() const;
  SmallVector eigenvalues() const;  // ascending
  double min_eigenvalue() const;

  SymMat& operator+=(const SymMat& o);
  SymMat& operator-=(const SymMat& o);
  SymMat& operator*=(double s);
  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(SymMat a, double s) { return a *= s; }
  friend SymMat operator*(double s, SymMat a) { return a *= s; }
  friend bool operator==(const SymMat& a, const SymMat& b);

 private:
  int index(int i, int j) const;

  int dim_ = 0;
  std::array<double, packed_size(kMaxDim)> data_{};
};

// Adjugate: cofactor(a) * a == det(a) * I, defined for singular a too.
SymMat cofactor(const SymMat& a);

bool psd_check(const SymMat& a, double tol = kDefaultPsdTol);

// det(a)^alpha for PSD a; small negative determinants from roundoff clamp to 0.
double det_power(const SymMat& a, double alpha, double tol = kDefaultPsdTol);

// P a P^T
SymMat congruence(const SymMat& a, const SmallMatrix& p);

// Determinant by partially pivoted elimination in extended precision.
double determinant(const SmallMatrix& m);

}  // namespace dpt
