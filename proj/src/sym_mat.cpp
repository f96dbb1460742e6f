#include "dpt/sym_mat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpt/errors.hpp"

namespace dpt {

SymMat::SymMat(int dim) : dim_(dim) {
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::InvalidArgument,
          "matrix dimension " + std::to_string(dim) + " outside [1, " + std::to_string(kMaxDim) + "]");
}

SymMat::SymMat(int dim, std::span<const double> packed) : SymMat(dim) {
  require(packed.size() == static_cast<std::size_t>(packed_size(dim)), ErrorKind::InvalidArgument,
          "packed length does not match dimension");
  std::copy(packed.begin(), packed.end(), data_.begin());
}

SymMat SymMat::identity(int dim, double scale) {
  SymMat a(dim);
  for (int i = 0; i < dim; ++i) a(i, i) = scale;
  return a;
}

SymMat SymMat::diagonal(std::span<const double> diag) {
  SymMat a(static_cast<int>(diag.size()));
  for (int i = 0; i < a.dim(); ++i) a(i, i) = diag[i];
  return a;
}

SymMat SymMat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  SymMat a(static_cast<int>(rows.size()));
  int i = 0;
  for (const auto& row : rows) {
    require(static_cast<int>(row.size()) == a.dim(), ErrorKind::InvalidArgument, "matrix is not square");
    int j = 0;
    for (double v : row) {
      if (j >= i) a(i, j) = v;
      ++j;
    }
    ++i;
  }
  return a;
}

SymMat SymMat::from_matrix(const SmallMatrix& m) {
  SymMat a(static_cast<int>(m.rows()));
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i; j < a.dim(); ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  return a;
}

SymMat SymMat::outer(std::span<const double> v, double weight) {
  SymMat a(static_cast<int>(v.size()));
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i; j < a.dim(); ++j) a(i, j) = weight * v[i] * v[j];
  return a;
}

int SymMat::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  return i * dim_ - i * (i - 1) / 2 + (j - i);
}

SmallMatrix SymMat::matrix() const {
  SmallMatrix m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double SymMat::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMat::det() const { return determinant(matrix()); }

SmallVector SymMat::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<SmallMatrix> solver(matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double SymMat::min_eigenvalue() const { return eigenvalues()(0); }

double SymMat::norm2() const {
  const SmallVector ev = eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(dim_ - 1)));
}

double SymMat::frobenius() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(s);
}

SymMat& SymMat::operator+=(const SymMat& o) {
  require(dim_ == o.dim_, ErrorKind::InvalidArgument, "dimension mismatch");
  for (int k = 0; k < packed_size(dim_); ++k) data_[k] += o.data_[k];
  return *this;
}

SymMat& SymMat::operator-=(const SymMat& o) {
  require(dim_ == o.dim_, ErrorKind::InvalidArgument, "dimension mismatch");
  for (int k = 0; k < packed_size(dim_); ++k) data_[k] -= o.data_[k];
  return *this;
}

SymMat& SymMat::operator*=(double s) {
  for (int k = 0; k < packed_size(dim_); ++k) data_[k] *= s;
  return *this;
}

bool operator==(const SymMat& a, const SymMat& b) {
  if (a.dim_ != b.dim_) return false;
  return std::equal(a.data_.begin(), a.data_.begin() + packed_size(a.dim_), b.data_.begin());
}

double determinant(const SmallMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 1.0;
  std::array<long double, kMaxDim * kMaxDim> a{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i * n + j] = m(i, j);
  long double det = 1.0L;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(a[i * n + k]) > std::fabs(a[piv * n + k])) piv = i;
    if (a[piv * n + k] == 0.0L) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      det = -det;
    }
    det *= a[k * n + k];
    for (int i = k + 1; i < n; ++i) {
      const long double f = a[i * n + k] / a[k * n + k];
      for (int j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return static_cast<double>(det);
}

SymMat cofactor(const SymMat& a) {
  const int d = a.dim();
  SymMat c(d);
  if (d == 1) {
    c(0, 0) = 1.0;
    return c;
  }
  const SmallMatrix m = a.matrix();
  SmallMatrix minor(d - 1, d - 1);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      // entry (i, j) of the adjugate is the (j, i) cofactor
      for (int r = 0, rr = 0; r < d; ++r) {
        if (r == j) continue;
        for (int s = 0, ss = 0; s < d; ++s) {
          if (s == i) continue;
          minor(rr, ss++) = m(r, s);
        }
        ++rr;
      }
      c(i, j) = ((i + j) % 2 == 0 ? 1.0 : -1.0) * determinant(minor);
    }
  }
  return c;
}

bool psd_check(const SymMat& a, double tol) {
  const SmallVector ev = a.eigenvalues();
  const double norm = std::max(std::abs(ev(0)), std::abs(ev(a.dim() - 1)));
  return ev(0) >= -tol * (1.0 + norm);
}

double det_power(const SymMat& a, double alpha, double tol) {
  if (!psd_check(a, tol)) fail(ErrorKind::NotPSD, "matrix has eigenvalue " + std::to_string(a.min_eigenvalue()));
  const double det = std::max(a.det(), 0.0);
  if (det == 0.0) return alpha == 0.0 ? 1.0 : 0.0;
  return std::exp(alpha * std::log(det));
}

SymMat congruence(const SymMat& a, const SmallMatrix& p) {
  require(p.rows() == a.dim() && p.cols() == a.dim(), ErrorKind::InvalidArgument, "transform size mismatch");
  const SmallMatrix m = p * a.matrix() * p.transpose();
  return SymMat::from_matrix(m);
}

}  // namespace dpt
