#pragma once

#include <complex>
#include <span>
#include <vector>

namespace dpt {

// Fourier operators on a periodic grid over [0,1)^d, coordinates in cell units of the
// unit cube. Every operator discards Nyquist modes so that derivatives commute exactly
// and map real fields to real fields.
class Spectral {
 public:
  using Spectrum = std::vector<std::complex<double>>;

  explicit Spectral(std::vector<int> shape);

  const std::vector<int>& shape() const { return shape_; }
  std::size_t size() const { return size_; }

  Spectrum forward(std::span<const double> f) const;
  std::vector<double> backward(Spectrum s) const;

  // Calls visit(k, m, nyquist) for every mode, with k the flat index and m the signed wavenumbers.
  template <class Visit>
  void for_each_mode(Visit&& visit) const {
    const int d = static_cast<int>(shape_.size());
    std::vector<int> idx(d, 0), m(d, 0);
    for (std::size_t k = 0; k < size_; ++k) {
      std::size_t rem = k;
      bool nyq = false;
      for (int a = d - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(rem % shape_[a]);
        rem /= shape_[a];
        m[a] = idx[a] <= shape_[a] / 2 ? idx[a] : idx[a] - shape_[a];
        if (shape_[a] % 2 == 0 && idx[a] == shape_[a] / 2) nyq = true;
      }
      visit(k, std::span<const int>(m), nyq);
    }
  }

  // Multiplies by symbol(m) in Fourier space; Nyquist modes are set to zero.
  template <class Symbol>
  std::vector<double> apply(std::span<const double> f, Symbol&& symbol) const {
    Spectrum s = forward(f);
    for_each_mode([&](std::size_t k, std::span<const int> m, bool nyq) { s[k] = nyq ? 0.0 : s[k] * symbol(m); });
    return backward(std::move(s));
  }

  std::vector<double> derivative(std::span<const double> f, int axis) const;
  std::vector<double> second_derivative(std::span<const double> f, int a, int b) const;

 private:
  std::vector<int> shape_;
  std::size_t size_ = 1;
};

}  // namespace dpt
