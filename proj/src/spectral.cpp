#include "dpt/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "dpt/errors.hpp"

namespace dpt {

namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Planning is not thread-safe in FFTW; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(const std::vector<int>& shape, std::size_t size) {
  static std::map<std::vector<int>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(shape);
  if (it != cache.end()) return it->second;
  FftwBuffer a(size), b(size);
  PlanPair p;
  const int rank = static_cast<int>(shape.size());
  p.forward = fftw_plan_dft(rank, shape.data(), a.data, b.data, FFTW_FORWARD, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft(rank, shape.data(), a.data, b.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  require(p.forward && p.backward, ErrorKind::InvalidArgument, "FFT planning failed");
  return cache.emplace(shape, p).first->second;
}

}  // namespace

Spectral::Spectral(std::vector<int> shape) : shape_(std::move(shape)) {
  for (int n : shape_) size_ *= static_cast<std::size_t>(n);
}

Spectral::Spectrum Spectral::forward(std::span<const double> f) const {
  require(f.size() == size_, ErrorKind::InvalidArgument, "sample count does not match spectral grid");
  const PlanPair& p = plans_for(shape_, size_);
  FftwBuffer in(size_), out(size_);
  for (std::size_t k = 0; k < size_; ++k) {
    in.data[k][0] = f[k];
    in.data[k][1] = 0.0;
  }
  fftw_execute_dft(p.forward, in.data, out.data);
  Spectrum s(size_);
  for (std::size_t k = 0; k < size_; ++k) s[k] = {out.data[k][0], out.data[k][1]};
  return s;
}

std::vector<double> Spectral::backward(Spectrum s) const {
  const PlanPair& p = plans_for(shape_, size_);
  FftwBuffer in(size_), out(size_);
  for (std::size_t k = 0; k < size_; ++k) {
    in.data[k][0] = s[k].real();
    in.data[k][1] = s[k].imag();
  }
  fftw_execute_dft(p.backward, in.data, out.data);
  std::vector<double> f(size_);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t k = 0; k < size_; ++k) f[k] = out.data[k][0] * scale;
  return f;
}

std::vector<double> Spectral::derivative(std::span<const double> f, int axis) const {
  const double tau = 2.0 * std::numbers::pi;
  return apply(f, [&](std::span<const int> m) { return std::complex<double>(0.0, tau * m[axis]); });
}

std::vector<double> Spectral::second_derivative(std::span<const double> f, int a, int b) const {
  const double tau2 = 4.0 * std::numbers::pi * std::numbers::pi;
  return apply(f, [&](std::span<const int> m) { return std::complex<double>(-tau2 * m[a] * m[b], 0.0); });
}

}  // namespace dpt
