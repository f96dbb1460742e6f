#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dpt {

// Deterministic pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

// Shortest round-trip hexadecimal float, e.g. "0x1.8p+1".
std::string to_hexfloat(double value);
double parse_hexfloat(const std::string& text);

struct QuadratureRule {
  std::vector<double> nodes;  // on [0, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with `order` points mapped to [0, 1].
QuadratureRule gauss_legendre(int order);

// Minimizes a unimodal function of log(x) on [lo, hi] by golden-section search.
double minimize_log_scale(const std::function<double(double)>& f, double lo, double hi, int iterations = 200);

// Fourth-order first derivative on a uniform line of samples. Interior points use the
// centered stencil; the two points nearest each open end use one-sided stencils.
void fd4_derivative(std::span<const double> f, double h, bool periodic, std::span<double> out);

}  // namespace dpt
