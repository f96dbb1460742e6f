#include "dpt/numerics.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include <boost/math/quadrature/gauss.hpp>

#include "dpt/errors.hpp"

namespace dpt {

namespace {

double pairwise_range(const double* p, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += p[k];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_range(p, h) + pairwise_range(p + h, n - h);
}

template <int N>
QuadratureRule make_rule() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  QuadratureRule r;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  for (std::size_t k = x.size(); k-- > 0;) {
    if (x[k] == 0.0) continue;
    r.nodes.push_back(0.5 * (1.0 - x[k]));
    r.weights.push_back(0.5 * w[k]);
  }
  if (x[0] == 0.0) {
    r.nodes.push_back(0.5);
    r.weights.push_back(0.5 * w[0]);
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == 0.0) continue;
    r.nodes.push_back(0.5 * (1.0 + x[k]));
    r.weights.push_back(0.5 * w[k]);
  }
  return r;
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise_range(values.data(), values.size()); }

std::string to_hexfloat(double value) {
  require(std::isfinite(value), ErrorKind::InvalidArgument, "cannot encode non-finite value");
  char buf[64];
  const bool neg = std::signbit(value);
  const auto res = std::to_chars(buf, buf + sizeof buf, std::abs(value), std::chars_format::hex);
  return std::string(neg ? "-0x" : "0x") + std::string(buf, res.ptr);
}

double parse_hexfloat(const std::string& text) {
  std::string_view s = text;
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.size() < 2 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X'))
    fail(ErrorKind::ParseError, "expected hexadecimal float, got '" + text + "'");
  s.remove_prefix(2);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(ErrorKind::ParseError, "malformed hexadecimal float '" + text + "'");
  return neg ? -v : v;
}

QuadratureRule gauss_legendre(int order) {
  switch (order) {
    case 2: return make_rule<2>();
    case 4: return make_rule<4>();
    case 8: return make_rule<8>();
    case 16: return make_rule<16>();
    case 32: return make_rule<32>();
    default: fail(ErrorKind::InvalidArgument, "unsupported Gauss-Legendre order " + std::to_string(order));
  }
}

double minimize_log_scale(const std::function<double(double)>& f, double lo, double hi, int iterations) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(lo), b = std::log(hi);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(std::exp(c)), fd = f(std::exp(d));
  for (int k = 0; k < iterations && b - a > 1e-12; ++k) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(std::exp(d));
    }
  }
  return std::exp(0.5 * (a + b));
}

void fd4_derivative(std::span<const double> f, double h, bool periodic, std::span<double> out) {
  const int n = static_cast<int>(f.size());
  const double s = 1.0 / (12.0 * h);
  if (periodic) {
    for (int i = 0; i < n; ++i) {
      const auto at = [&](int k) { return f[((i + k) % n + n) % n]; };
      out[i] = s * (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2));
    }
    return;
  }
  if (n < 5) {
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (int i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return;
  }
  out[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
  out[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
  for (int i = 2; i < n - 2; ++i) out[i] = s * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
  out[n - 2] = -s * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]);
  out[n - 1] = -s * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]);
}

}  // namespace dpt
