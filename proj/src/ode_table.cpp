#include "godel/ode_table.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "godel/errors.hpp"

namespace godel {

std::vector<double> ChebyshevSeries::nodes(double a, double b, int degree) {
  const int n = degree + 1;
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) {
    // k-th node counted from the left end
    const double t = -std::cos(std::numbers::pi * (k + 0.5) / n);
    x[k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  return x;
}

ChebyshevSeries ChebyshevSeries::from_nodes(std::span<const double> values, double a, double b) {
  const int n = static_cast<int>(values.size());
  if (n < 1 || !(a < b)) throw ParameterError("Chebyshev fit needs a nonempty interval and at least one node");
  ChebyshevSeries s;
  s.a_ = a;
  s.b_ = b;
  s.c_.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      // node k sits at angle pi (n - k - 0.5)/n because nodes are stored left to right
      const double angle = std::numbers::pi * (n - k - 0.5) / n;
      acc += values[k] * std::cos(j * angle);
    }
    s.c_[j] = (j == 0 ? 1.0 : 2.0) * acc / n;
  }
  return s;
}

ChebyshevSeries ChebyshevSeries::fit(const std::function<double(double)>& f, double a, double b, int degree) {
  const auto x = nodes(a, b, degree);
  std::vector<double> v(x.size());
  std::transform(x.begin(), x.end(), v.begin(), f);
  return from_nodes(v, a, b);
}

double ChebyshevSeries::operator()(double x) const {
  const double t = (2.0 * x - a_ - b_) / (b_ - a_);
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = c_.size(); j-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + c_[j];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + (c_.empty() ? 0.0 : c_[0]);
}

ChebyshevSeries ChebyshevSeries::derivative() const {
  ChebyshevSeries d;
  d.a_ = a_;
  d.b_ = b_;
  const std::size_t n = c_.size();
  if (n <= 1) {
    d.c_ = {0.0};
    return d;
  }
  // c'_{j-1} = c'_{j+1} + 2 j c_j, with two trailing zeros as padding
  std::vector<double> e(n + 1, 0.0);
  for (std::size_t j = n - 1; j >= 1; --j) e[j - 1] = e[j + 1] + 2.0 * static_cast<double>(j) * c_[j];
  d.c_.assign(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n - 1));
  d.c_[0] *= 0.5;
  const double scale = 2.0 / (b_ - a_);
  for (auto& c : d.c_) c *= scale;
  return d;
}

double ChebyshevSeries::tail() const {
  double t = 0.0;
  const std::size_t n = c_.size();
  for (std::size_t j = n > 3 ? n - 3 : 0; j < n; ++j) t = std::max(t, std::abs(c_[j]));
  return t;
}

namespace {

void rk4_step(const OdeTable::System& f, double x, double h, std::vector<double>& y, std::vector<double>& k1,
              std::vector<double>& k2, std::vector<double>& k3, std::vector<double>& k4, std::vector<double>& tmp) {
  const std::size_t n = y.size();
  f(x, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  f(x + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  f(x + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  f(x + h, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace

OdeTable OdeTable::integrate(const System& f, double x0, std::vector<double> y0, double a, double b, Options opt) {
  if (!(a < b) || !(x0 >= a && x0 <= b)) throw ParameterError("ODE table needs a <= x0 <= b with a < b");
  if (opt.degree < 1 || !(opt.max_step > 0.0)) throw ParameterError("invalid ODE table options");
  const std::size_t dim = y0.size();
  const auto x = ChebyshevSeries::nodes(a, b, opt.degree);
  const std::size_t n = x.size();
  std::vector<std::vector<double>> values(dim, std::vector<double>(n));
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

  // march outward from x0 in both directions so every node is reached once
  auto sweep = [&](int first, int last, int dir) {
    std::vector<double> y = y0;
    double at = x0;
    for (int k = first; k != last; k += dir) {
      const double span = x[k] - at;
      const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / opt.max_step)));
      const double h = span / steps;
      for (int s = 0; s < steps; ++s) {
        rk4_step(f, at + s * h, h, y, k1, k2, k3, k4, tmp);
        for (double v : y)
          if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "ODE solution blew up near x = " << at + (s + 1) * h;
            throw ParameterError(os.str());
          }
      }
      at = x[k];
      for (std::size_t i = 0; i < dim; ++i) values[i][k] = y[i];
    }
  };
  const int split = static_cast<int>(std::lower_bound(x.begin(), x.end(), x0) - x.begin());
  sweep(split, static_cast<int>(n), +1);
  sweep(split - 1, -1, -1);

  OdeTable t;
  t.a_ = a;
  t.b_ = b;
  for (std::size_t i = 0; i < dim; ++i) t.series_.push_back(ChebyshevSeries::from_nodes(values[i], a, b));
  return t;
}

OdeTable OdeTable::quadrature(const std::function<double(double)>& g, double x0, double a, double b) {
  return integrate([&g](double x, std::span<const double>, std::span<double> dy) { dy[0] = g(x); }, x0, {0.0}, a, b);
}

double OdeTable::operator()(std::size_t component, double x) const {
  if (!(x >= a_ && x <= b_)) {
    std::ostringstream os;
    os << "x = " << x << " outside tabulated range [" << a_ << ", " << b_ << "]";
    throw DomainError(os.str());
  }
  return series_.at(component)(x);
}

}  // namespace godel
