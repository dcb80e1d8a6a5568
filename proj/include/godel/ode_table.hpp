#pragma once

#include <functional>
#include <span>
#include <vector>

namespace godel {

/// Chebyshev series on [a, b], evaluated by Clenshaw recurrence.
class ChebyshevSeries {
 public:
  ChebyshevSeries() = default;
  /// Interpolates f at the degree+1 Chebyshev points of the first kind.
  static ChebyshevSeries fit(const std::function<double(double)>& f, double a, double b, int degree);
  static ChebyshevSeries from_nodes(std::span<const double> values, double a, double b);
  /// Chebyshev points of the first kind mapped to [a, b], in increasing order.
  static std::vector<double> nodes(double a, double b, int degree);

  double operator()(double x) const;
  ChebyshevSeries derivative() const;

  double lo() const { return a_; }
  double hi() const { return b_; }
  const std::vector<double>& coefficients() const { return c_; }
  /// Magnitude of the trailing coefficients, a cheap truncation estimate.
  double tail() const;

 private:
  double a_ = -1.0, b_ = 1.0;
  std::vector<double> c_;
};

/// Solution of y' = f(x, y), y(x0) = y0, tabulated on [a, b].
///
/// Integrated with classical fixed-step RK4 (step at most max_step) out to
/// every Chebyshev node, then represented per component by a Chebyshev series,
/// so nested finite differences of the result stay smooth.
class OdeTable {
 public:
  using System = std::function<void(double x, std::span<const double> y, std::span<double> dy)>;

  struct Options {
    int degree = 64;
    double max_step = 5e-4;
  };

  static OdeTable integrate(const System& f, double x0, std::vector<double> y0, double a, double b, Options opt);
  static OdeTable integrate(const System& f, double x0, std::vector<double> y0, double a, double b) {
    return integrate(f, x0, std::move(y0), a, b, Options{});
  }
  /// Antiderivative of g vanishing at x0.
  static OdeTable quadrature(const std::function<double(double)>& g, double x0, double a, double b);

  std::size_t dimension() const { return series_.size(); }
  double lo() const { return a_; }
  double hi() const { return b_; }
  /// Throws DomainError outside [a, b].
  double operator()(std::size_t component, double x) const;
  const ChebyshevSeries& series(std::size_t component) const { return series_.at(component); }

 private:
  double a_ = 0.0, b_ = 0.0;
  std::vector<ChebyshevSeries> series_;
};

}  // namespace godel
