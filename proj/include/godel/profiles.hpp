#pragma once

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "godel/expression.hpp"

namespace godel {

/// Homogeneity class of a profile pair; `Custom` covers arbitrary (H, D).
enum class ProfileClass { I, II, III, IV, Custom };

const char* to_string(ProfileClass c);

struct DerivativeMode {
  /// Automatic: exact derivatives of custom expressions by forward-mode jets.
  enum class Kind { ClosedForm, CentralDifference, Automatic };
  Kind kind = Kind::ClosedForm;
  double step = 0.0;  ///< 0 selects the default step (cube root of epsilon, scaled by max(1,|r|))

  static DerivativeMode closed_form() { return {}; }
  static DerivativeMode central_difference(double step = 0.0) { return {Kind::CentralDifference, step}; }
  static DerivativeMode automatic() { return {Kind::Automatic, 0.0}; }
};

/// Radial working interval; evaluation also requires |D(r)| >= margin.
struct WorkingDomain {
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
  double margin = 1e-6;
};

/// Values of H, D and their radial derivatives at one radius.
struct ProfileSample {
  double r = 0.0;
  double H = 0.0, Hp = 0.0, Hpp = 0.0;
  double D = 1.0, Dp = 0.0, Dpp = 0.0;

  /// H'/(2D), the coefficient that appears throughout the connection table.
  double rotation() const { return Hp / (2.0 * D); }
  /// d/dr of H'/(2D).
  double rotation_derivative() const { return (Hpp * D - Hp * Dp) / (2.0 * D * D); }
};

struct InvariantTriple {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
};

/// The pair (H, D) parametrizing a Goedel-type metric. Immutable.
class ProfilePair {
 public:
  static ProfilePair class_i(double m, double omega);
  static ProfilePair class_ii(double omega);
  static ProfilePair class_iii(double mu, double omega);
  /// H = 0 and D = sinh(m r)/m (alpha = m^2 > 0) or sin(mu r)/mu (alpha = -mu^2 < 0).
  static ProfilePair class_iv(double alpha);
  static ProfilePair custom(Expression H, Expression D, DerivativeMode mode = DerivativeMode::central_difference());

  /// Parses `class1(m=..,omega=..)`, `class2(omega=..)`, `class3(mu=..,omega=..)`,
  /// `class4(alpha=..)` or `custom(H="..",D="..")`.
  static ProfilePair parse(std::string_view spec);

  ProfilePair with_domain(WorkingDomain domain) const;
  ProfilePair with_mode(DerivativeMode mode) const;

  ProfileClass kind() const { return kind_; }
  bool is_homogeneous() const { return kind_ != ProfileClass::Custom; }
  /// alpha and omega of a homogeneous pair (NaN for custom pairs).
  double alpha() const;
  double omega() const { return omega_; }
  const std::map<std::string, double>& parameters() const { return params_; }
  const WorkingDomain& domain() const { return domain_; }
  const DerivativeMode& mode() const { return mode_; }

  /// Canonical specification string, accepted back by parse().
  std::string spec() const;

  /// Throws DomainError outside the working domain or where |D| < margin.
  ProfileSample sample(double r) const;

  double H(double r) const;
  double D(double r) const;

 private:
  ProfilePair() = default;
  ProfileSample closed_form(double r) const;
  ProfileSample differenced(double r) const;
  ProfileSample jets(double r) const;

  ProfileClass kind_ = ProfileClass::Custom;
  double scale_ = 1.0;  // m or mu
  double omega_ = 0.0;
  double alpha_ = 0.0;
  Expression h_expr_, d_expr_;
  std::map<std::string, double> params_;
  WorkingDomain domain_;
  DerivativeMode mode_;
};

/// Builds a homogeneous pair from a class tag and named parameters
/// (m/omega, omega, mu/omega, alpha).
ProfilePair make_homogeneous(ProfileClass kind, const std::map<std::string, double>& params);

InvariantTriple invariants(const ProfileSample& s);
InvariantTriple invariants(const ProfilePair& p, double r);

struct HomogeneousFit {
  double alpha = 0.0;
  double omega = 0.0;
  /// I..IV, or Custom when alpha = omega = 0 (the excluded flat case).
  ProfileClass cls = ProfileClass::Custom;
  double alpha_residual = 0.0;
  double omega_residual = 0.0;
};

/// Least-squares fit of D'' = alpha D and H' = -2 omega D over the grid;
/// empty when either residual exceeds tol.
std::optional<HomogeneousFit> detect_homogeneous(const ProfilePair& p, std::span<const double> grid, double tol);

struct RegimeFlags {
  bool f2_zero = false;
  bool f1_zero = false;
  bool f1_plus_f3_zero = false;
  /// |(H'/D)'| < |(H'/D)^2 - D''/D| at every grid point.
  bool tanh_condition = false;
  /// (D')^2 > (H')^2 at every grid point.
  bool dprime_dominates = false;
};

RegimeFlags regime_flags(const ProfilePair& p, std::span<const double> grid, double tol);

/// True when f1 = f2 = f3 = 0 on the grid (flat Minkowski case, excluded).
bool is_trivial(const ProfilePair& p, std::span<const double> grid, double tol);

std::vector<double> linspace(double a, double b, int n);

}  // namespace godel
