#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "godel/hypersurfaces.hpp"

namespace godel {

/// Radial window the families are built over.
struct Window {
  double r_lo = 0.8;
  double r_hi = 1.6;
  double mid() const { return 0.5 * (r_lo + r_hi); }
};

/// How a family chooses the angle of its normal.
struct ThetaLaw {
  enum class Kind { Constant, Linear, ArccosRhoOverD, QuarterLog, HalfLogLambda, Ode };
  Kind kind = Kind::Constant;
  double k1 = 0.0, k2 = 0.0;  // Linear: k1 u + k2; Constant: k2
  double rho = 0.0;           // ArccosRhoOverD
  double lambda = 0.0;        // HalfLogLambda and Ode
  int branch = 1;             // HalfLogLambda: sign in front of the square root
  double theta0 = 0.0;        // Ode: initial value

  static ThetaLaw constant(double k2) { return {Kind::Constant, 0.0, k2}; }
  static ThetaLaw linear(double k1, double k2) { return {Kind::Linear, k1, k2}; }
  static ThetaLaw arccos_rho_over_d(double rho) { return {Kind::ArccosRhoOverD, 0, 0, rho}; }
  static ThetaLaw quarter_log() { return {Kind::QuarterLog}; }
  static ThetaLaw half_log_lambda(double lambda, int branch) { return {Kind::HalfLogLambda, 0, 0, 0, lambda, branch}; }
  static ThetaLaw ode(double lambda, double theta0) { return {Kind::Ode, 0, 0, 0, lambda, 1, theta0}; }

  /// Laws in the surface parameter (Constant, Linear).
  double along(double u) const;
  /// Laws in the ambient radius; throws ParameterError where the law is undefined.
  double radial(const ProfileSample& s) const;
};

/// What the family is expected to satisfy; unset entries are not checked.
struct Expected {
  std::optional<bool> totally_geodesic, parallel, codazzi, flat, minimal, cmc;
  CausalCharacter causal = CausalCharacter::Unknown;
  /// Parallel families must have max|h| above this somewhere.
  bool proper = false;
};

/// Closed-form frame description of a family at one surface point.
struct FrameExpectation {
  std::array<Vec4, 3> Y;  ///< tangent frame, frame components
  Vec4 xi;                ///< normal used by the closed-form table
  Mat3 h;                 ///< expected h(Y_a, Y_b)
  /// Coordinate claim d/du_i = scale_i Y_i, checked when the formula asserts it.
  std::array<double, 3> scale{1.0, 1.0, 1.0};
};

struct CatalogEntry {
  std::string id;
  std::string variant;    ///< "derivation", "theorem", "reparametrized" or empty
  std::string reference;  ///< quoted anchor of the source statement
  std::map<std::string, double> params;
  std::optional<Immersion> immersion;  ///< absent for distribution-level rejections
  Expected expected;
  std::function<FrameExpectation(const Vec3& u, const Vec4& x)> table;
  bool asserts_coordinates = false;
  /// Distribution-level entries: antisymmetric part of the would-be h.
  std::optional<double> rejection_asymmetry;
  std::string note;
};

struct Certificate {
  std::string id, variant;
  Verdict verdict;
  double table_residual = 0.0;       ///< max |h - expected| in the table frame
  double coordinate_residual = 0.0;  ///< max |d/du_i - scale_i Y_i| in frame components
  double tangency = 0.0;
  std::map<std::string, bool> checks;  ///< one flag per expectation
  bool passed = false;
  std::string error;  ///< engine error that prevented certification
};

struct BuildOptions {
  /// Skip the applicability predicate (used to demonstrate failures off-hypothesis).
  bool force = false;
  /// Half-width of the u-box in the directions that do not move r.
  double half_width = 0.5;
};

// Families valid for every profile.
CatalogEntry tg_a(const ProfilePair& p, Window w);
CatalogEntry par_1(const ProfilePair& p, double c);

// Type III families (need f2 = 0).
CatalogEntry tg_b(const ProfilePair& p, double rho, Window w, BuildOptions opt = {});
CatalogEntry par_2(const ProfilePair& p, double lambda, double theta0, Window w, BuildOptions opt = {});
/// Codazzi type III hypersurface for the explicit law theta = theta0 + kappa u2 + 0.2 sin u2.
CatalogEntry cod_iii(const ProfilePair& p, double theta0, double kappa, Window w, BuildOptions opt = {});
/// Constant-angle special case; builds its own (exponential) profile.
struct ExampleFamily {
  ProfilePair profile;
  CatalogEntry entry;
};
ExampleFamily par_2_example(double omega, double rho, double lambda, double theta, double k, Window w);

/// The stated algebraic constraint of the general type III family, evaluated on a built entry:
/// D^2 (G1' + G2')^2 - (H - 1)^2 (1 - G3'^2) at the box center.
double type_iii_constraint_residual(const ProfilePair& p, const CatalogEntry& e);

// Type IV families; eps is g(xi, xi).
CatalogEntry tg_c(const ProfilePair& p, int eps, const std::string& variant, Window w, BuildOptions opt = {});
CatalogEntry par_3(const ProfilePair& p, double lambda, double k, int branch, int eps, const std::string& variant,
                   Window w, BuildOptions opt = {});
/// lambda for which the parallel type IV family can exist at r (A = 0 forces tanh theta = H'/D').
double par_3_lambda(const ProfilePair& p, double r);

// Type V families (need H constant).
CatalogEntry tg_d(const ProfilePair& p, double theta, int eps, const std::string& variant, Window w,
                  BuildOptions opt = {});
CatalogEntry par_4(const ProfilePair& p, double k1, double k2, int eps, const std::string& variant, Window w,
                   BuildOptions opt = {});

/// Limiting case m = 2 omega: xi = E1 (rejected, distribution only) and xi = E2 (radial slice).
std::vector<CatalogEntry> codazzi_vi(const ProfilePair& p, Window w);

struct Enumeration {
  std::vector<CatalogEntry> entries;
  std::vector<std::string> diagnostics;
};

/// Every family whose hypotheses hold on the window.
Enumeration catalog_enumerate(const ProfilePair& p, Window w, BuildOptions opt = {});

/// Certifies a built entry on an n x n x n grid of its box.
Certificate certify(const ProfilePair& p, const CatalogEntry& e, const Tolerances& tol, int n = 5, int jobs = 1);

struct Adjudication {
  std::string conflict;
  std::vector<Certificate> variants;
  std::vector<std::string> passing;
  bool resolved = false;  ///< exactly one variant passed
};

/// Runs the competing transcriptions for the three documented conflicts on p.
/// Conflicts whose families do not apply to p are skipped.
std::vector<Adjudication> adjudicate(const ProfilePair& p, Window w, const Tolerances& tol, int n = 5);

/// Upgrades custom profiles to exact derivatives so nested differences stay clean.
ProfilePair for_certification(const ProfilePair& p);

}  // namespace godel
