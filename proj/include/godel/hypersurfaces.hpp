#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "godel/geometry.hpp"

namespace godel {

/// Columns are the coordinate components of dF/du_i.
using Tangents = Eigen::Matrix<double, 4, 3>;

struct UBox {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();

  Vec3 center() const { return 0.5 * (lo + hi); }
  /// n points per axis, row-major in (u1, u2, u3); n = 1 gives the center.
  std::vector<Vec3> grid(int n) const;
};

/// Causal character of the hypersurface itself: timelike iff the normal is spacelike.
enum class CausalCharacter { Timelike, Spacelike, Unknown };

const char* to_string(CausalCharacter c);
CausalCharacter causal_from_eps(int eps);

/// F: (u1, u2, u3) -> (t, r, phi, z) on a working box.
struct Immersion {
  std::function<Vec4(const Vec3&)> map;
  UBox box;
  /// Optional closed-form Jacobian, compared against differencing in tests.
  std::function<Tangents(const Vec3&)> jacobian;
  CausalCharacter expected = CausalCharacter::Unknown;

  Vec4 operator()(const Vec3& u) const { return map(u); }
};

struct Tolerances {
  double closed_form = 1e-10;
  double first_derivative = 1e-8;
  double h = 1e-6;
  double nabla_h = 1e-5;
  /// Classification thresholds are this multiple of the corresponding check.
  double classification_factor = 10.0;

  Tolerances scaled(double s) const;
  /// Defaults multiplied by GODEL_GEO_TOL_SCALE when that variable is set.
  static Tolerances from_environment();
};

/// Base steps of the immersion stencils (scaled per axis by max(1, |u_i|)).
struct StepSizes {
  double first = 7.4e-4;   // ~eps^(1/5): fourth-order first differences of F
  double second = 2.5e-3;  // ~eps^(1/6): fourth-order second differences of F
  double outer = 5.8e-3;   // ~eps^(1/7): differences of h and of the induced metric
};

struct NormalData {
  Vec4 xi;         ///< frame components, sign fixed so the first nonzero one is positive
  Vec4 xi_coords;  ///< coordinate components
  int eps = -1;    ///< g(xi, xi)

  /// (a, b, c, d) with xi = aE1 + bE2 + cE3 + dE4.
  const Vec4& frame_coeffs() const { return xi; }
};

/// riemann[l][k](i, j) = R^l_{kij} of the induced metric in u-coordinates.
using InducedRiemann = std::array<std::array<Mat3, 3>, 3>;

struct FundamentalForms {
  Vec4 point;
  Tangents tangents;
  NormalData normal;
  Mat3 induced;
  Mat3 h;
  double h_asymmetry = 0.0;
  double mean_curvature = 0.0;  ///< trace of h with respect to the induced metric
  /// +1 or -1 taking the reported normal to the cross-product normal, which is continuous in u.
  int orientation = 1;
  /// nabla_h[k](i, j) = (nabla_k h)(d_i, d_j); filled by forms() only.
  std::array<Mat3, 3> nabla_h{};
  InducedRiemann riemann{};
};

struct IdentityResiduals {
  double gauss = 0.0;
  double codazzi = 0.0;
};

/// Frame-basis view of h along a caller-supplied tangent frame.
struct FrameForm {
  Mat3 h;
  /// Largest distance of a supplied vector from the tangent space.
  double tangency = 0.0;
};

class HypersurfaceEngine {
 public:
  HypersurfaceEngine(ProfilePair profile, Immersion F, StepSizes steps = {});

  const ProfilePair& profile() const { return profile_; }
  const Immersion& immersion() const { return F_; }

  /// Throws DegenerateError when the induced metric is (nearly) singular.
  Tangents tangent_frame(const Vec3& u) const;
  /// Throws NullNormalError when the orthogonal complement is null.
  NormalData unit_normal(const Vec3& u) const;
  /// Induced metric and h only.
  FundamentalForms second_fundamental_form(const Vec3& u) const;
  /// Everything, including nabla h and the induced curvature.
  FundamentalForms forms(const Vec3& u) const;

  IdentityResiduals gauss_codazzi(const FundamentalForms& f) const;
  /// max |(R^M(d_i, d_j) . h)(d_k, d_l)|.
  double semi_parallel_residual(const FundamentalForms& f) const;

  /// h(Y_a, Y_b) for frame-component vectors Y, reported for the normal
  /// reference_xi (the engine normal up to sign).
  FrameForm frame_form(const FundamentalForms& f, const std::array<Vec4, 3>& Y, const Vec4& reference_xi) const;

 private:
  struct Raw {
    Vec4 point;
    Tangents T;
    Mat3 G;
    Mat3 h;  // normal orientation from the cross product, not yet sign-normalized
    Vec4 xi_frame, xi_coords;
    int eps = -1;
    double asym = 0.0;
  };

  Vec3 steps_for(const Vec3& u, double base) const;
  Tangents differentiate(const Vec3& u) const;
  Mat3 induced_metric(const Vec3& u) const;
  Raw raw(const Vec3& u, bool with_h) const;

  ProfilePair profile_;
  Immersion F_;
  StepSizes steps_;
};

struct Verdict {
  bool totally_geodesic = false;
  bool parallel = false;
  bool codazzi = false;
  bool semi_parallel = false;
  bool minimal = false;
  bool cmc = false;
  bool flat = false;
  /// max_h, max_nabla_h, codazzi_asymmetry, semi_parallel, max_trace, trace_variation,
  /// max_riemann, gauss_identity, codazzi_identity, h_asymmetry
  std::map<std::string, double> residuals;
  /// Average of tr h over the grid, for the normal that is canonical at the first grid point
  /// and continued along the grid.
  double mean_curvature = 0.0;
  int eps = 0;                  ///< 0 if the sign of g(xi, xi) changed across the grid
  CausalCharacter causal = CausalCharacter::Unknown;
  /// True when a flag was raised only through the implication chain.
  bool chain_adjusted = false;
  Tolerances tolerances;
  std::size_t points = 0;
};

/// Residual-thresholded classification over grid points; jobs > 1 splits the grid over threads.
Verdict classify(const HypersurfaceEngine& engine, std::span<const Vec3> grid, const Tolerances& tol, int jobs = 1);

/// Smooth, seeded perturbation of the z = 0 slice on a box inside r in [0.8, 1.2];
/// generic enough that h, nabla h and the induced curvature are all nonzero.
Immersion random_smooth_immersion(std::uint64_t seed);

/// Contractions R(X_i, X_j) xi over all fifteen pairs of the tangent fields built from
/// xi = aE1 + bE2 + cE3 + dE4, evaluated with the closed-form curvature table; max norm.
double codazzi_normal_residual(const ProfilePair& p, double r, const Vec4& coeffs);

/// h_ab = eps g(nabla_{Y_a} Y_b, xi) for constant-coefficient frame fields, not symmetrized.
/// The antisymmetric part measures non-integrability of the distribution.
Mat3 distribution_second_form(const ProfileSample& s, const std::array<Vec4, 3>& Y, const Vec4& xi);

}  // namespace godel
