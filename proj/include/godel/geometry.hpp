#pragma once

#include <array>

#include <Eigen/Dense>

#include "godel/profiles.hpp"

namespace godel {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Coordinates (t, r, phi, z) = (x1, x2, x3, x4).
struct SpacetimePoint {
  double t = 0.0, r = 1.0, phi = 0.0, z = 0.0;

  Vec4 coords() const { return {t, r, phi, z}; }
  static SpacetimePoint from(const Vec4& x) { return {x[0], x[1], x[2], x[3]}; }
};

/// Frame metric diag(1,-1,-1,-1).
const Mat4& minkowski();

Mat4 metric_from_sample(const ProfileSample& s);
Mat4 metric_at(const ProfilePair& p, const SpacetimePoint& x);

/// Pseudo-orthonormal frame; column i holds the coordinate components of E_{i+1}.
struct Frame {
  Mat4 columns;
  Vec4 E(int i) const { return columns.col(i); }
};

Frame frame_from_sample(const ProfileSample& s);
Frame frame_at(const ProfilePair& p, const SpacetimePoint& x);

/// Coordinate components -> frame components, using the analytic inverse of the
/// (block triangular) frame matrix.
Vec4 to_frame(const ProfileSample& s, const Vec4& coord);
Vec4 to_coords(const ProfileSample& s, const Vec4& frame);

/// nabla[i][j] = frame components of nabla_{E_i} E_j (zero-based indices).
struct ConnectionTable {
  std::array<std::array<Vec4, 4>, 4> nabla{};
};

ConnectionTable connection_from_sample(const ProfileSample& s);
ConnectionTable frame_connection(const ProfilePair& p, double r);

/// gamma[k](i, j) = Gamma^k_{ij}, symmetric in (i, j).
struct ChristoffelSet {
  std::array<Mat4, 4> gamma{};

  /// Coordinate components of nabla_X Y for constant-component Y.
  Vec4 contract(const Vec4& X, const Vec4& Y) const {
    Vec4 out;
    for (int k = 0; k < 4; ++k) out[k] = X.dot(gamma[k] * Y);
    return out;
  }
};

/// Christoffel symbols assembled from g and its coordinate derivatives dg[k] = d g / d x^k.
ChristoffelSet christoffel_from_derivatives(const Mat4& g, const std::array<Mat4, 4>& dg);
/// Closed form in terms of H, H', D, D'.
ChristoffelSet christoffel_from_sample(const ProfileSample& s);
/// Oracle: central differences of metric_at in every coordinate direction.
ChristoffelSet numeric_christoffel(const ProfilePair& p, const SpacetimePoint& x);

/// curvature[i][j][k] = frame components of R(E_i, E_j) E_k with
/// R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
struct CurvatureTable {
  std::array<std::array<std::array<Vec4, 4>, 4>, 4> R{};

  /// Frame components of R(X, Y) Z for frame-component inputs.
  Vec4 apply(const Vec4& X, const Vec4& Y, const Vec4& Z) const;
  /// g(R(X, Y) Z, W) for frame-component inputs.
  double lowered(const Vec4& X, const Vec4& Y, const Vec4& Z, const Vec4& W) const;
};

CurvatureTable curvature_from_sample(const ProfileSample& s);
CurvatureTable frame_curvature(const ProfilePair& p, double r);

/// Independent algebraic route: composes the closed-form connection table
/// (with radial derivatives of its coefficients) into R.
CurvatureTable curvature_by_composition(const ProfileSample& s);

/// riemann[k][l](i, j) = R^k_{l i j}, i.e. R(d_i, d_j) d_l = R^k_{lij} d_k.
struct CoordinateRiemann {
  std::array<std::array<Mat4, 4>, 4> riemann{};
};

/// Oracle: Christoffels and their derivatives from first and second central
/// differences of the metric.
CoordinateRiemann numeric_riemann(const ProfilePair& p, const SpacetimePoint& x);
CurvatureTable to_frame_curvature(const ProfileSample& s, const CoordinateRiemann& R);

/// Which vector field the Koszul oracle differentiates.
struct FieldSpec {
  enum class Basis { Frame, Coordinate };
  Basis basis = Basis::Frame;
  int index = 0;  ///< zero-based
};

/// nabla_X Y at x (coordinate components) from numerically differenced
/// Christoffel symbols and numerically differenced components of Y.
Vec4 koszul_oracle(const ProfilePair& p, const SpacetimePoint& x, const Vec4& X, FieldSpec Y);

/// Frame components of [E_i, E_j] by differencing the frame fields.
Vec4 numeric_bracket(const ProfilePair& p, const SpacetimePoint& x, int i, int j);
/// Frame components of the closed-form bracket (only [E2,E3] survives).
Vec4 closed_form_bracket(const ProfileSample& s, int i, int j);
/// Max norm of numeric minus closed-form brackets over all frame pairs.
double bracket_residual(const ProfilePair& p, double r);

/// Residual of nabla_{E_i}E_j - nabla_{E_j}E_i - [E_i, E_j] over all pairs.
double torsion_residual(const ConnectionTable& c, const ProfileSample& s);
/// Residual of g(nabla_k E_i, E_j) + g(E_i, nabla_k E_j) (frame metric is constant).
double metric_compatibility_residual(const ConnectionTable& c);
/// Cyclic sum R(X,Y)Z + R(Y,Z)X + R(Z,X)Y over frame triples.
double bianchi_residual(const CurvatureTable& R);

double max_abs_difference(const ConnectionTable& a, const ConnectionTable& b);
double max_abs_difference(const CurvatureTable& a, const CurvatureTable& b);

}  // namespace godel
