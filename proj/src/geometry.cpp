#include "godel/geometry.hpp"

#include <cmath>
#include <limits>

#include "godel/errors.hpp"

namespace godel {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double first_step(double x) { return std::cbrt(kEps) * std::max(1.0, std::abs(x)); }
double second_step(double x) { return std::pow(kEps, 0.25) * std::max(1.0, std::abs(x)); }
// Five-point first differences; the larger step keeps 1/D fields accurate close to a zero of D.
double fourth_order_step(double x) { return 1e-4 * std::max(1.0, std::abs(x)); }

Vec4 unit(int i) {
  Vec4 v = Vec4::Zero();
  v[i] = 1.0;
  return v;
}

}  // namespace

const Mat4& minkowski() {
  static const Mat4 eta = Vec4(1.0, -1.0, -1.0, -1.0).asDiagonal();
  return eta;
}

Mat4 metric_from_sample(const ProfileSample& s) {
  Mat4 g = Mat4::Zero();
  g(0, 0) = 1.0;
  g(0, 2) = g(2, 0) = s.H;
  g(2, 2) = s.H * s.H - s.D * s.D;
  g(1, 1) = -1.0;
  g(3, 3) = -1.0;
  return g;
}

Mat4 metric_at(const ProfilePair& p, const SpacetimePoint& x) { return metric_from_sample(p.sample(x.r)); }

Frame frame_from_sample(const ProfileSample& s) {
  Frame f;
  f.columns = Mat4::Identity();
  f.columns(0, 2) = -s.H / s.D;
  f.columns(2, 2) = 1.0 / s.D;
  return f;
}

Frame frame_at(const ProfilePair& p, const SpacetimePoint& x) { return frame_from_sample(p.sample(x.r)); }

Vec4 to_frame(const ProfileSample& s, const Vec4& v) {
  return {v[0] + s.H * v[2], v[1], s.D * v[2], v[3]};
}

Vec4 to_coords(const ProfileSample& s, const Vec4& a) {
  return {a[0] - s.H / s.D * a[2], a[1], a[2] / s.D, a[3]};
}

// ---------------------------------------------------------------------------
// connection

namespace {

// Every entry of the table is linear in q = H'/2D and p = D'/D.
ConnectionTable connection_table(double q, double p) {
  ConnectionTable c;
  for (auto& row : c.nabla)
    for (auto& v : row) v.setZero();
  // row i: nabla_{E_i} E_j
  c.nabla[1][0] = Vec4(0, 0, -q, 0);
  c.nabla[2][0] = Vec4(0, q, 0, 0);
  c.nabla[0][1] = Vec4(0, 0, -q, 0);
  c.nabla[2][1] = Vec4(q, 0, p, 0);
  c.nabla[0][2] = Vec4(0, q, 0, 0);
  c.nabla[1][2] = Vec4(-q, 0, 0, 0);
  c.nabla[2][2] = Vec4(0, -p, 0, 0);
  return c;
}

}  // namespace

ConnectionTable connection_from_sample(const ProfileSample& s) { return connection_table(s.rotation(), s.Dp / s.D); }

ConnectionTable frame_connection(const ProfilePair& p, double r) { return connection_from_sample(p.sample(r)); }

ChristoffelSet christoffel_from_derivatives(const Mat4& g, const std::array<Mat4, 4>& dg) {
  const Mat4 ginv = g.inverse();
  ChristoffelSet out;
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (int l = 0; l < 4; ++l) acc += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        out.gamma[k](i, j) = 0.5 * acc;
      }
    }
  }
  return out;
}

ChristoffelSet christoffel_from_sample(const ProfileSample& s) {
  std::array<Mat4, 4> dg;
  for (auto& m : dg) m.setZero();
  dg[1](0, 2) = dg[1](2, 0) = s.Hp;
  dg[1](2, 2) = 2.0 * (s.H * s.Hp - s.D * s.Dp);
  return christoffel_from_derivatives(metric_from_sample(s), dg);
}

namespace {

std::array<Mat4, 4> metric_gradient(const ProfilePair& p, const Vec4& x) {
  std::array<Mat4, 4> dg;
  for (int k = 0; k < 4; ++k) {
    const double h = first_step(x[k]);
    const Vec4 e = unit(k) * h;
    dg[k] = (metric_at(p, SpacetimePoint::from(x + e)) - metric_at(p, SpacetimePoint::from(x - e))) / (2.0 * h);
  }
  return dg;
}

// ddg[a][b] = d^2 g / dx^a dx^b
std::array<std::array<Mat4, 4>, 4> metric_hessian(const ProfilePair& p, const Vec4& x) {
  std::array<std::array<Mat4, 4>, 4> ddg;
  auto g = [&](const Vec4& y) { return metric_at(p, SpacetimePoint::from(y)); };
  const Mat4 g0 = g(x);
  for (int a = 0; a < 4; ++a) {
    const double ha = second_step(x[a]);
    const Vec4 ea = unit(a) * ha;
    ddg[a][a] = (g(x + ea) - 2.0 * g0 + g(x - ea)) / (ha * ha);
    for (int b = a + 1; b < 4; ++b) {
      const double hb = second_step(x[b]);
      const Vec4 eb = unit(b) * hb;
      ddg[a][b] = (g(x + ea + eb) - g(x + ea - eb) - g(x - ea + eb) + g(x - ea - eb)) / (4.0 * ha * hb);
      ddg[b][a] = ddg[a][b];
    }
  }
  return ddg;
}

}  // namespace

ChristoffelSet numeric_christoffel(const ProfilePair& p, const SpacetimePoint& x) {
  const Vec4 c = x.coords();
  return christoffel_from_derivatives(metric_at(p, x), metric_gradient(p, c));
}

// ---------------------------------------------------------------------------
// curvature

Vec4 CurvatureTable::apply(const Vec4& X, const Vec4& Y, const Vec4& Z) const {
  Vec4 out = Vec4::Zero();
  for (int i = 0; i < 4; ++i) {
    if (X[i] == 0.0) continue;
    for (int j = 0; j < 4; ++j) {
      if (Y[j] == 0.0) continue;
      for (int k = 0; k < 4; ++k) out += X[i] * Y[j] * Z[k] * R[i][j][k];
    }
  }
  return out;
}

double CurvatureTable::lowered(const Vec4& X, const Vec4& Y, const Vec4& Z, const Vec4& W) const {
  return apply(X, Y, Z).dot(minkowski() * W);
}

CurvatureTable curvature_from_sample(const ProfileSample& s) {
  const InvariantTriple f = invariants(s);
  CurvatureTable t;
  for (auto& a : t.R)
    for (auto& b : a)
      for (auto& v : b) v.setZero();
  t.R[0][1][0] = Vec4(0, -f.f1, 0, 0);
  t.R[0][1][1] = Vec4(-f.f1, 0, -f.f2, 0);
  t.R[0][1][2] = Vec4(0, f.f2, 0, 0);
  t.R[0][2][0] = Vec4(0, 0, -f.f1, 0);
  t.R[0][2][2] = Vec4(-f.f1, 0, 0, 0);
  t.R[1][2][0] = Vec4(0, -f.f2, 0, 0);
  t.R[1][2][1] = Vec4(-f.f2, 0, -f.f3, 0);
  t.R[1][2][2] = Vec4(0, f.f3, 0, 0);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = 0; k < 4; ++k) t.R[j][i][k] = -t.R[i][j][k];
  return t;
}

CurvatureTable frame_curvature(const ProfilePair& p, double r) { return curvature_from_sample(p.sample(r)); }

CurvatureTable curvature_by_composition(const ProfileSample& s) {
  const ConnectionTable c = connection_from_sample(s);
  // radial derivatives of the coefficients; the table is linear in them
  const double dq = s.rotation_derivative();
  const double dp = (s.Dpp * s.D - s.Dp * s.Dp) / (s.D * s.D);
  const ConnectionTable dc = connection_table(dq, dp);
  auto derivative_along = [&](int i, int j, int k) -> Vec4 {
    // nabla_{E_i} (nabla_{E_j} E_k)
    Vec4 out = Vec4::Zero();
    if (i == 1) out += dc.nabla[j][k];
    for (int l = 0; l < 4; ++l) out += c.nabla[j][k][l] * c.nabla[i][l];
    return out;
  };
  CurvatureTable t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        const Vec4 bracket = closed_form_bracket(s, i, j);
        Vec4 v = derivative_along(i, j, k) - derivative_along(j, i, k);
        for (int m = 0; m < 4; ++m) v -= bracket[m] * c.nabla[m][k];
        t.R[i][j][k] = v;
      }
  return t;
}

CoordinateRiemann numeric_riemann(const ProfilePair& p, const SpacetimePoint& x) {
  const Vec4 c = x.coords();
  const Mat4 g = metric_at(p, x);
  const Mat4 ginv = g.inverse();
  const auto dg = metric_gradient(p, c);
  const auto ddg = metric_hessian(p, c);

  // Gamma^k_{ij} and d_m Gamma^k_{ij}
  double gam[4][4][4];
  double dgam[4][4][4][4];  // [m][k][i][j]
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (int l = 0; l < 4; ++l) acc += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        gam[k][i][j] = 0.5 * acc;
      }
  for (int m = 0; m < 4; ++m) {
    const Mat4 dginv = -ginv * dg[m] * ginv;
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double acc = 0.0;
          for (int l = 0; l < 4; ++l) {
            const double S = dg[i](l, j) + dg[j](l, i) - dg[l](i, j);
            const double dS = ddg[m][i](l, j) + ddg[m][j](l, i) - ddg[m][l](i, j);
            acc += dginv(k, l) * S + ginv(k, l) * dS;
          }
          dgam[m][k][i][j] = 0.5 * acc;
        }
  }

  CoordinateRiemann out;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double v = dgam[i][k][j][l] - dgam[j][k][i][l];
          for (int m = 0; m < 4; ++m) v += gam[k][i][m] * gam[m][j][l] - gam[k][j][m] * gam[m][i][l];
          out.riemann[k][l](i, j) = v;
        }
  return out;
}

CurvatureTable to_frame_curvature(const ProfileSample& s, const CoordinateRiemann& R) {
  const Frame f = frame_from_sample(s);
  CurvatureTable t;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        Vec4 coord = Vec4::Zero();
        const Vec4 Ea = f.E(a), Eb = f.E(b), Ec = f.E(c);
        for (int k = 0; k < 4; ++k) {
          double acc = 0.0;
          for (int l = 0; l < 4; ++l) {
            if (Ec[l] == 0.0) continue;
            acc += Ec[l] * Ea.dot(R.riemann[k][l] * Eb);
          }
          coord[k] = acc;
        }
        t.R[a][b][c] = to_frame(s, coord);
      }
  return t;
}

// ---------------------------------------------------------------------------
// oracles on vector fields

namespace {

Vec4 field_at(const ProfilePair& p, const Vec4& x, FieldSpec Y) {
  if (Y.basis == FieldSpec::Basis::Coordinate) return unit(Y.index);
  return frame_at(p, SpacetimePoint::from(x)).E(Y.index);
}

// d_i Y^k as a matrix (row k, column i)
Mat4 field_jacobian(const ProfilePair& p, const Vec4& x, FieldSpec Y) {
  Mat4 J;
  for (int i = 0; i < 4; ++i) {
    const double h = fourth_order_step(x[i]);
    const Vec4 e = unit(i) * h;
    J.col(i) = (8.0 * (field_at(p, x + e, Y) - field_at(p, x - e, Y)) -
                (field_at(p, x + 2.0 * e, Y) - field_at(p, x - 2.0 * e, Y))) /
               (12.0 * h);
  }
  return J;
}

}  // namespace

Vec4 koszul_oracle(const ProfilePair& p, const SpacetimePoint& x, const Vec4& X, FieldSpec Y) {
  if (Y.index < 0 || Y.index > 3) throw ParameterError("field index out of range");
  const Vec4 c = x.coords();
  const ChristoffelSet gamma = numeric_christoffel(p, x);
  const Vec4 y = field_at(p, c, Y);
  return field_jacobian(p, c, Y) * X + gamma.contract(X, y);
}

Vec4 numeric_bracket(const ProfilePair& p, const SpacetimePoint& x, int i, int j) {
  const Vec4 c = x.coords();
  const FieldSpec Fi{FieldSpec::Basis::Frame, i}, Fj{FieldSpec::Basis::Frame, j};
  const Vec4 Ei = field_at(p, c, Fi), Ej = field_at(p, c, Fj);
  const Vec4 coord = field_jacobian(p, c, Fj) * Ei - field_jacobian(p, c, Fi) * Ej;
  return to_frame(p.sample(x.r), coord);
}

Vec4 closed_form_bracket(const ProfileSample& s, int i, int j) {
  const Vec4 b23(-s.Hp / s.D, 0.0, -s.Dp / s.D, 0.0);
  if (i == 1 && j == 2) return b23;
  if (i == 2 && j == 1) return -b23;
  return Vec4::Zero();
}

double bracket_residual(const ProfilePair& p, double r) {
  const ProfileSample s = p.sample(r);
  const SpacetimePoint x{0.0, r, 0.0, 0.0};
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      worst = std::max(worst, (numeric_bracket(p, x, i, j) - closed_form_bracket(s, i, j)).cwiseAbs().maxCoeff());
  return worst;
}

double torsion_residual(const ConnectionTable& c, const ProfileSample& s) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      worst = std::max(worst, (c.nabla[i][j] - c.nabla[j][i] - closed_form_bracket(s, i, j)).cwiseAbs().maxCoeff());
  return worst;
}

double metric_compatibility_residual(const ConnectionTable& c) {
  const Mat4& eta = minkowski();
  double worst = 0.0;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        worst = std::max(worst, std::abs(eta(j, j) * c.nabla[k][i][j] + eta(i, i) * c.nabla[k][j][i]));
  return worst;
}

double bianchi_residual(const CurvatureTable& R) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        worst = std::max(worst, (R.R[i][j][k] + R.R[j][k][i] + R.R[k][i][j]).cwiseAbs().maxCoeff());
  return worst;
}

double max_abs_difference(const ConnectionTable& a, const ConnectionTable& b) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) worst = std::max(worst, (a.nabla[i][j] - b.nabla[i][j]).cwiseAbs().maxCoeff());
  return worst;
}

double max_abs_difference(const CurvatureTable& a, const CurvatureTable& b) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) worst = std::max(worst, (a.R[i][j][k] - b.R[i][j][k]).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace godel
