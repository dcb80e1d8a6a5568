#include "godel/hypersurfaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include "godel/errors.hpp"

namespace godel {

std::vector<Vec3> UBox::grid(int n) const {
  std::vector<Vec3> out;
  if (n <= 0) return out;
  auto axis = [&](int k) { return n == 1 ? std::vector<double>{center()[k]} : linspace(lo[k], hi[k], n); };
  const auto a = axis(0), b = axis(1), c = axis(2);
  out.reserve(a.size() * b.size() * c.size());
  for (double x : a)
    for (double y : b)
      for (double z : c) out.emplace_back(x, y, z);
  return out;
}

const char* to_string(CausalCharacter c) {
  switch (c) {
    case CausalCharacter::Timelike: return "timelike";
    case CausalCharacter::Spacelike: return "spacelike";
    case CausalCharacter::Unknown: return "unknown";
  }
  return "unknown";
}

CausalCharacter causal_from_eps(int eps) {
  if (eps == -1) return CausalCharacter::Timelike;
  if (eps == 1) return CausalCharacter::Spacelike;
  return CausalCharacter::Unknown;
}

Tolerances Tolerances::scaled(double s) const {
  if (!(s > 0.0)) throw ParameterError("tolerance scale must be positive");
  Tolerances t = *this;
  t.closed_form *= s;
  t.first_derivative *= s;
  t.h *= s;
  t.nabla_h *= s;
  return t;
}

Tolerances Tolerances::from_environment() {
  const char* env = std::getenv("GODEL_GEO_TOL_SCALE");
  if (!env || !*env) return {};
  char* end = nullptr;
  const double s = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(s > 0.0))
    throw ParameterError(std::string("GODEL_GEO_TOL_SCALE must be a positive number, got '") + env + "'");
  return Tolerances{}.scaled(s);
}

namespace {

// fourth-order central weights at offsets -2, -1, 1, 2
constexpr std::array<double, 4> kOffsets{-2.0, -1.0, 1.0, 2.0};
constexpr std::array<double, 4> kFirst{1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
constexpr std::array<double, 4> kSecond{-1.0 / 12.0, 16.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};
constexpr double kSecondCenter = -30.0 / 12.0;

Vec3 shifted(const Vec3& u, int axis, double by) {
  Vec3 v = u;
  v[axis] += by;
  return v;
}

template <class T, class F>
T first_difference(const F& f, const Vec3& u, int axis, double h) {
  T acc = kFirst[0] * f(shifted(u, axis, kOffsets[0] * h));
  for (int a = 1; a < 4; ++a) acc += kFirst[a] * f(shifted(u, axis, kOffsets[a] * h));
  return acc / h;
}

// d_i d_j f; tensor-product stencil for i != j
template <class T, class F>
T second_difference(const F& f, const T& f0, const Vec3& u, int i, int j, double hi, double hj) {
  if (i == j) {
    T acc = kSecondCenter * f0;
    for (int a = 0; a < 4; ++a) acc += kSecond[a] * f(shifted(u, i, kOffsets[a] * hi));
    return acc / (hi * hi);
  }
  T acc = f0 * 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Vec3 v = shifted(u, i, kOffsets[a] * hi);
      v[j] += kOffsets[b] * hj;
      acc += kFirst[a] * kFirst[b] * f(v);
    }
  return acc / (hi * hj);
}

// covector n_mu = eps_{mu a b c} T1^a T2^b T3^c
Vec4 cross(const Tangents& T) {
  Vec4 n;
  for (int mu = 0; mu < 4; ++mu) {
    Mat3 minor;
    int row = 0;
    for (int k = 0; k < 4; ++k) {
      if (k == mu) continue;
      minor.row(row++) = T.row(k);
    }
    n[mu] = ((mu % 2) ? -1.0 : 1.0) * minor.determinant();
  }
  return n;
}

int canonical_sign(const Vec4& xi_frame) {
  for (int i = 0; i < 4; ++i)
    if (std::abs(xi_frame[i]) > 1e-9) return xi_frame[i] > 0.0 ? 1 : -1;
  return 1;
}

}  // namespace

HypersurfaceEngine::HypersurfaceEngine(ProfilePair profile, Immersion F, StepSizes steps)
    : profile_(std::move(profile)), F_(std::move(F)), steps_(steps) {
  if (!F_.map) throw ParameterError("immersion has no component map");
}

Vec3 HypersurfaceEngine::steps_for(const Vec3& u, double base) const {
  return {base * std::max(1.0, std::abs(u[0])), base * std::max(1.0, std::abs(u[1])),
          base * std::max(1.0, std::abs(u[2]))};
}

Tangents HypersurfaceEngine::differentiate(const Vec3& u) const {
  const Vec3 h = steps_for(u, steps_.first);
  Tangents T;
  for (int i = 0; i < 3; ++i) T.col(i) = first_difference<Vec4>(F_.map, u, i, h[i]);
  return T;
}

Mat3 HypersurfaceEngine::induced_metric(const Vec3& u) const {
  const Tangents T = differentiate(u);
  const Vec4 x = F_(u);
  const Mat4 g = metric_at(profile_, SpacetimePoint::from(x));
  return T.transpose() * g * T;
}

Tangents HypersurfaceEngine::tangent_frame(const Vec3& u) const {
  const Tangents T = differentiate(u);
  const Vec4 x = F_(u);
  const Mat3 G = T.transpose() * metric_at(profile_, SpacetimePoint::from(x)) * T;
  const double scale = std::max(1.0, T.colwise().squaredNorm().prod());
  if (!(std::abs(G.determinant()) > 1e-10 * scale)) {
    std::ostringstream os;
    os << "induced metric degenerate at u = (" << u[0] << ", " << u[1] << ", " << u[2]
       << "), det = " << G.determinant();
    throw DegenerateError(os.str());
  }
  return T;
}

HypersurfaceEngine::Raw HypersurfaceEngine::raw(const Vec3& u, bool with_h) const {
  Raw out;
  out.point = F_(u);
  out.T = tangent_frame(u);
  const ProfileSample s = profile_.sample(out.point[1]);
  const Mat4 g = metric_from_sample(s);
  out.G = out.T.transpose() * g * out.T;

  const Vec4 n = cross(out.T);
  const Vec4 up = g.inverse() * n;
  const Vec4 f = to_frame(s, up);
  const double N = f[0] * f[0] - f[1] * f[1] - f[2] * f[2] - f[3] * f[3];
  if (!(std::abs(N) > 1e-8 * f.squaredNorm())) {
    std::ostringstream os;
    os << "normal is null at u = (" << u[0] << ", " << u[1] << ", " << u[2] << "), g(xi, xi) = " << N;
    throw NullNormalError(os.str());
  }
  out.eps = N > 0.0 ? 1 : -1;
  const double norm = std::sqrt(std::abs(N));
  out.xi_coords = up / norm;
  out.xi_frame = f / norm;
  if (!with_h) return out;

  const ChristoffelSet gamma = christoffel_from_sample(s);
  const Vec3 h2 = steps_for(u, steps_.second);
  const Vec4 gxi = g * out.xi_coords;
  // d_i T_j by differencing the Jacobian along u_i; both orders are kept so the
  // asymmetry of the raw form can be reported before symmetrizing
  Mat3 full;
  for (int i = 0; i < 3; ++i) {
    std::array<Tangents, 4> ring;
    for (int a = 0; a < 4; ++a) ring[a] = differentiate(shifted(u, i, kOffsets[a] * h2[i]));
    const Tangents dT = (kFirst[0] * ring[0] + kFirst[1] * ring[1] + kFirst[2] * ring[2] + kFirst[3] * ring[3]) / h2[i];
    for (int j = 0; j < 3; ++j)
      full(i, j) = out.eps * (dT.col(j) + gamma.contract(out.T.col(i), out.T.col(j))).dot(gxi);
  }
  out.h = 0.5 * (full + full.transpose());
  out.asym = (full - full.transpose()).cwiseAbs().maxCoeff();
  return out;
}

NormalData HypersurfaceEngine::unit_normal(const Vec3& u) const {
  const Raw r = raw(u, false);
  const int s = canonical_sign(r.xi_frame);
  return {s * r.xi_frame, s * r.xi_coords, r.eps};
}

FundamentalForms HypersurfaceEngine::second_fundamental_form(const Vec3& u) const {
  const Raw r = raw(u, true);
  const int s = canonical_sign(r.xi_frame);
  FundamentalForms f;
  f.point = r.point;
  f.tangents = r.T;
  f.normal = {s * r.xi_frame, s * r.xi_coords, r.eps};
  f.induced = r.G;
  f.h = s * r.h;
  f.orientation = s;
  f.h_asymmetry = r.asym;
  f.mean_curvature = (r.G.inverse() * f.h).trace();
  for (auto& m : f.nabla_h) m.setZero();
  for (auto& a : f.riemann)
    for (auto& m : a) m.setZero();
  return f;
}

FundamentalForms HypersurfaceEngine::forms(const Vec3& u) const {
  FundamentalForms f = second_fundamental_form(u);
  const int s = canonical_sign(Raw{raw(u, false)}.xi_frame);
  const Vec3 ho = steps_for(u, steps_.outer);

  // induced metric on the outer stencil: first and second derivatives
  std::array<Mat3, 3> dG;
  std::array<std::array<Mat3, 3>, 3> ddG;
  const Mat3 G0 = f.induced;
  auto Gf = [this](const Vec3& v) { return induced_metric(v); };
  for (int i = 0; i < 3; ++i) {
    std::array<Mat3, 4> ring;
    for (int a = 0; a < 4; ++a) ring[a] = Gf(shifted(u, i, kOffsets[a] * ho[i]));
    dG[i] = (kFirst[0] * ring[0] + kFirst[1] * ring[1] + kFirst[2] * ring[2] + kFirst[3] * ring[3]) / ho[i];
    ddG[i][i] = (kSecondCenter * G0 + kSecond[0] * ring[0] + kSecond[1] * ring[1] + kSecond[2] * ring[2] +
                 kSecond[3] * ring[3]) /
                (ho[i] * ho[i]);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) ddG[i][j] = ddG[j][i] = second_difference<Mat3>(Gf, G0, u, i, j, ho[i], ho[j]);

  const Mat3 Gi = G0.inverse();
  // Gamma[l](i, j) and its derivatives
  std::array<Mat3, 3> Gam;
  std::array<std::array<Mat3, 3>, 3> dGam;  // dGam[k][l](i, j) = d_k Gamma^l_ij
  auto S = [&](int m, int i, int j) { return dG[i](m, j) + dG[j](m, i) - dG[m](i, j); };
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int m = 0; m < 3; ++m) acc += Gi(l, m) * S(m, i, j);
        Gam[l](i, j) = 0.5 * acc;
      }
  for (int k = 0; k < 3; ++k) {
    const Mat3 dGi = -Gi * dG[k] * Gi;
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double acc = 0.0;
          for (int m = 0; m < 3; ++m) {
            const double dS = ddG[k][i](m, j) + ddG[k][j](m, i) - ddG[k][m](i, j);
            acc += dGi(l, m) * S(m, i, j) + Gi(l, m) * dS;
          }
          dGam[k][l](i, j) = 0.5 * acc;
        }
  }
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double acc = dGam[i][l](j, k) - dGam[j][l](i, k);
          for (int m = 0; m < 3; ++m) acc += Gam[l](i, m) * Gam[m](j, k) - Gam[l](j, m) * Gam[m](i, k);
          f.riemann[l][k](i, j) = acc;
        }

  // nabla h: differences of h with the orientation of the cross product kept fixed
  auto hf = [&](const Vec3& v) { Mat3 m = raw(v, true).h; return Mat3(s * m); };
  for (int k = 0; k < 3; ++k) {
    const Mat3 dh = first_difference<Mat3>(hf, u, k, ho[k]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double acc = dh(i, j);
        for (int m = 0; m < 3; ++m) acc -= Gam[m](k, i) * f.h(m, j) + Gam[m](k, j) * f.h(i, m);
        f.nabla_h[k](i, j) = acc;
      }
  }
  return f;
}

IdentityResiduals HypersurfaceEngine::gauss_codazzi(const FundamentalForms& f) const {
  const ProfileSample s = profile_.sample(f.point[1]);
  const CurvatureTable R = curvature_from_sample(s);
  std::array<Vec4, 3> T;
  for (int i = 0; i < 3; ++i) T[i] = to_frame(s, f.tangents.col(i));
  const double eps = f.normal.eps;
  IdentityResiduals out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
          double intrinsic = 0.0;
          for (int m = 0; m < 3; ++m) intrinsic += f.induced(l, m) * f.riemann[m][k](i, j);
          const double rhs = intrinsic + eps * (f.h(i, k) * f.h(j, l) - f.h(i, l) * f.h(j, k));
          out.gauss = std::max(out.gauss, std::abs(R.lowered(T[i], T[j], T[k], T[l]) - rhs));
        }
        const double rhs = eps * (f.nabla_h[i](j, k) - f.nabla_h[j](i, k));
        out.codazzi = std::max(out.codazzi, std::abs(R.lowered(T[i], T[j], T[k], f.normal.xi) - rhs));
      }
  return out;
}

double HypersurfaceEngine::semi_parallel_residual(const FundamentalForms& f) const {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double acc = 0.0;
          for (int m = 0; m < 3; ++m) acc -= f.riemann[m][k](i, j) * f.h(m, l) + f.riemann[m][l](i, j) * f.h(k, m);
          worst = std::max(worst, std::abs(acc));
        }
  return worst;
}

FrameForm HypersurfaceEngine::frame_form(const FundamentalForms& f, const std::array<Vec4, 3>& Y,
                                         const Vec4& reference_xi) const {
  const ProfileSample s = profile_.sample(f.point[1]);
  Eigen::Matrix<double, 4, 3> Yc;
  for (int a = 0; a < 3; ++a) Yc.col(a) = to_coords(s, Y[a]);
  const Mat3 C = f.tangents.colPivHouseholderQr().solve(Yc);
  FrameForm out;
  out.tangency = (f.tangents * C - Yc).cwiseAbs().maxCoeff();
  const double overlap = f.normal.xi.dot(minkowski() * reference_xi) / f.normal.eps;
  out.h = (overlap < 0.0 ? -1.0 : 1.0) * (C.transpose() * f.h * C);
  return out;
}

namespace {

struct PointResult {
  double max_h = 0, max_nabla = 0, asym = 0, semi = 0, trace = 0, max_riemann = 0, gauss = 0, codazzi = 0, h_asym = 0;
  int eps = 0;
  int orientation = 1;
};

PointResult evaluate(const HypersurfaceEngine& e, const Vec3& u) {
  const FundamentalForms f = e.forms(u);
  PointResult r;
  r.max_h = f.h.cwiseAbs().maxCoeff();
  for (int k = 0; k < 3; ++k) {
    r.max_nabla = std::max(r.max_nabla, f.nabla_h[k].cwiseAbs().maxCoeff());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.asym = std::max(r.asym, std::abs(f.nabla_h[k](i, j) - f.nabla_h[i](k, j)));
  }
  for (const auto& a : f.riemann)
    for (const auto& m : a) r.max_riemann = std::max(r.max_riemann, m.cwiseAbs().maxCoeff());
  r.semi = e.semi_parallel_residual(f);
  r.trace = f.mean_curvature;
  r.orientation = f.orientation;
  const auto id = e.gauss_codazzi(f);
  r.gauss = id.gauss;
  r.codazzi = id.codazzi;
  r.h_asym = f.h_asymmetry;
  r.eps = f.normal.eps;
  return r;
}

}  // namespace

Verdict classify(const HypersurfaceEngine& engine, std::span<const Vec3> grid, const Tolerances& tol, int jobs) {
  if (grid.empty()) throw ParameterError("classification grid is empty");
  std::vector<PointResult> results(grid.size());
  const int workers = std::clamp(jobs, 1, static_cast<int>(grid.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) results[i] = evaluate(engine, grid[i]);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < grid.size(); i += workers) results[i] = evaluate(engine, grid[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Verdict v;
  v.tolerances = tol;
  v.points = grid.size();
  double max_h = 0, max_nabla = 0, asym = 0, semi = 0, max_tr = 0, max_R = 0, gauss = 0, cod = 0, h_asym = 0;
  // traces are compared for one continuous choice of normal, not the per-point canonical one
  for (auto& r : results) r.trace *= r.orientation * results[0].orientation;
  double tr_min = results[0].trace, tr_max = results[0].trace, tr_sum = 0;
  v.eps = results[0].eps;
  for (const auto& r : results) {
    max_h = std::max(max_h, r.max_h);
    max_nabla = std::max(max_nabla, r.max_nabla);
    asym = std::max(asym, r.asym);
    semi = std::max(semi, r.semi);
    max_tr = std::max(max_tr, std::abs(r.trace));
    max_R = std::max(max_R, r.max_riemann);
    gauss = std::max(gauss, r.gauss);
    cod = std::max(cod, r.codazzi);
    h_asym = std::max(h_asym, r.h_asym);
    tr_min = std::min(tr_min, r.trace);
    tr_max = std::max(tr_max, r.trace);
    tr_sum += r.trace;
    if (r.eps != v.eps) v.eps = 0;
  }
  v.residuals = {{"max_h", max_h},
                 {"max_nabla_h", max_nabla},
                 {"codazzi_asymmetry", asym},
                 {"semi_parallel", semi},
                 {"max_trace", max_tr},
                 {"trace_variation", tr_max - tr_min},
                 {"max_riemann", max_R},
                 {"gauss_identity", gauss},
                 {"codazzi_identity", cod},
                 {"h_asymmetry", h_asym}};
  v.mean_curvature = tr_sum / static_cast<double>(results.size());
  v.causal = causal_from_eps(v.eps);

  const double c = tol.classification_factor;
  v.totally_geodesic = max_h < c * tol.h;
  const bool parallel = max_nabla < c * tol.nabla_h;
  const bool codazzi = asym < c * tol.nabla_h;
  const bool semi_parallel = semi < c * tol.nabla_h;
  v.parallel = parallel || v.totally_geodesic;
  v.codazzi = codazzi || v.parallel;
  v.semi_parallel = semi_parallel || v.parallel;
  v.chain_adjusted = v.parallel != parallel || v.codazzi != codazzi || v.semi_parallel != semi_parallel;
  v.minimal = max_tr < c * tol.h;
  v.cmc = (tr_max - tr_min) < c * tol.nabla_h;
  v.flat = max_R < c * tol.nabla_h;
  return v;
}

double codazzi_normal_residual(const ProfilePair& p, double r, const Vec4& coeffs) {
  const double a = coeffs[0], b = coeffs[1], c = coeffs[2], d = coeffs[3];
  const CurvatureTable R = frame_curvature(p, r);
  const Vec4 E1 = Vec4::Unit(0), E2 = Vec4::Unit(1), E3 = Vec4::Unit(2), E4 = Vec4::Unit(3);
  const std::array<Vec4, 6> X{b * E1 + a * E2, c * E1 + a * E3, d * E1 + a * E4,
                              c * E2 - b * E3, d * E2 - b * E4, d * E3 - c * E4};
  // The five displayed pairs miss xi = cE3 + dE4 (X1 = 0 there); R(X5, X6) xi catches it, so use every pair.
  double worst = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) worst = std::max(worst, R.apply(X[i], X[j], coeffs).cwiseAbs().maxCoeff());
  return worst;
}

Mat3 distribution_second_form(const ProfileSample& s, const std::array<Vec4, 3>& Y, const Vec4& xi) {
  const ConnectionTable c = connection_from_sample(s);
  const double eps = xi.dot(minkowski() * xi) > 0.0 ? 1.0 : -1.0;
  Mat3 h;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Vec4 nab = Vec4::Zero();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) nab += Y[a][i] * Y[b][j] * c.nabla[i][j];
      h(a, b) = eps * nab.dot(minkowski() * xi);
    }
  return h;
}

Immersion random_smooth_immersion(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-0.08, 0.08), freq(0.5, 1.5);
  std::array<double, 12> a{}, w{};
  for (auto& x : a) x = amp(rng);
  for (auto& x : w) x = freq(rng);
  Immersion F;
  F.map = [a, w](const Vec3& u) {
    auto bump = [&](int k) {
      return a[3 * k] * std::sin(w[3 * k] * u[0] + u[1]) + a[3 * k + 1] * std::cos(w[3 * k + 1] * u[1] - u[2]) +
             a[3 * k + 2] * std::sin(w[3 * k + 2] * (u[0] + u[2]));
    };
    return Vec4(u[0] + bump(0), u[1] + bump(1), u[2] + bump(2), bump(3));
  };
  F.box = UBox{Vec3(-0.3, 0.8, -0.3), Vec3(0.3, 1.2, 0.3)};
  return F;
}

}  // namespace godel
