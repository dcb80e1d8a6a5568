#include "godel/catalog.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "godel/errors.hpp"
#include "godel/ode_table.hpp"

namespace godel {

namespace {
std::string eps_tag(int eps) { return eps > 0 ? "+1" : "-1"; }


// Anchor phrases of the statements each family transcribes.
constexpr const char* kRefTrivialSlice = "F(u_1,u_2,u_3) = (u_1,u_2,u_3,0)";
constexpr const char* kRefRadialSlice = "these timelike hypersurfaces are parallel and flat";
constexpr const char* kRefTypeIII = "If $\\frac{H'}{2D}$ is constant";
constexpr const char* kRefTypeIIIParallel = "characterize completely parallel hypersurfaces";
constexpr const char* kRefTypeIIIExample = "Consider the special case where";
constexpr const char* kRefTypeIIICodazzi = "In particular, these timelike hypersurfaces are flat";
constexpr const char* kRefTypeIV = "we deduce that M is totally geodesic";
constexpr const char* kRefTypeIVParallel = "since $H' \\neq D'$";
constexpr const char* kRefTypeV = "satisfying  $(G'_1)^2-(G'_4)^2=-\\varepsilon$";
constexpr const char* kRefLimiting = "decomposes as the product";

constexpr double kApplicabilityTol = 1e-7;
constexpr double kTableMargin = 0.08;
constexpr int kProbePoints = 9;

const Vec4 E1 = Vec4::Unit(0), E2 = Vec4::Unit(1), E3 = Vec4::Unit(2), E4 = Vec4::Unit(3);

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::vector<double> probe(Window w) { return linspace(w.r_lo, w.r_hi, kProbePoints); }

void require_applicable(bool ok, const BuildOptions& opt, const std::string& why) {
  if (!ok && !opt.force) throw ApplicabilityError(why);
}

void require_f2_zero(const ProfilePair& p, Window w, const BuildOptions& opt, const char* family) {
  const auto grid = probe(w);
  require_applicable(regime_flags(p, grid, kApplicabilityTol).f2_zero, opt,
                     std::string(family) + " needs H'/(2D) constant on the window");
}

UBox box(Vec3 lo, Vec3 hi) { return UBox{lo, hi}; }

double deriv4(const std::function<double(double)>& f, double x, double h = 1e-3) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

// The normal and third tangent of the type IV families at angle theta.
struct TypeIVFrame {
  Vec4 xi, Y3;
};

TypeIVFrame type_iv_frame(double theta, int eps) {
  const double c = std::cosh(theta), s = std::sinh(theta);
  if (eps < 0) return {s * E1 + c * E3, c * E1 + s * E3};
  return {c * E1 + s * E3, s * E1 + c * E3};
}

// beta'/beta for d/du3 = beta Y3 to commute with E2.
double type_iv_a(const ProfileSample& s, double theta, int eps) {
  const TypeIVFrame f = type_iv_frame(theta, eps);
  const double x = f.Y3[0], y = f.Y3[2];
  return y * (2 * s.rotation() * x - (s.Dp / s.D) * y) / (x * x - y * y);
}

// h(E2, Y3), the only component of the type IV second fundamental form.
double type_iv_b(const ProfileSample& s, double theta, int eps) {
  const TypeIVFrame f = type_iv_frame(theta, eps);
  return distribution_second_form(s, {E2, E4, f.Y3}, f.xi)(2, 0);
}

// Normal component of [E2, Y3] for the radial law theta(r); zero iff the distribution integrates.
double type_iv_integrability(const ProfileSample& s, double theta, double dtheta, int eps) {
  const TypeIVFrame f = type_iv_frame(theta, eps);
  const Vec4 bracket = -2 * s.rotation() * E1 - (s.Dp / s.D) * E3;
  return dtheta * static_cast<double>(eps) + f.Y3[2] * bracket.dot(minkowski() * f.xi);
}

double type_iv_algebraic(const ProfileSample& s, double theta) {
  const InvariantTriple f = invariants(s);
  const double c = std::cosh(theta), sh = std::sinh(theta);
  return sh * c * (f.f1 + f.f3) - (sh * sh + c * c) * f.f2;
}

struct RadialCheck {
  double algebraic = 0.0, integrability = 0.0, a = 0.0;
};

RadialCheck check_type_iv(const ProfilePair& p, const ThetaLaw& law, int eps, Window w) {
  RadialCheck out;
  auto theta_at = [&](double r) { return law.radial(p.sample(r)); };
  for (double r : probe(w)) {
    const ProfileSample s = p.sample(r);
    const double th = theta_at(r);
    out.algebraic = std::max(out.algebraic, std::abs(type_iv_algebraic(s, th)));
    out.integrability =
        std::max(out.integrability, std::abs(type_iv_integrability(s, th, deriv4(theta_at, r), eps)));
    out.a = std::max(out.a, std::abs(type_iv_a(s, th, eps)));
  }
  return out;
}

FrameExpectation type_iii_table(const ProfileSample& s, double theta, double h22) {
  FrameExpectation fx;
  const double c = std::cos(theta), sn = std::sin(theta);
  fx.Y = {E1, sn * E2 - c * E3, E4};
  fx.xi = c * E2 + sn * E3;
  fx.h = Mat3::Zero();
  fx.h(0, 1) = fx.h(1, 0) = -s.rotation();
  fx.h(1, 1) = h22;
  return fx;
}

// Type III immersion driven by a table with rows (r, F1, F3) over u2, possibly with extra rows.
Immersion type_iii_immersion(std::shared_ptr<const OdeTable> T, std::size_t r_row, std::size_t f1_row,
                             std::size_t f3_row, UBox b) {
  Immersion F;
  F.map = [T, r_row, f1_row, f3_row](const Vec3& u) {
    return Vec4(u[0] + (*T)(f1_row, u[1]), (*T)(r_row, u[1]), (*T)(f3_row, u[1]), u[2]);
  };
  F.box = b;
  F.expected = CausalCharacter::Timelike;
  return F;
}

double cos_floor(const OdeTable& T, std::size_t theta_row, double a, double b) {
  double worst = 1.0;
  for (double x : linspace(a, b, 101)) worst = std::min(worst, std::abs(std::cos(T(theta_row, x))));
  return worst;
}

}  // namespace

double ThetaLaw::along(double u) const {
  switch (kind) {
    case Kind::Constant:
      return k2;
    case Kind::Linear:
      return k1 * u + k2;
    default:
      throw ParameterError("theta law is not a function of the surface parameter");
  }
}

double ThetaLaw::radial(const ProfileSample& s) const {
  switch (kind) {
    case Kind::Constant:
      return k2;
    case Kind::ArccosRhoOverD: {
      const double x = rho / s.D;
      if (std::abs(x) > 1.0) throw ParameterError("|rho| exceeds D at r = " + fmt(s.r));
      return std::acos(x);
    }
    case Kind::QuarterLog: {
      const double x = (s.Dp + s.Hp) / (s.Dp - s.Hp);
      if (!(x > 0.0) || !std::isfinite(x)) throw ParameterError("(D'+H')/(D'-H') is not positive at r = " + fmt(s.r));
      return 0.25 * std::log(x);
    }
    case Kind::HalfLogLambda: {
      const double disc = 4 * s.D * s.D * lambda * lambda + s.Dp * s.Dp - s.Hp * s.Hp;
      if (disc < 0.0) throw ParameterError("negative discriminant at r = " + fmt(s.r));
      if (s.Dp == s.Hp) throw ParameterError("D' = H' at r = " + fmt(s.r));
      const double x = (2 * s.D * lambda + branch * std::sqrt(disc)) / (s.Dp - s.Hp);
      if (!(x > 0.0)) throw ParameterError("logarithm of a non-positive number at r = " + fmt(s.r));
      return 0.5 * std::log(x);
    }
    default:
      throw ParameterError("theta law is not a function of the radius");
  }
}

ProfilePair for_certification(const ProfilePair& p) {
  return p.kind() == ProfileClass::Custom ? p.with_mode(DerivativeMode::automatic()) : p;
}

CatalogEntry tg_a(const ProfilePair& p, Window w) {
  CatalogEntry e;
  e.id = "TG-a";
  e.reference = kRefTrivialSlice;
  Immersion F;
  F.map = [](const Vec3& u) { return Vec4(u[0], u[1], u[2], 0.0); };
  F.jacobian = [](const Vec3&) {
    Tangents T = Tangents::Zero();
    T(0, 0) = T(1, 1) = T(2, 2) = 1.0;
    return T;
  };
  F.box = box({-0.5, w.r_lo, -0.5}, {0.5, w.r_hi, 0.5});
  F.expected = CausalCharacter::Timelike;
  e.immersion = F;
  e.expected.totally_geodesic = e.expected.parallel = e.expected.codazzi = true;
  e.expected.minimal = e.expected.cmc = true;
  e.expected.causal = CausalCharacter::Timelike;
  e.table = [p](const Vec3&, const Vec4& x) {
    const ProfileSample s = p.sample(x[1]);
    FrameExpectation fx;
    fx.Y = {E1, E2, to_frame(s, Vec4::Unit(2))};
    fx.xi = E4;
    fx.h = Mat3::Zero();
    return fx;
  };
  e.asserts_coordinates = true;
  return e;
}

CatalogEntry par_1(const ProfilePair& p, double c) {
  const ProfileSample s0 = p.sample(c);
  CatalogEntry e;
  e.id = "PAR-1";
  e.reference = kRefRadialSlice;
  e.params = {{"c", c}};
  Immersion F;
  F.map = [p, c](const Vec3& u) {
    const ProfileSample s = p.sample(c);
    return Vec4(u[0] - (s.H / s.D) * u[1], c, u[1] / s.D, u[2]);
  };
  F.box = box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
  F.expected = CausalCharacter::Timelike;
  e.immersion = F;
  const double q = s0.rotation(), pp = s0.Dp / s0.D;
  const bool tg = std::abs(q) < 1e-12 && std::abs(pp) < 1e-12;
  e.expected.totally_geodesic = tg;
  e.expected.parallel = e.expected.codazzi = e.expected.flat = e.expected.cmc = true;
  e.expected.minimal = std::abs(s0.Dp) < 1e-12;
  e.expected.proper = !tg;
  e.expected.causal = CausalCharacter::Timelike;
  e.table = [q, pp](const Vec3&, const Vec4&) {
    FrameExpectation fx;
    fx.Y = {E1, E3, E4};
    fx.xi = E2;
    fx.h = Mat3::Zero();
    fx.h(0, 1) = fx.h(1, 0) = q;
    fx.h(1, 1) = -pp;
    return fx;
  };
  e.asserts_coordinates = true;
  e.note = "mean curvature D'(c)/D(c): constant for every profile, zero iff D'(c) = 0";
  return e;
}

CatalogEntry tg_b(const ProfilePair& p, double rho, Window w, BuildOptions opt) {
  require_f2_zero(p, w, opt, "TG-b");
  for (double r : probe(w))
    if (std::abs(rho) >= std::abs(p.D(r))) throw ParameterError("TG-b needs |rho| < D on the window");
  const double L = w.r_hi - w.r_lo;
  auto sys = [p, rho](double, std::span<const double> y, std::span<double> dy) {
    const ProfileSample s = p.sample(y[0]);
    const double k = rho / s.D;
    dy[0] = std::sqrt(std::max(0.0, 1.0 - k * k));
    dy[1] = rho * s.H / (s.D * s.D);
    dy[2] = -rho / (s.D * s.D);
  };
  auto T = std::make_shared<const OdeTable>(
      OdeTable::integrate(sys, 0.0, {w.r_lo, 0.0, 0.0}, -kTableMargin, L + kTableMargin));
  CatalogEntry e;
  e.id = "TG-b";
  e.reference = kRefTypeIII;
  e.params = {{"rho", rho}};
  const double hw = opt.half_width;
  e.immersion = type_iii_immersion(T, 0, 1, 2, box({-hw, 0.0, -hw}, {hw, L, hw}));
  e.expected.totally_geodesic = e.expected.parallel = e.expected.codazzi = true;
  e.expected.causal = CausalCharacter::Timelike;
  const ThetaLaw law = ThetaLaw::arccos_rho_over_d(rho);
  e.table = [p, law](const Vec3&, const Vec4& x) {
    const ProfileSample s = p.sample(x[1]);
    const double th = law.radial(s);
    // d theta/du2 = rho D'/D^2 cancels cos(theta) D'/D exactly
    return type_iii_table(s, th, law.rho * s.Dp / (s.D * s.D) - std::cos(th) * s.Dp / s.D);
  };
  e.asserts_coordinates = true;
  e.note = "h(Y1, Y2) = -H'/(2D) survives, so the slice is not totally geodesic unless H' = 0";
  return e;
}


CatalogEntry par_2(const ProfilePair& p_in, double lambda, double theta0, Window w, BuildOptions opt) {
  const ProfilePair p = for_certification(p_in);
  require_f2_zero(p, w, opt, "PAR-2");
  const double L = 0.5 * (w.r_hi - w.r_lo);
  auto sys = [p, lambda](double, std::span<const double> y, std::span<double> dy) {
    const ProfileSample s = p.sample(y[0]);
    const double c = std::cos(y[1]);
    dy[0] = std::sin(y[1]);
    dy[1] = lambda + c * s.Dp / s.D;
    dy[2] = s.H / s.D * c;
    dy[3] = -c / s.D;
  };
  const double a = -L - kTableMargin, b = L + kTableMargin;
  auto T = std::make_shared<const OdeTable>(OdeTable::integrate(sys, 0.0, {w.mid(), theta0, 0.0, 0.0}, a, b));
  if (cos_floor(*T, 1, a + 1e-9, b - 1e-9) < 1e-3) throw ParameterError("PAR-2: the normal turns radial inside the box");
  CatalogEntry e;
  e.id = "PAR-2";
  e.reference = kRefTypeIIIParallel;
  e.params = {{"lambda", lambda}, {"theta0", theta0}};
  const double hw = opt.half_width;
  e.immersion = type_iii_immersion(T, 0, 2, 3, box({-hw, -L, -hw}, {hw, L, hw}));
  const double q = p.sample(w.mid()).rotation();
  const bool tg = std::abs(lambda) < 1e-12 && std::abs(q) < 1e-12;
  e.expected.totally_geodesic = tg;
  e.expected.parallel = e.expected.codazzi = e.expected.flat = e.expected.cmc = true;
  e.expected.minimal = std::abs(lambda) < 1e-12;
  e.expected.proper = !tg;
  e.expected.causal = CausalCharacter::Timelike;
  e.table = [p, T, lambda](const Vec3& u, const Vec4& x) {
    return type_iii_table(p.sample(x[1]), (*T)(1, u[1]), lambda);
  };
  e.asserts_coordinates = true;
  e.note = "mean curvature -lambda; lambda = 0 gives a minimal parallel hypersurface";
  return e;
}

CatalogEntry cod_iii(const ProfilePair& p_in, double theta0, double kappa, Window w, BuildOptions opt) {
  const ProfilePair p = for_certification(p_in);
  require_f2_zero(p, w, opt, "COD-III");
  auto theta = [theta0, kappa](double u) { return theta0 + kappa * u + 0.2 * std::sin(u); };
  auto dtheta = [kappa](double u) { return kappa + 0.2 * std::cos(u); };
  const double L = 0.5 * (w.r_hi - w.r_lo);
  auto sys = [p, theta](double u, std::span<const double> y, std::span<double> dy) {
    const ProfileSample s = p.sample(y[0]);
    const double c = std::cos(theta(u));
    dy[0] = std::sin(theta(u));
    dy[1] = s.H / s.D * c;
    dy[2] = -c / s.D;
  };
  const double a = -L - kTableMargin, b = L + kTableMargin;
  for (double u : linspace(a, b, 101))
    if (std::abs(std::cos(theta(u))) < 1e-3) throw ParameterError("COD-III: the normal turns radial inside the box");
  auto T = std::make_shared<const OdeTable>(OdeTable::integrate(sys, 0.0, {w.mid(), 0.0, 0.0}, a, b));
  CatalogEntry e;
  e.id = "COD-III";
  e.reference = kRefTypeIIICodazzi;
  e.params = {{"theta0", theta0}, {"kappa", kappa}};
  const double hw = opt.half_width;
  e.immersion = type_iii_immersion(T, 0, 1, 2, box({-hw, -L, -hw}, {hw, L, hw}));
  e.expected.codazzi = e.expected.flat = true;
  e.expected.parallel = false;
  e.expected.causal = CausalCharacter::Timelike;
  e.table = [p, theta, dtheta](const Vec3& u, const Vec4& x) {
    const ProfileSample s = p.sample(x[1]);
    const double th = theta(u[1]);
    return type_iii_table(s, th, dtheta(u[1]) - std::cos(th) * s.Dp / s.D);
  };
  e.asserts_coordinates = true;
  e.note = "explicit angle law; Codazzi but not parallel";
  return e;
}

ExampleFamily par_2_example(double omega, double rho, double lambda, double theta, double k, Window w) {
  const double c = std::cos(theta), s = std::sin(theta);
  if (!(c > 0.0 && s > 0.0)) throw ParameterError("PAR-2-EX needs 0 < theta < pi/2");
  if (lambda == 0.0 || rho <= 0.0) throw ParameterError("PAR-2-EX needs lambda != 0 and rho > 0");
  const double decay = lambda / c;
  const std::string H = fmt(2 * omega * rho / (lambda * c)) + "*exp(-(" + fmt(decay) + ")*r)+(" + fmt(k) + ")";
  const std::string D = fmt(rho) + "*exp(-(" + fmt(decay) + ")*r)";
  const ProfilePair p =
      ProfilePair::custom(Expression::parse(H), Expression::parse(D), DerivativeMode::automatic());
  const double g = c * c / (lambda * rho * s), t = lambda * std::tan(theta);
  CatalogEntry e;
  e.id = "PAR-2-EX";
  e.reference = kRefTypeIIIExample;
  e.params = {{"omega", omega}, {"rho", rho}, {"lambda", lambda}, {"theta", theta}, {"k", k}};
  Immersion F;
  F.map = [=](const Vec3& u) {
    const double ex = std::exp(t * u[1]);
    return Vec4(u[0] + 2 * omega / lambda * u[1] + k * g * ex, s * u[1], -g * ex, u[2]);
  };
  F.box = box({-0.5, w.r_lo / s, -0.5}, {0.5, w.r_hi / s, 0.5});
  F.expected = CausalCharacter::Timelike;
  e.immersion = F;
  e.expected.parallel = e.expected.codazzi = e.expected.flat = e.expected.cmc = true;
  e.expected.minimal = e.expected.totally_geodesic = false;
  e.expected.proper = true;
  e.expected.causal = CausalCharacter::Timelike;
  e.table = [p, theta, lambda](const Vec3&, const Vec4& x) { return type_iii_table(p.sample(x[1]), theta, lambda); };
  e.asserts_coordinates = true;
  e.note = "alpha = lambda^2/cos^2(theta) and the effective rotation is omega/cos^2(theta)";
  return {p, e};
}

double type_iii_constraint_residual(const ProfilePair& p, const CatalogEntry& e) {
  if (!e.immersion) throw ParameterError("entry has no immersion");
  const Immersion& F = *e.immersion;
  const Vec3 c = F.box.center();
  auto comp = [&](int i) {
    return [&, i](double u2) { return F(Vec3(c[0], u2, c[2]))[i]; };
  };
  const double g1 = deriv4(comp(0), c[1]), g2 = deriv4(comp(1), c[1]), g3 = deriv4(comp(2), c[1]);
  const ProfileSample s = p.sample(F(c)[1]);
  return s.D * s.D * (g1 + g2) * (g1 + g2) - (s.H - 1) * (s.H - 1) * (1 - g3 * g3);
}

namespace {

using RadialFn = std::function<double(double)>;

// exp of the antiderivative of A, so that d/du3 = beta Y3 commutes with E2.
RadialFn derived_beta(const ProfilePair& p, const ThetaLaw& law, int eps, Window w) {
  auto A = [p, law, eps](double r) {
    const ProfileSample s = p.sample(r);
    return type_iv_a(s, law.radial(s), eps);
  };
  auto T = std::make_shared<const OdeTable>(
      OdeTable::quadrature(A, w.r_lo, w.r_lo - kTableMargin, w.r_hi + kTableMargin));
  return [T](double r) { return std::exp((*T)(0, r)); };
}

Immersion type_iv_immersion(const ProfilePair& p, const ThetaLaw& law, int eps, RadialFn beta, Window w, double hw) {
  Immersion F;
  F.map = [p, law, eps, beta](const Vec3& u) {
    const ProfileSample s = p.sample(u[0]);
    const double th = law.radial(s), b = beta(u[0]);
    const double ch = std::cosh(th), sh = std::sinh(th);
    const double X = eps < 0 ? ch - s.H / s.D * sh : sh - s.H / s.D * ch;
    const double Y = (eps < 0 ? sh : ch) / s.D;
    return Vec4(b * X * u[2], u[0], b * Y * u[2], u[1]);
  };
  F.box = box({w.r_lo, -hw, -hw}, {w.r_hi, hw, hw});
  F.expected = causal_from_eps(eps);
  return F;
}

std::function<FrameExpectation(const Vec3&, const Vec4&)> type_iv_table(const ProfilePair& p, const ThetaLaw& law,
                                                                         int eps, RadialFn beta, double h13) {
  return [=](const Vec3&, const Vec4& x) {
    const ProfileSample s = p.sample(x[1]);
    const TypeIVFrame f = type_iv_frame(law.radial(s), eps);
    FrameExpectation fx;
    fx.Y = {E2, E4, f.Y3};
    fx.xi = f.xi;
    fx.h = Mat3::Zero();
    fx.h(0, 2) = fx.h(2, 0) = h13;
    fx.scale = {1.0, 1.0, beta(x[1])};
    return fx;
  };
}

void require_eps(int eps) {
  if (eps != 1 && eps != -1) throw ParameterError("eps must be +1 or -1");
}

std::string describe(const RadialCheck& c) {
  return "algebraic " + fmt(c.algebraic) + ", integrability " + fmt(c.integrability) + ", A " + fmt(c.a);
}

}  // namespace

CatalogEntry tg_c(const ProfilePair& p_in, int eps, const std::string& variant, Window w, BuildOptions opt) {
  require_eps(eps);
  const ProfilePair p = for_certification(p_in);
  const ThetaLaw law = ThetaLaw::quarter_log();
  if (!opt.force) {
    require_applicable(regime_flags(p, probe(w), kApplicabilityTol).dprime_dominates, opt,
                       "TG-c needs (D')^2 > (H')^2 on the window");
    const RadialCheck c = check_type_iv(p, law, eps, w);
    require_applicable(c.algebraic < 1e-6 && c.integrability < 1e-6, opt,
                       "TG-c: the normal distribution does not integrate on this profile (" + describe(c) + ")");
  }
  CatalogEntry e;
  e.id = "TG-c";
  e.variant = variant;
  e.reference = kRefTypeIV;
  e.params = {{"eps", eps}};
  e.expected.totally_geodesic = e.expected.parallel = e.expected.codazzi = true;
  const double hw = opt.half_width;
  if (variant == "derivation") {
    const RadialFn beta = derived_beta(p, law, eps, w);
    e.immersion = type_iv_immersion(p, law, eps, beta, w, hw);
    e.expected.causal = causal_from_eps(eps);
    e.table = type_iv_table(p, law, eps, beta, 0.0);
    e.asserts_coordinates = true;
  } else if (variant == "theorem") {
    // printed with (tanh theta - D) for eps = 1 and (coth theta - D) for eps = -1, both called spacelike
    Immersion F;
    F.map = [p, law, eps](const Vec3& u) {
      const ProfileSample s = p.sample(u[0]);
      const double th = law.radial(s);
      if (eps < 0 && std::abs(th) < 1e-12) throw ParameterError("coth of a zero angle");
      const double lead = eps > 0 ? std::tanh(th) : 1.0 / std::tanh(th);
      return Vec4((lead - s.D) * u[2], u[0], u[2], u[1]);
    };
    F.box = box({w.r_lo, -hw, -hw}, {w.r_hi, hw, hw});
    F.expected = CausalCharacter::Spacelike;
    e.immersion = F;
    e.expected.causal = CausalCharacter::Spacelike;
  } else {
    throw ParameterError("TG-c variant must be derivation or theorem");
  }
  return e;
}

CatalogEntry par_3(const ProfilePair& p_in, double lambda, double k, int branch, int eps, const std::string& variant,
                   Window w, BuildOptions opt) {
  require_eps(eps);
  if (std::abs(lambda) < 1e-12) throw ParameterError("PAR-3 with lambda = 0 is the totally geodesic family");
  const ProfilePair p = for_certification(p_in);
  // h(E2, Y3) changes sign with eps, so the eps = 1 family solves the same equation for -lambda
  const ThetaLaw law = ThetaLaw::half_log_lambda(eps < 0 ? lambda : -lambda, branch);
  if (!opt.force) {
    RadialCheck c;
    try {
      c = check_type_iv(p, law, eps, w);
    } catch (const ParameterError& err) {
      // the angle law is undefined where its logarithm's argument is not positive
      throw ApplicabilityError(std::string("PAR-3 radicand condition fails on the window: ") + err.what());
    }
    require_applicable(c.algebraic < 1e-6 && c.integrability < 1e-6 && c.a < 1e-6, opt,
                       "PAR-3 needs an integrable, flat normal distribution (" + describe(c) + ")");
  }
  CatalogEntry e;
  e.id = "PAR-3";
  e.variant = variant;
  e.reference = kRefTypeIVParallel;
  e.params = {{"lambda", lambda}, {"k", k}, {"branch", branch}, {"eps", eps}};
  RadialFn beta;
  if (variant == "derivation")
    beta = derived_beta(p, law, eps, w);
  else if (variant == "theorem")
    beta = [k](double r) { return r * std::exp(k * r); };
  else
    throw ParameterError("PAR-3 variant must be derivation or theorem");
  e.immersion = type_iv_immersion(p, law, eps, beta, w, opt.half_width);
  e.expected.parallel = e.expected.codazzi = e.expected.flat = e.expected.minimal = e.expected.cmc = true;
  e.expected.totally_geodesic = false;
  e.expected.proper = true;
  e.expected.causal = causal_from_eps(eps);
  e.table = type_iv_table(p, law, eps, beta, lambda);
  e.asserts_coordinates = true;
  return e;
}

double par_3_lambda(const ProfilePair& p, double r) {
  const ProfileSample s = for_certification(p).sample(r);
  const double t = s.Hp / s.Dp;
  if (!(std::abs(t) < 1.0)) throw ParameterError("PAR-3 needs |H'| < |D'|");
  return type_iv_b(s, std::atanh(t), -1);
}

namespace {

void require_h_constant(const ProfilePair& p, Window w, const BuildOptions& opt, const char* family) {
  bool ok = true;
  for (double r : probe(w)) ok = ok && std::abs(p.sample(r).Hp) < kApplicabilityTol;
  require_applicable(ok, opt, std::string(family) + " needs H constant on the window");
}

// Boost pair ((e^t - eps e^-t)/2, (e^t + eps e^-t)/2).
std::pair<double, double> boost(double t, int eps) {
  return {0.5 * (std::exp(t) - eps * std::exp(-t)), 0.5 * (std::exp(t) + eps * std::exp(-t))};
}

std::function<FrameExpectation(const Vec3&, const Vec4&)> type_v_table(const ProfilePair& p, double k1, double k2,
                                                                        int eps, double h11) {
  return [=](const Vec3& u, const Vec4& x) {
    const auto [a, b] = boost(k1 * u[0] + k2, eps);
    FrameExpectation fx;
    fx.Y = {a * E1 + b * E4, E2, E3};
    fx.xi = b * E1 + a * E4;
    fx.h = Mat3::Zero();
    fx.h(0, 0) = h11;
    fx.scale = {1.0, 1.0, p.sample(x[1]).D};
    return fx;
  };
}

}  // namespace

CatalogEntry tg_d(const ProfilePair& p_in, double theta, int eps, const std::string& variant, Window w,
                  BuildOptions opt) {
  require_eps(eps);
  const ProfilePair p = for_certification(p_in);
  require_h_constant(p, w, opt, "TG-d");
  const double H = p.H(w.mid()), hw = opt.half_width;
  CatalogEntry e;
  e.id = "TG-d";
  e.variant = variant;
  e.reference = kRefTypeV;
  e.params = {{"theta", theta}, {"eps", eps}};
  Immersion F;
  F.box = box({-hw, w.r_lo, -hw}, {hw, w.r_hi, hw});
  if (variant == "derivation") {
    const auto [a, b] = boost(theta, eps);
    F.map = [a, b, H](const Vec3& u) { return Vec4(a * u[0] - H * u[2], u[1], u[2], b * u[0]); };
    e.table = type_v_table(p, 0.0, theta, eps, 0.0);
    e.asserts_coordinates = true;
  } else if (variant == "theorem") {
    // tanh for the spacelike family, coth for the timelike one
    if (eps < 0 && theta == 0.0) throw ParameterError("coth of a zero angle");
    const double lead = eps > 0 ? std::tanh(theta) : 1.0 / std::tanh(theta);
    F.map = [lead, H](const Vec3& u) { return Vec4(lead * u[0] - H * u[2], u[1], u[2], u[0]); };
  } else {
    throw ParameterError("TG-d variant must be derivation or theorem");
  }
  F.expected = causal_from_eps(eps);
  e.immersion = F;
  e.expected.totally_geodesic = e.expected.parallel = e.expected.codazzi = true;
  e.expected.causal = causal_from_eps(eps);
  return e;
}

CatalogEntry par_4(const ProfilePair& p_in, double k1, double k2, int eps, const std::string& variant, Window w,
                   BuildOptions opt) {
  require_eps(eps);
  const ProfilePair p = for_certification(p_in);
  require_h_constant(p, w, opt, "PAR-4");
  const double H = p.H(w.mid()), hw = opt.half_width;
  CatalogEntry e;
  e.id = "PAR-4";
  e.variant = variant;
  e.reference = kRefTypeV;
  Immersion F;
  F.box = box({-hw, w.r_lo, -hw}, {hw, w.r_hi, hw});
  if (variant == "derivation") {
    if (k1 == 0.0) throw ParameterError("PAR-4 needs k1 != 0");
    F.map = [=](const Vec3& u) {
      const auto [a, b] = boost(k1 * u[0] + k2, eps);
      return Vec4(b / k1 - H * u[2], u[1], u[2], a / k1);
    };
    e.asserts_coordinates = true;
  } else if (variant == "theorem") {
    k1 = 1.0, k2 = 0.0;
    F.map = [=](const Vec3& u) {
      const double t = eps > 0 ? std::cosh(u[0]) : std::sinh(u[0]);
      const double z = eps > 0 ? std::sinh(u[0]) : std::cosh(u[0]);
      return Vec4(t - H * u[2], u[1], u[2], z);
    };
    e.asserts_coordinates = true;
  } else if (variant == "reparametrized") {
    k1 = 1.0, k2 = 0.0;
    F.map = [=](const Vec3& u) {
      const double t = eps > 0 ? std::cosh(u[0]) : std::sinh(u[0]);
      const double z = eps > 0 ? std::sinh(u[0]) : std::cosh(u[0]);
      return Vec4(t + H * u[2], u[1], -u[2], z);
    };
  } else {
    throw ParameterError("PAR-4 variant must be derivation, theorem or reparametrized");
  }
  e.params = {{"k1", k1}, {"k2", k2}, {"eps", eps}};
  F.expected = causal_from_eps(eps);
  e.immersion = F;
  e.expected.parallel = e.expected.codazzi = e.expected.cmc = true;
  e.expected.totally_geodesic = e.expected.minimal = false;
  e.expected.proper = true;
  e.expected.causal = causal_from_eps(eps);
  e.table = type_v_table(p, k1, k2, eps, k1);
  e.note = "h(Y1, Y1) = k1 = " + fmt(k1);
  return e;
}

std::vector<CatalogEntry> codazzi_vi(const ProfilePair& p_in, Window w) {
  const ProfilePair p = for_certification(p_in);
  const RegimeFlags f = regime_flags(p, probe(w), kApplicabilityTol);
  if (!(f.f2_zero && f.f1_plus_f3_zero && !f.f1_zero))
    throw ApplicabilityError("the limiting case needs f2 = 0, f1 + f3 = 0 and f1 != 0");
  CatalogEntry rejected;
  rejected.id = "VI-E1";
  rejected.reference = kRefLimiting;
  double asym = 0.0;
  for (double r : probe(w)) {
    const Mat3 h = distribution_second_form(p.sample(r), {E2, E3, E4}, E1);
    asym = std::max(asym, (h - h.transpose()).cwiseAbs().maxCoeff());
  }
  rejected.rejection_asymmetry = asym;
  rejected.note = "xi = E1: the orthogonal distribution is not integrable, no hypersurface exists";
  CatalogEntry radial = par_1(p, w.mid());
  radial.id = "VI-E2";
  radial.reference = kRefLimiting;
  return {rejected, radial};
}

Enumeration catalog_enumerate(const ProfilePair& p_in, Window w, BuildOptions opt) {
  const ProfilePair p = for_certification(p_in);
  Enumeration out;
  const auto grid = probe(w);
  if (is_trivial(p, grid, kApplicabilityTol)) {
    out.diagnostics.push_back("flat profile (f1 = f2 = f3 = 0) is excluded");
    return out;
  }
  auto attempt = [&](const std::string& label, const std::function<CatalogEntry()>& build) {
    try {
      out.entries.push_back(build());
      return true;
    } catch (const Error& err) {
      out.diagnostics.push_back(label + ": " + err.what());
      return false;
    }
  };
  const RegimeFlags f = regime_flags(p, grid, kApplicabilityTol);
  attempt("TG-a", [&] { return tg_a(p, w); });
  attempt("PAR-1", [&] { return par_1(p, w.mid()); });
  if (f.f2_zero) {
    double dmin = std::abs(p.D(w.r_lo));
    for (double r : grid) dmin = std::min(dmin, std::abs(p.D(r)));
    attempt("TG-b", [&] { return tg_b(p, 0.5 * dmin, w, opt); });
    attempt("PAR-2", [&] { return par_2(p, 0.5, 0.3, w, opt); });
    attempt("COD-III", [&] { return cod_iii(p, 0.3, 0.2, w, opt); });
  } else {
    out.diagnostics.push_back("type III families need f2 = 0");
  }
  for (int eps : {-1, 1}) attempt("TG-c eps=" + eps_tag(eps), [&] { return tg_c(p, eps, "derivation", w, opt); });
  for (int eps : {-1, 1}) {
    std::vector<std::string> why;
    bool found = false;
    try {
      const double lambda = par_3_lambda(p, w.mid());
      for (int branch : {1, -1}) {
        try {
          out.entries.push_back(par_3(p, eps < 0 ? lambda : -lambda, 0.0, branch, eps, "derivation", w, opt));
          found = true;
          break;
        } catch (const Error& err) {
          why.push_back(err.what());
        }
      }
    } catch (const Error& err) {
      why.push_back(err.what());
    }
    if (!found) out.diagnostics.push_back("PAR-3 eps=" + eps_tag(eps) + ": " + (why.empty() ? "" : why.front()));
  }
  if (f.f1_zero) {
    for (int eps : {-1, 1}) {
      attempt("TG-d eps=" + eps_tag(eps), [&] { return tg_d(p, 0.4, eps, "derivation", w, opt); });
      attempt("PAR-4 eps=" + eps_tag(eps), [&] { return par_4(p, 1.0, 0.0, eps, "derivation", w, opt); });
    }
  } else {
    out.diagnostics.push_back("type V families need H constant");
  }
  try {
    for (auto& e : codazzi_vi(p, w)) out.entries.push_back(std::move(e));
  } catch (const Error& err) {
    out.diagnostics.push_back(std::string("limiting case: ") + err.what());
  }
  return out;
}

Certificate certify(const ProfilePair& p_in, const CatalogEntry& e, const Tolerances& tol, int n, int jobs) {
  const ProfilePair p = for_certification(p_in);
  Certificate cert;
  cert.id = e.id;
  cert.variant = e.variant;
  const double c = tol.classification_factor;
  if (!e.immersion) {
    cert.checks["rejected"] = e.rejection_asymmetry && *e.rejection_asymmetry > c * tol.h;
    cert.passed = cert.checks["rejected"];
    return cert;
  }
  try {
    const HypersurfaceEngine engine(p, *e.immersion);
    const auto grid = e.immersion->box.grid(n);
    cert.verdict = classify(engine, grid, tol, jobs);
    if (e.table) {
      for (const Vec3& u : grid) {
        const FundamentalForms f = engine.second_fundamental_form(u);
        const FrameExpectation fx = e.table(u, f.point);
        const FrameForm ff = engine.frame_form(f, fx.Y, fx.xi);
        cert.table_residual = std::max(cert.table_residual, (ff.h - fx.h).cwiseAbs().maxCoeff());
        cert.tangency = std::max(cert.tangency, ff.tangency);
        if (e.asserts_coordinates) {
          const ProfileSample s = p.sample(f.point[1]);
          for (int i = 0; i < 3; ++i) {
            const Vec4 d = to_frame(s, f.tangents.col(i)) - fx.scale[i] * fx.Y[i];
            cert.coordinate_residual = std::max(cert.coordinate_residual, d.cwiseAbs().maxCoeff());
          }
        }
      }
    }
  } catch (const Error& err) {
    cert.error = err.what();
    cert.checks["evaluable"] = false;
    cert.passed = false;
    return cert;
  }
  const Verdict& v = cert.verdict;
  const Expected& x = e.expected;
  auto expect = [&](const char* name, const std::optional<bool>& want, bool got) {
    if (want) cert.checks[name] = *want == got;
  };
  expect("totally_geodesic", x.totally_geodesic, v.totally_geodesic);
  expect("parallel", x.parallel, v.parallel);
  expect("codazzi", x.codazzi, v.codazzi);
  expect("flat", x.flat, v.flat);
  expect("minimal", x.minimal, v.minimal);
  expect("cmc", x.cmc, v.cmc);
  if (x.causal != CausalCharacter::Unknown) cert.checks["causal"] = v.causal == x.causal;
  if (x.proper) cert.checks["proper"] = v.residuals.at("max_h") > 1e-3;
  cert.checks["gauss_identity"] = v.residuals.at("gauss_identity") < c * tol.nabla_h;
  cert.checks["codazzi_identity"] = v.residuals.at("codazzi_identity") < c * tol.nabla_h;
  if (e.table) {
    cert.checks["table"] = cert.table_residual < c * tol.h && cert.tangency < c * tol.h;
    if (e.asserts_coordinates) cert.checks["coordinates"] = cert.coordinate_residual < c * tol.h;
  }
  cert.passed = true;
  for (const auto& [name, ok] : cert.checks) cert.passed = cert.passed && ok;
  return cert;
}

std::vector<Adjudication> adjudicate(const ProfilePair& p, Window w, const Tolerances& tol, int n) {
  std::vector<Adjudication> out;
  if (is_trivial(for_certification(p), probe(w), kApplicabilityTol)) return out;
  auto run = [&](const std::string& conflict, const std::vector<std::function<CatalogEntry()>>& builders) {
    std::vector<CatalogEntry> entries;
    try {
      for (const auto& b : builders) entries.push_back(b());
    } catch (const ApplicabilityError&) {
      return;
    }
    Adjudication a;
    a.conflict = conflict;
    for (const auto& e : entries) {
      a.variants.push_back(certify(p, e, tol, n));
      if (a.variants.back().passed) a.passing.push_back(e.variant);
    }
    a.resolved = a.passing.size() == 1;
    out.push_back(std::move(a));
  };
  for (int eps : {-1, 1}) {
    const std::string tag = " (eps=" + eps_tag(eps) + ")";
    run("TG-c causal labels" + tag, {[&] { return tg_c(p, eps, "derivation", w); },
                                     [&] { return tg_c(p, eps, "theorem", w); }});
  }
  for (int eps : {-1, 1}) {
    double lambda = 0.0;
    try {
      lambda = par_3_lambda(p, w.mid());
    } catch (const Error&) {
      break;
    }
    const double signed_lambda = eps < 0 ? lambda : -lambda;
    for (int branch : {1, -1}) {
      try {
        par_3(p, signed_lambda, 0.0, branch, eps, "derivation", w);
      } catch (const Error&) {
        continue;
      }
      run("PAR-3 scale factor (eps=" + eps_tag(eps) + ")",
          {[&] { return par_3(p, signed_lambda, 0.0, branch, eps, "derivation", w); },
           [&] { return par_3(p, signed_lambda, 1.0, branch, eps, "theorem", w); }});
      break;
    }
  }
  for (int eps : {-1, 1})
    run("PAR-4 signs (eps=" + eps_tag(eps) + ")",
        {[&] { return par_4(p, 1.0, 0.0, eps, "theorem", w); },
         [&] { return par_4(p, 1.0, 0.0, eps, "reparametrized", w); }});
  return out;
}

}  // namespace godel
