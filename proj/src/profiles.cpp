#include "godel/profiles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "godel/errors.hpp"

namespace godel {

const char* to_string(ProfileClass c) {
  switch (c) {
    case ProfileClass::I: return "I";
    case ProfileClass::II: return "II";
    case ProfileClass::III: return "III";
    case ProfileClass::IV: return "IV";
    case ProfileClass::Custom: return "custom";
  }
  return "?";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace

ProfilePair ProfilePair::class_i(double m, double omega) {
  if (!(m > 0.0)) throw ParameterError("class I requires m > 0");
  if (omega == 0.0) throw ParameterError("class I requires omega != 0");
  ProfilePair p;
  p.kind_ = ProfileClass::I;
  p.scale_ = m;
  p.omega_ = omega;
  p.alpha_ = m * m;
  p.params_ = {{"m", m}, {"omega", omega}};
  return p;
}

ProfilePair ProfilePair::class_ii(double omega) {
  if (omega == 0.0) throw ParameterError("class II requires omega != 0 (alpha = omega = 0 is the excluded trivial case)");
  ProfilePair p;
  p.kind_ = ProfileClass::II;
  p.omega_ = omega;
  p.alpha_ = 0.0;
  p.params_ = {{"omega", omega}};
  return p;
}

ProfilePair ProfilePair::class_iii(double mu, double omega) {
  if (!(mu > 0.0)) throw ParameterError("class III requires mu > 0");
  if (omega == 0.0) throw ParameterError("class III requires omega != 0");
  ProfilePair p;
  p.kind_ = ProfileClass::III;
  p.scale_ = mu;
  p.omega_ = omega;
  p.alpha_ = -mu * mu;
  p.params_ = {{"mu", mu}, {"omega", omega}};
  return p;
}

ProfilePair ProfilePair::class_iv(double alpha) {
  if (alpha == 0.0) throw ParameterError("class IV requires alpha != 0 (alpha = omega = 0 is the excluded trivial case)");
  ProfilePair p;
  p.kind_ = ProfileClass::IV;
  p.scale_ = std::sqrt(std::abs(alpha));
  p.omega_ = 0.0;
  p.alpha_ = alpha;
  p.params_ = {{"alpha", alpha}};
  return p;
}

ProfilePair ProfilePair::custom(Expression H, Expression D, DerivativeMode mode) {
  if (mode.kind == DerivativeMode::Kind::ClosedForm)
    throw ParameterError("custom profiles are differentiated numerically; closed-form mode is unavailable");
  ProfilePair p;
  p.kind_ = ProfileClass::Custom;
  p.h_expr_ = std::move(H);
  p.d_expr_ = std::move(D);
  p.omega_ = std::numeric_limits<double>::quiet_NaN();
  p.alpha_ = std::numeric_limits<double>::quiet_NaN();
  p.domain_.r_min = -std::numeric_limits<double>::infinity();
  p.mode_ = mode;
  return p;
}

ProfilePair ProfilePair::with_domain(WorkingDomain domain) const {
  if (!(domain.r_min < domain.r_max) || !(domain.margin >= 0.0)) throw ParameterError("invalid working domain");
  ProfilePair p = *this;
  p.domain_ = domain;
  return p;
}

ProfilePair ProfilePair::with_mode(DerivativeMode mode) const {
  if (kind_ == ProfileClass::Custom && mode.kind == DerivativeMode::Kind::ClosedForm)
    throw ParameterError("custom profiles are differentiated numerically; closed-form mode is unavailable");
  if (mode.step < 0.0) throw ParameterError("difference step must be positive");
  ProfilePair p = *this;
  p.mode_ = mode;
  return p;
}

double ProfilePair::alpha() const { return alpha_; }

std::string ProfilePair::spec() const {
  switch (kind_) {
    case ProfileClass::I: return "class1(m=" + fmt(scale_) + ",omega=" + fmt(omega_) + ")";
    case ProfileClass::II: return "class2(omega=" + fmt(omega_) + ")";
    case ProfileClass::III: return "class3(mu=" + fmt(scale_) + ",omega=" + fmt(omega_) + ")";
    case ProfileClass::IV: return "class4(alpha=" + fmt(alpha_) + ")";
    case ProfileClass::Custom: return "custom(H=\"" + h_expr_.source() + "\",D=\"" + d_expr_.source() + "\")";
  }
  return {};
}

ProfileSample ProfilePair::closed_form(double r) const {
  ProfileSample s;
  s.r = r;
  const double w = omega_;
  switch (kind_) {
    case ProfileClass::I: {
      const double m = scale_, sh = std::sinh(m * r), ch = std::cosh(m * r);
      s.H = 2.0 * w / (m * m) * (1.0 - ch);
      s.Hp = -2.0 * w / m * sh;
      s.Hpp = -2.0 * w * ch;
      s.D = sh / m;
      s.Dp = ch;
      s.Dpp = m * sh;
      break;
    }
    case ProfileClass::II:
      s.H = -w * r * r;
      s.Hp = -2.0 * w * r;
      s.Hpp = -2.0 * w;
      s.D = r;
      s.Dp = 1.0;
      s.Dpp = 0.0;
      break;
    case ProfileClass::III: {
      const double mu = scale_, sn = std::sin(mu * r), cs = std::cos(mu * r);
      s.H = 2.0 * w / (mu * mu) * (cs - 1.0);
      s.Hp = -2.0 * w / mu * sn;
      s.Hpp = -2.0 * w * cs;
      s.D = sn / mu;
      s.Dp = cs;
      s.Dpp = -mu * sn;
      break;
    }
    case ProfileClass::IV: {
      const double k = scale_;
      s.H = s.Hp = s.Hpp = 0.0;
      if (alpha_ > 0.0) {
        s.D = std::sinh(k * r) / k;
        s.Dp = std::cosh(k * r);
        s.Dpp = k * std::sinh(k * r);
      } else {
        s.D = std::sin(k * r) / k;
        s.Dp = std::cos(k * r);
        s.Dpp = -k * std::sin(k * r);
      }
      break;
    }
    case ProfileClass::Custom: break;
  }
  return s;
}

double ProfilePair::H(double r) const { return kind_ == ProfileClass::Custom ? h_expr_(r) : closed_form(r).H; }
double ProfilePair::D(double r) const { return kind_ == ProfileClass::Custom ? d_expr_(r) : closed_form(r).D; }

ProfileSample ProfilePair::differenced(double r) const {
  const double scale = std::max(1.0, std::abs(r));
  const double eps = std::numeric_limits<double>::epsilon();
  const double h1 = mode_.step > 0.0 ? mode_.step : std::cbrt(eps) * scale;
  const double h2 = mode_.step > 0.0 ? mode_.step : std::pow(eps, 0.25) * scale;
  auto first = [&](auto&& f) { return (f(r + h1) - f(r - h1)) / (2.0 * h1); };
  auto second = [&](auto&& f, double f0) { return (f(r + h2) - 2.0 * f0 + f(r - h2)) / (h2 * h2); };
  auto Hf = [&](double x) { return H(x); };
  auto Df = [&](double x) { return D(x); };
  ProfileSample s;
  s.r = r;
  s.H = Hf(r);
  s.D = Df(r);
  s.Hp = first(Hf);
  s.Dp = first(Df);
  s.Hpp = second(Hf, s.H);
  s.Dpp = second(Df, s.D);
  return s;
}

ProfileSample ProfilePair::jets(double r) const {
  const auto h = h_expr_.jet(r), d = d_expr_.jet(r);
  ProfileSample s;
  s.r = r;
  s.H = h.value;
  s.Hp = h.d1;
  s.Hpp = h.d2;
  s.D = d.value;
  s.Dp = d.d1;
  s.Dpp = d.d2;
  return s;
}

ProfileSample ProfilePair::sample(double r) const {
  if (!(r >= domain_.r_min && r <= domain_.r_max)) {
    std::ostringstream os;
    os << "r = " << r << " outside working domain [" << domain_.r_min << ", " << domain_.r_max << "]";
    throw DomainError(os.str());
  }
  ProfileSample s;
  if (kind_ != ProfileClass::Custom)
    s = mode_.kind == DerivativeMode::Kind::CentralDifference ? differenced(r) : closed_form(r);
  else
    s = mode_.kind == DerivativeMode::Kind::Automatic ? jets(r) : differenced(r);
  if (!(std::abs(s.D) >= domain_.margin) || !std::isfinite(s.D) || !std::isfinite(s.H)) {
    std::ostringstream os;
    os << "|D(" << r << ")| = " << std::abs(s.D) << " below margin " << domain_.margin << " (metric degenerates)";
    throw DomainError(os.str());
  }
  return s;
}

ProfilePair make_homogeneous(ProfileClass kind, const std::map<std::string, double>& params) {
  auto get = [&](const char* key) {
    auto it = params.find(key);
    if (it == params.end()) throw ParameterError(std::string("missing parameter '") + key + "'");
    return it->second;
  };
  switch (kind) {
    case ProfileClass::I: return ProfilePair::class_i(get("m"), get("omega"));
    case ProfileClass::II: return ProfilePair::class_ii(get("omega"));
    case ProfileClass::III: return ProfilePair::class_iii(get("mu"), get("omega"));
    case ProfileClass::IV: return ProfilePair::class_iv(get("alpha"));
    case ProfileClass::Custom: break;
  }
  throw ParameterError("make_homogeneous needs one of the classes I-IV");
}

// ---------------------------------------------------------------------------
// spec grammar

namespace {

class SpecParser {
 public:
  explicit SpecParser(std::string_view s) : s_(s) {}

  ProfilePair parse() {
    const std::string name = identifier();
    expect('(');
    std::map<std::string, std::string> args;
    skip_ws();
    if (!peek(')')) {
      do {
        const std::string key = identifier();
        expect('=');
        if (args.count(key)) fail("duplicate key '" + key + "'");
        args[key] = value();
      } while (accept(','));
    }
    expect(')');
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");

    auto number = [&](const std::string& key) {
      auto it = args.find(key);
      if (it == args.end()) fail("missing parameter '" + key + "' for " + name);
      const double v = Expression::parse(it->second)(0.0);
      if (!std::isfinite(v)) fail("parameter '" + key + "' is not finite");
      return v;
    };
    auto only = [&](std::initializer_list<const char*> keys) {
      for (const auto& [k, v] : args) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
          fail("unknown parameter '" + k + "' for " + name);
      }
    };

    if (name == "class1") {
      only({"m", "omega"});
      return ProfilePair::class_i(number("m"), number("omega"));
    }
    if (name == "class2") {
      only({"omega"});
      return ProfilePair::class_ii(number("omega"));
    }
    if (name == "class3") {
      only({"mu", "omega"});
      return ProfilePair::class_iii(number("mu"), number("omega"));
    }
    if (name == "class4") {
      only({"alpha"});
      return ProfilePair::class_iv(number("alpha"));
    }
    if (name == "custom") {
      only({"H", "D", "step"});
      if (!args.count("H") || !args.count("D")) fail("custom profiles need H and D");
      const double step = args.count("step") ? number("step") : 0.0;
      return ProfilePair::custom(Expression::parse(args["H"]), Expression::parse(args["D"]),
                                 DerivativeMode::central_difference(step));
    }
    fail("unknown profile kind '" + name + "'");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("profile spec \"" + std::string(s_) + "\": " + what);
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string identifier() {
    skip_ws();
    const size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected identifier");
    return std::string(s_.substr(start, pos_ - start));
  }
  std::string value() {
    skip_ws();
    if (accept('"')) {
      const size_t start = pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') ++pos_;
      if (pos_ >= s_.size()) fail("unterminated string");
      std::string out(s_.substr(start, pos_ - start));
      ++pos_;
      return out;
    }
    const size_t start = pos_;
    int depth = 0;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) break;
        --depth;
      }
      if (c == ',' && depth == 0) break;
      ++pos_;
    }
    std::string out(s_.substr(start, pos_ - start));
    if (out.find_first_not_of(" \t") == std::string::npos) fail("empty value");
    return out;
  }

  std::string_view s_;
  size_t pos_ = 0;
};

}  // namespace

ProfilePair ProfilePair::parse(std::string_view spec) {
  try {
    return SpecParser(spec).parse();
  } catch (const ParameterError& e) {
    throw ParseError(std::string("profile spec \"") + std::string(spec) + "\": " + e.what());
  }
}

// ---------------------------------------------------------------------------

InvariantTriple invariants(const ProfileSample& s) {
  const double q = s.rotation();
  InvariantTriple f;
  f.f1 = q * q;
  f.f2 = -s.rotation_derivative();
  f.f3 = 3.0 * f.f1 - s.Dpp / s.D;
  return f;
}

InvariantTriple invariants(const ProfilePair& p, double r) { return invariants(p.sample(r)); }

std::optional<HomogeneousFit> detect_homogeneous(const ProfilePair& p, std::span<const double> grid, double tol) {
  if (grid.empty()) return std::nullopt;
  std::vector<ProfileSample> samples;
  samples.reserve(grid.size());
  try {
    for (double r : grid) samples.push_back(p.sample(r));
  } catch (const DomainError&) {
    return std::nullopt;
  }
  // D'' = alpha D and H' = -2 omega D, least squares in the scaled form
  // D''/D = alpha, -H'/(2D) = omega.
  double a_sum = 0.0, w_sum = 0.0;
  for (const auto& s : samples) {
    a_sum += s.Dpp / s.D;
    w_sum += -s.Hp / (2.0 * s.D);
  }
  HomogeneousFit fit;
  fit.alpha = a_sum / static_cast<double>(samples.size());
  fit.omega = w_sum / static_cast<double>(samples.size());
  for (const auto& s : samples) {
    fit.alpha_residual = std::max(fit.alpha_residual, std::abs(s.Dpp / s.D - fit.alpha));
    fit.omega_residual = std::max(fit.omega_residual, std::abs(-s.Hp / (2.0 * s.D) - fit.omega));
  }
  if (!(fit.alpha_residual < tol && fit.omega_residual < tol)) return std::nullopt;

  const bool a0 = std::abs(fit.alpha) < tol;
  const bool w0 = std::abs(fit.omega) < tol;
  if (a0 && w0)
    fit.cls = ProfileClass::Custom;
  else if (w0)
    fit.cls = ProfileClass::IV;
  else if (a0)
    fit.cls = ProfileClass::II;
  else
    fit.cls = fit.alpha > 0.0 ? ProfileClass::I : ProfileClass::III;
  return fit;
}

RegimeFlags regime_flags(const ProfilePair& p, std::span<const double> grid, double tol) {
  RegimeFlags flags{true, true, true, true, true};
  if (grid.empty()) return RegimeFlags{};
  for (double r : grid) {
    const ProfileSample s = p.sample(r);
    const InvariantTriple f = invariants(s);
    flags.f2_zero = flags.f2_zero && std::abs(f.f2) < tol;
    flags.f1_zero = flags.f1_zero && std::abs(f.f1) < tol;
    flags.f1_plus_f3_zero = flags.f1_plus_f3_zero && std::abs(f.f1 + f.f3) < tol;
    // (H'/D)' = -2 f2 and (H'/D)^2 - D''/D = f1 + f3
    flags.tanh_condition = flags.tanh_condition && std::abs(2.0 * f.f2) < std::abs(f.f1 + f.f3);
    flags.dprime_dominates = flags.dprime_dominates && s.Dp * s.Dp > s.Hp * s.Hp;
  }
  return flags;
}

bool is_trivial(const ProfilePair& p, std::span<const double> grid, double tol) {
  for (double r : grid) {
    const InvariantTriple f = invariants(p, r);
    if (std::abs(f.f1) >= tol || std::abs(f.f2) >= tol || std::abs(f.f3) >= tol) return false;
  }
  return true;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) return {a};
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

}  // namespace godel
