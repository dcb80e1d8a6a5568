#include "godel/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>

#include "godel/errors.hpp"

namespace godel {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

int line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key" in the document, for semantic errors.
int line_of_key(std::string_view text, const std::string& key) {
  const auto at = text.find("\"" + key + "\"");
  return at == std::string_view::npos ? 0 : line_of(text, at);
}

[[noreturn]] void config_error(std::string_view text, const std::string& key, const std::string& what) {
  const int line = line_of_key(text, key);
  throw ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + key + ": " + what);
}

double parse_double(std::string_view s, std::string_view what) {
  double x = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError("malformed number '" + std::string(s) + "' in " + std::string(what));
  return x;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 6);
  return ec == std::errc() ? std::string(buf, ptr) : "nan";
}

GridSpec GridSpec::parse(std::string_view text, bool allow_empty) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos)
    throw ConfigError("grid '" + std::string(text) + "' is not start:stop:count");
  GridSpec g;
  g.start = parse_double(text.substr(0, a), "grid start");
  g.stop = parse_double(text.substr(a + 1, b - a - 1), "grid stop");
  const double n = parse_double(text.substr(b + 1), "grid count");
  if (n != std::floor(n) || n < 0 || n > 1e6) throw ConfigError("grid count must be a non-negative integer");
  g.count = static_cast<int>(n);
  if (g.count == 0 && !allow_empty) throw ConfigError("grid '" + std::string(text) + "' is empty");
  if (!std::isfinite(g.start) || !std::isfinite(g.stop)) throw ConfigError("grid bounds must be finite");
  if (g.count > 1 && !(g.start < g.stop)) throw ConfigError("grid '" + std::string(text) + "' needs start < stop");
  return g;
}

std::vector<double> GridSpec::points() const {
  if (count == 0) return {};
  if (count == 1) return {start};
  return linspace(start, stop, count);
}

std::string GridSpec::str() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << start << ':' << stop << ':' << count;
  return os.str();
}

RunConfig RunConfig::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("line 1: configuration must be a JSON object");
  RunConfig cfg;
  auto str = [&](const std::string& key) -> std::string {
    const auto& v = doc.at(key);
    if (!v.is_string()) config_error(text, key, "expected a string");
    return v.get<std::string>();
  };
  auto grid = [&](const std::string& key, const std::string& value, bool allow_empty) {
    try {
      return GridSpec::parse(value, allow_empty);
    } catch (const ConfigError& e) {
      config_error(text, key, e.what());
    }
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "profile") {
      cfg.profile = str(key);
    } else if (key == "r") {
      cfg.r = grid(key, str(key), false);
    } else if (key == "box") {
      cfg.box = grid(key, str(key), false);
    } else if (key == "tol") {
      if (!value.is_object()) config_error(text, key, "expected an object");
      for (const auto& [name, v] : value.items()) {
        if (!v.is_number() || !(v.get<double>() > 0.0)) config_error(text, name, "tolerance must be a positive number");
        const double x = v.get<double>();
        if (name == "closed_form") cfg.tol.closed_form = x;
        else if (name == "first_derivative") cfg.tol.first_derivative = x;
        else if (name == "h") cfg.tol.h = x;
        else if (name == "nabla_h") cfg.tol.nabla_h = x;
        else config_error(text, name, "unknown tolerance");
      }
    } else if (key == "entries") {
      if (!value.is_array()) config_error(text, key, "expected an array of ids");
      for (const auto& v : value) {
        if (!v.is_string()) config_error(text, key, "expected an array of ids");
        cfg.entries.push_back(v.get<std::string>());
      }
    } else if (key == "out") {
      cfg.out = str(key);
    } else if (key == "jobs") {
      if (!value.is_number_integer() || value.get<long long>() < 1 || value.get<long long>() > 1024)
        config_error(text, key, "expected an integer in [1, 1024]");
      cfg.jobs = value.get<int>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) config_error(text, key, "expected a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "format") {
      cfg.format = str(key);
      if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "table")
        config_error(text, key, "expected json, csv or table");
    } else if (key == "scan") {
      if (!value.is_object()) config_error(text, key, "expected an object");
      ScanSpec s;
      for (const auto& [name, v] : value.items()) {
        if (!v.is_string()) config_error(text, name, "expected a string");
        if (name == "entry") s.entry = v.get<std::string>();
        else if (name == "param") s.param = v.get<std::string>();
        else if (name == "range") s.range = grid(name, v.get<std::string>(), true);
        else config_error(text, name, "unknown scan field");
      }
      if (s.entry.empty() || s.param.empty()) config_error(text, key, "needs entry and param");
      cfg.scan = s;
    } else if (key == "coeffs") {
      if (!value.is_array() || value.size() != 4) config_error(text, key, "expected four numbers");
      std::array<double, 4> c{};
      for (std::size_t i = 0; i < 4; ++i) {
        if (!value[i].is_number()) config_error(text, key, "expected four numbers");
        c[i] = value[i].get<double>();
      }
      cfg.coeffs = c;
    } else {
      config_error(text, key, "unknown field");
    }
  }
  const double scale = Tolerances::from_environment().h / Tolerances{}.h;
  if (scale != 1.0) cfg.tol = cfg.tol.scaled(scale);
  return cfg;
}

json RunConfig::to_json() const {
  json j = {{"profile", profile},
            {"r", r.str()},
            {"box", box.str()},
            {"tol", {{"closed_form", tol.closed_form}, {"first_derivative", tol.first_derivative}, {"h", tol.h},
                     {"nabla_h", tol.nabla_h}}},
            {"entries", entries},
            {"jobs", jobs},
            {"seed", seed},
            {"format", format}};
  if (!out.empty()) j["out"] = out;
  if (scan) j["scan"] = {{"entry", scan->entry}, {"param", scan->param}, {"range", scan->range.str()}};
  if (coeffs) j["coeffs"] = *coeffs;
  return j;
}

std::size_t Report::passed() const {
  return std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.skipped && r.pass; });
}
std::size_t Report::failed() const {
  return std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.skipped && !r.pass; });
}
std::size_t Report::skipped() const {
  return std::count_if(records.begin(), records.end(), [](const auto& r) { return r.skipped; });
}

json Report::to_json() const {
  json recs = json::array();
  for (const auto& r : records) {
    json j = {{"name", r.name},           {"reference", r.reference}, {"residual", r.residual},
              {"threshold", r.threshold}, {"pass", r.pass},           {"skipped", r.skipped}};
    if (!r.detail.empty()) j["detail"] = r.detail;
    recs.push_back(std::move(j));
  }
  json j = {{"command", command},
            {"profile", profile},
            {"summary", {{"passed", passed()}, {"failed", failed()}, {"skipped", skipped()}, {"exit_code", exit_code()}}},
            {"environment", {{"version", kVersion}, {"compiler", __VERSION__}}},
            {"records", recs},
            {"payload", payload}};
  if (!columns.empty()) {
    j["columns"] = columns;
    j["rows"] = rows;
  }
  return j;
}

std::string Report::to_csv() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
    os << '\n';
  };
  if (!columns.empty()) {
    line(columns);
    for (const auto& r : rows) line(r);
    return os.str();
  }
  line({"name", "reference", "residual", "threshold", "status", "detail"});
  for (const auto& r : records)
    line({r.name, r.reference, format_number(r.residual), format_number(r.threshold),
          r.skipped ? "skip" : (r.pass ? "pass" : "FAIL"), r.detail});
  return os.str();
}

std::string Report::to_table() const {
  std::ostringstream os;
  os << command << "  profile " << profile << '\n';
  if (!columns.empty()) {
    std::vector<std::size_t> width(columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) width[i] = columns[i].size();
    for (const auto& r : rows)
      for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        os << cells[i];
        if (i + 1 < cells.size()) os << std::string(width[i] - cells[i].size() + 2, ' ');
      }
      os << '\n';
    };
    line(columns);
    for (const auto& r : rows) line(r);
  }
  std::size_t name_w = 4;
  for (const auto& r : records) name_w = std::max(name_w, r.name.size());
  for (const auto& r : records) {
    os << (r.skipped ? "skip" : (r.pass ? "pass" : "FAIL")) << "  " << r.name << std::string(name_w - r.name.size() + 2, ' ')
       << format_number(r.residual) << " / " << format_number(r.threshold) << "  [" << r.reference << "]";
    if (!r.detail.empty()) os << "  " << r.detail;
    os << '\n';
  }
  os << passed() << " passed, " << failed() << " failed, " << skipped() << " skipped\n";
  return os.str();
}

std::string Report::render(std::string_view format) const {
  if (format == "json") return to_json().dump(2) + "\n";
  if (format == "csv") return to_csv();
  if (format == "table") return to_table();
  throw ConfigError("unknown format '" + std::string(format) + "'");
}

namespace {

// Anchor phrases quoted from the source statements.
constexpr const char* kRefFrame = "form a pseudo-orthonormal basis";
constexpr const char* kRefKoszul = "By means of the Koszul formula";
constexpr const char* kRefCurvature = "the curvature tensor is completely determined by";
constexpr const char* kRefHomogeneous = "H' = -2\\omega D";
constexpr const char* kRefInvariants = "f_1=\\left(\\frac{H'}{2D}\\right)^2";
constexpr const char* kRefGaussCodazzi = "equations of Gauss and Codazzi then respectively read";
constexpr const char* kRefTrivial = "the trivial case";
constexpr const char* kRefCases = "one of the following conditions holds";
constexpr const char* kRefTotallyGeodesic = "up to isometries, the immersion is given";
constexpr const char* kRefParallel = "up to isometries the immersion is given";
constexpr const char* kPlumbing = "plumbing";

CheckRecord below(std::string name, const char* ref, double residual, double threshold, std::string detail = {}) {
  return {std::move(name), ref, residual, threshold, residual < threshold, false, std::move(detail)};
}

CheckRecord skipped(std::string name, const char* ref, std::string detail) {
  return {std::move(name), ref, 0.0, 0.0, false, true, std::move(detail)};
}

ProfilePair load_profile(const RunConfig& cfg) {
  if (cfg.profile.empty()) throw ConfigError("a profile is required (--profile)");
  return ProfilePair::parse(cfg.profile);
}

std::vector<double> radial_grid(const ProfilePair& p, const RunConfig& cfg) {
  const auto grid = cfg.r.points();
  for (double r : grid) {
    try {
      (void)p.sample(r);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("r-grid leaves the profile domain: ") + e.what());
    }
  }
  return grid;
}

// max over the grid of f(r)
template <class F>
double grid_max(const std::vector<double>& grid, F f) {
  double worst = 0.0;
  for (double r : grid) worst = std::max(worst, f(r));
  return worst;
}

}  // namespace

Report cmd_verify_geometry(const RunConfig& cfg) {
  const ProfilePair p = load_profile(cfg);
  Report rep;
  rep.command = "verify-geometry";
  rep.profile = p.spec();
  const auto grid = radial_grid(p, cfg);
  if (is_trivial(p, grid, 1e-10)) {
    rep.records.push_back({"admissibility", kRefTrivial, 0.0, 0.0, false, false, "excluded trivial case (flat spacetime)"});
    return rep;
  }
  const Tolerances& t = cfg.tol;
  auto point = [](double r) { return SpacetimePoint{0.1, r, 0.3, -0.2}; };

  rep.records.push_back(below("bracket", kRefFrame, grid_max(grid, [&](double r) { return bracket_residual(p, r); }),
                              t.first_derivative));
  rep.records.push_back(below("torsion", kRefKoszul, grid_max(grid, [&](double r) {
                                const auto s = p.sample(r);
                                return torsion_residual(connection_from_sample(s), s);
                              }),
                              t.first_derivative));
  rep.records.push_back(below("metric_compatibility", kRefKoszul, grid_max(grid, [&](double r) {
                                return metric_compatibility_residual(frame_connection(p, r));
                              }),
                              t.first_derivative));
  rep.records.push_back(below("connection_vs_koszul_oracle", kRefKoszul, grid_max(grid, [&](double r) {
                                const auto s = p.sample(r);
                                const auto c = connection_from_sample(s);
                                const auto fr = frame_from_sample(s);
                                double worst = 0.0;
                                for (int i = 0; i < 4; ++i)
                                  for (int j = 0; j < 4; ++j) {
                                    const Vec4 o = to_frame(
                                        s, koszul_oracle(p, point(r), fr.E(i), {FieldSpec::Basis::Frame, j}));
                                    worst = std::max(worst, (o - c.nabla[i][j]).cwiseAbs().maxCoeff());
                                  }
                                return worst;
                              }),
                              t.h));
  rep.records.push_back(below("curvature_vs_numeric_riemann", kRefCurvature, grid_max(grid, [&](double r) {
                                const auto s = p.sample(r);
                                return max_abs_difference(to_frame_curvature(s, numeric_riemann(p, point(r))),
                                                          curvature_from_sample(s));
                              }),
                              t.classification_factor * t.nabla_h));
  rep.records.push_back(below("curvature_by_composition", kRefCurvature, grid_max(grid, [&](double r) {
                                const auto s = p.sample(r);
                                return max_abs_difference(curvature_by_composition(s), curvature_from_sample(s));
                              }),
                              t.first_derivative));
  rep.records.push_back(below("curvature_E4_components", kRefCurvature, grid_max(grid, [&](double r) {
                                const auto R = frame_curvature(p, r);
                                double worst = 0.0;
                                for (int i = 0; i < 4; ++i)
                                  for (int j = 0; j < 4; ++j)
                                    for (int k = 0; k < 4; ++k)
                                      if (i == 3 || j == 3 || k == 3)
                                        worst = std::max(worst, R.R[i][j][k].cwiseAbs().maxCoeff());
                                      else
                                        worst = std::max(worst, std::abs(R.R[i][j][k][3]));
                                return worst;
                              }),
                              t.first_derivative));
  rep.records.push_back(below("bianchi", kRefCurvature,
                              grid_max(grid, [&](double r) { return bianchi_residual(frame_curvature(p, r)); }),
                              t.first_derivative));

  // f1 >= 0, and f1 = 0 forces f2 = 0
  rep.records.push_back(below("invariant_relations", kRefInvariants, grid_max(grid, [&](double r) {
                                const auto f = invariants(p, r);
                                return std::max(-f.f1, f.f1 == 0.0 ? std::abs(f.f2) : 0.0);
                              }),
                              t.closed_form));
  if (p.is_homogeneous()) {
    const auto fit = detect_homogeneous(p, grid, t.first_derivative);
    if (!fit) {
      rep.records.push_back({"homogeneity_fit", kRefHomogeneous, 1.0, t.first_derivative, false, false,
                             "no (alpha, omega) fit within tolerance"});
    } else {
      const double err = std::max(std::abs(fit->alpha - p.alpha()), std::abs(fit->omega - p.omega()));
      rep.records.push_back(below("homogeneity_fit", kRefHomogeneous, err, t.first_derivative,
                                  "alpha " + format_number(fit->alpha) + ", omega " + format_number(fit->omega)));
    }
    rep.records.push_back(below("f2_vanishes", kRefInvariants,
                                grid_max(grid, [&](double r) { return std::abs(invariants(p, r).f2); }),
                                t.closed_form));
    const auto& prm = p.parameters();
    if (p.kind() == ProfileClass::I && std::abs(prm.at("m") - 2 * std::abs(p.omega())) < 1e-12)
      rep.records.push_back(below("limiting_case_f1_plus_f3", kRefInvariants, grid_max(grid, [&](double r) {
                                    const auto f = invariants(p, r);
                                    return std::abs(f.f1 + f.f3);
                                  }),
                                  t.closed_form));
  } else {
    const auto fit = detect_homogeneous(for_certification(p), grid, t.first_derivative);
    rep.records.push_back(skipped("homogeneity_fit", kRefHomogeneous,
                                  fit ? "custom profile fits alpha " + format_number(fit->alpha) + ", omega " +
                                            format_number(fit->omega)
                                      : "custom profile is not homogeneous"));
  }

  // identities on seeded random immersions, centred on the grid
  const double shift = 0.5 * (cfg.r.start + cfg.r.stop) - 1.0;
  double gauss = 0.0, codazzi = 0.0;
  std::string failure;
  for (std::uint64_t k = 0; k < 4; ++k) {
    Immersion F = random_smooth_immersion(cfg.seed + k);
    F.map = [m = F.map, shift](const Vec3& u) {
      Vec4 x = m(u);
      x[1] += shift;
      return x;
    };
    try {
      const HypersurfaceEngine e(for_certification(p), F);
      for (const auto& u : F.box.grid(2)) {
        const auto id = e.gauss_codazzi(e.forms(u));
        gauss = std::max(gauss, id.gauss);
        codazzi = std::max(codazzi, id.codazzi);
      }
    } catch (const Error& err) {
      failure = err.what();
    }
  }
  const double thr = t.classification_factor * t.nabla_h;
  if (failure.empty()) {
    rep.records.push_back(below("gauss_identity_random", kRefGaussCodazzi, gauss, thr, "seed " + std::to_string(cfg.seed)));
    rep.records.push_back(
        below("codazzi_identity_random", kRefGaussCodazzi, codazzi, thr, "seed " + std::to_string(cfg.seed)));
  } else {
    rep.records.push_back(skipped("gauss_codazzi_identity_random", kRefGaussCodazzi, failure));
  }
  return rep;
}

namespace {

struct Built {
  ProfilePair profile;
  CatalogEntry entry;
};

double param(const std::map<std::string, double>& prm, const std::string& key, double fallback) {
  const auto it = prm.find(key);
  return it == prm.end() ? fallback : it->second;
}

int eps_param(const std::map<std::string, double>& prm) {
  const double e = param(prm, "eps", -1.0);
  if (e != 1.0 && e != -1.0) throw ParameterError("eps must be +1 or -1");
  return static_cast<int>(e);
}

/// id[:variant] with family parameters; unspecified parameters take the catalog defaults.
Built build_entry(const ProfilePair& p, const std::string& spec, const std::map<std::string, double>& prm, Window w,
                  BuildOptions opt) {
  const auto colon = spec.find(':');
  const std::string id = spec.substr(0, colon);
  const std::string variant = colon == std::string::npos ? "derivation" : spec.substr(colon + 1);
  auto plain = [&](CatalogEntry e) { return Built{p, std::move(e)}; };
  if (id == "TG-a") return plain(tg_a(p, w));
  if (id == "PAR-1") return plain(par_1(p, param(prm, "c", w.mid())));
  if (id == "TG-b") {
    double dmin = std::abs(p.D(w.r_lo));
    for (double r : linspace(w.r_lo, w.r_hi, 9)) dmin = std::min(dmin, std::abs(p.D(r)));
    return plain(tg_b(p, param(prm, "rho", 0.5 * dmin), w, opt));
  }
  if (id == "PAR-2") return plain(par_2(p, param(prm, "lambda", 0.5), param(prm, "theta0", 0.3), w, opt));
  if (id == "COD-III") return plain(cod_iii(p, param(prm, "theta0", 0.3), param(prm, "kappa", 0.2), w, opt));
  if (id == "PAR-2-EX") {
    auto ex = par_2_example(param(prm, "omega", 0.8), param(prm, "rho", 1.3), param(prm, "lambda", 0.6),
                            param(prm, "theta", 0.5), param(prm, "k", 0.4), w);
    return {ex.profile, ex.entry};
  }
  if (id == "TG-c") return plain(tg_c(p, eps_param(prm), variant, w, opt));
  if (id == "PAR-3") {
    const int eps = eps_param(prm);
    const double lambda = prm.count("lambda") ? prm.at("lambda") : eps * -par_3_lambda(p, w.mid());
    const double k = param(prm, "k", variant == "theorem" ? 1.0 : 0.0);
    if (prm.count("branch")) return plain(par_3(p, lambda, k, static_cast<int>(prm.at("branch")), eps, variant, w, opt));
    try {
      return plain(par_3(p, lambda, k, 1, eps, variant, w, opt));
    } catch (const Error&) {
      return plain(par_3(p, lambda, k, -1, eps, variant, w, opt));
    }
  }
  if (id == "TG-d") return plain(tg_d(p, param(prm, "theta", 0.4), eps_param(prm), variant, w, opt));
  if (id == "PAR-4")
    return plain(par_4(p, param(prm, "k1", 1.0), param(prm, "k2", 0.0), eps_param(prm), variant, w, opt));
  if (id == "VI-E1" || id == "VI-E2") return plain(codazzi_vi(p, w).at(id == "VI-E1" ? 0 : 1));
  throw ConfigError("unknown catalog entry '" + spec + "'");
}

bool has_eps_branches(const std::string& spec) {
  const std::string id = spec.substr(0, spec.find(':'));
  return id == "TG-c" || id == "PAR-3" || id == "TG-d" || id == "PAR-4";
}

const char* error_kind(const Error& e) {
  if (dynamic_cast<const ApplicabilityError*>(&e)) return "ApplicabilityError";
  if (dynamic_cast<const ParameterError*>(&e)) return "ParameterError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const DegenerateError*>(&e)) return "DegenerateError";
  if (dynamic_cast<const NullNormalError*>(&e)) return "NullNormalError";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  return "Error";
}

std::string label(const CatalogEntry& e) {
  std::string s = e.id;
  if (!e.variant.empty()) s += ":" + e.variant;
  if (const auto it = e.params.find("eps"); it != e.params.end()) s += it->second > 0 ? " eps=+1" : " eps=-1";
  return s;
}

const char* reference_for(const CatalogEntry& e) {
  return e.id.rfind("TG", 0) == 0 ? kRefTotallyGeodesic : kRefParallel;
}

void certificate_records(Report& rep, const CatalogEntry& e, const Certificate& c, const Tolerances& t) {
  const std::string name = label(e);
  const char* ref = e.reference.empty() ? reference_for(e) : e.reference.c_str();
  const double f = t.classification_factor;
  if (!c.error.empty()) {
    rep.records.push_back({name + " evaluable", ref, 0.0, 0.0, false, false, c.error});
    return;
  }
  const auto& res = c.verdict.residuals;
  auto at = [&](const char* k) { return res.count(k) ? res.at(k) : 0.0; };
  struct Row {
    const char* check;
    double residual, threshold;
    std::optional<bool> want;
  };
  const Expected& x = e.expected;
  const std::vector<Row> rows{{"totally_geodesic", at("max_h"), f * t.h, x.totally_geodesic},
                              {"parallel", at("max_nabla_h"), f * t.nabla_h, x.parallel},
                              {"codazzi", at("codazzi_asymmetry"), f * t.nabla_h, x.codazzi},
                              {"flat", at("max_riemann"), f * t.nabla_h, x.flat},
                              {"minimal", at("max_trace"), f * t.h, x.minimal},
                              {"cmc", at("trace_variation"), f * t.nabla_h, x.cmc}};
  for (const auto& r : rows) {
    const auto it = c.checks.find(r.check);
    if (it == c.checks.end()) continue;
    rep.records.push_back({name + " " + r.check, ref, r.residual, r.threshold, it->second, false,
                           *r.want ? "expected below threshold" : "expected above threshold"});
  }
  auto plain = [&](const char* check, double residual, double threshold, const std::string& detail) {
    const auto it = c.checks.find(check);
    if (it != c.checks.end())
      rep.records.push_back({name + " " + check, ref, residual, threshold, it->second, false, detail});
  };
  plain("causal", c.verdict.eps, 0.0,
        std::string("expected ") + to_string(x.causal) + ", found " + to_string(c.verdict.causal));
  plain("proper", at("max_h"), 1e-3, "max|h| must exceed the threshold");
  plain("table", c.table_residual, f * t.h, e.note.empty() ? "closed-form h table" : e.note);
  plain("coordinates", c.coordinate_residual, f * t.h, "coordinate vectors against the frame claim");
  plain("gauss_identity", at("gauss_identity"), f * t.nabla_h, "");
  plain("codazzi_identity", at("codazzi_identity"), f * t.nabla_h, "");
  if (e.rejection_asymmetry)
    plain("rejected", *e.rejection_asymmetry, f * t.h, "antisymmetric part of the would-be h must be nonzero");
}

json expected_json(const Expected& x) {
  json j = json::object();
  auto put = [&](const char* k, const std::optional<bool>& v) {
    if (v) j[k] = *v;
  };
  put("totally_geodesic", x.totally_geodesic);
  put("parallel", x.parallel);
  put("codazzi", x.codazzi);
  put("flat", x.flat);
  put("minimal", x.minimal);
  put("cmc", x.cmc);
  j["causal"] = to_string(x.causal);
  j["proper"] = x.proper;
  return j;
}

json certificate_json(const CatalogEntry& e, const Certificate& c) {
  json j = {{"id", e.id},           {"variant", e.variant},         {"label", label(e)},
            {"reference", e.reference}, {"params", e.params},       {"expected", expected_json(e.expected)},
            {"passed", c.passed},   {"checks", c.checks}};
  if (!c.error.empty()) j["error"] = c.error;
  if (!e.note.empty()) j["note"] = e.note;
  if (e.immersion && c.error.empty()) {
    const Verdict& v = c.verdict;
    j["verdict"] = {{"totally_geodesic", v.totally_geodesic}, {"parallel", v.parallel},
                    {"codazzi", v.codazzi},                   {"semi_parallel", v.semi_parallel},
                    {"minimal", v.minimal},                   {"cmc", v.cmc},
                    {"flat", v.flat},                         {"eps", v.eps},
                    {"causal", to_string(v.causal)},          {"mean_curvature", v.mean_curvature},
                    {"chain_adjusted", v.chain_adjusted},     {"points", v.points},
                    {"residuals", v.residuals}};
    j["table_residual"] = c.table_residual;
    j["coordinate_residual"] = c.coordinate_residual;
  }
  if (e.rejection_asymmetry) j["rejection_asymmetry"] = *e.rejection_asymmetry;
  return j;
}

BuildOptions build_options(const RunConfig& cfg) {
  BuildOptions opt;
  opt.half_width = 0.5 * (cfg.box.stop - cfg.box.start);
  if (!(opt.half_width > 0.0)) throw ConfigError("box needs start < stop");
  return opt;
}

}  // namespace

Report cmd_certify_catalog(const RunConfig& cfg) {
  const ProfilePair p = load_profile(cfg);
  (void)radial_grid(p, cfg);
  Report rep;
  rep.command = "certify-catalog";
  rep.profile = p.spec();
  const Window w = cfg.window();
  const BuildOptions opt = build_options(cfg);
  const int n = cfg.box.count;

  std::vector<Built> built;
  json manifest = json::object();
  if (cfg.entries.empty()) {
    const Enumeration en = catalog_enumerate(p, w, opt);
    for (const auto& e : en.entries) built.push_back({p, e});
    for (const auto& d : en.diagnostics) {
      rep.records.push_back(skipped("applicability", kPlumbing, d));
      manifest["not applicable"].push_back(d);
    }
    if (en.entries.empty() && is_trivial(for_certification(p), cfg.r.points(), 1e-10))
      rep.records.push_back({"admissibility", kRefTrivial, 0.0, 0.0, false, false, "excluded trivial case (flat spacetime)"});
  } else {
    for (const auto& spec : cfg.entries) {
      if (spec == "ADJ") continue;
      std::vector<std::map<std::string, double>> variants{{}};
      if (has_eps_branches(spec)) variants = {{{"eps", -1.0}}, {{"eps", 1.0}}};
      for (const auto& prm : variants) {
        const std::string tag = spec + (prm.empty() ? "" : (prm.at("eps") > 0 ? " eps=+1" : " eps=-1"));
        try {
          built.push_back(build_entry(p, spec, prm, w, opt));
        } catch (const ConfigError&) {
          throw;
        } catch (const Error& e) {
          rep.records.push_back(skipped(tag, kPlumbing, std::string(error_kind(e)) + ": " + e.what()));
          manifest["not applicable"].push_back(tag + ": " + e.what());
        }
      }
    }
  }

  json certs = json::array();
  for (const auto& b : built) {
    const Certificate c = certify(b.profile, b.entry, cfg.tol, n, cfg.jobs);
    certificate_records(rep, b.entry, c, cfg.tol);
    certs.push_back(certificate_json(b.entry, c));
    manifest[label(b.entry)] = {{"reference", b.entry.reference},
                                {"params", b.entry.params},
                                {"applicable", true},
                                {"expected", expected_json(b.entry.expected)}};
    if (b.entry.immersion) {
      const UBox& bx = b.entry.immersion->box;
      manifest[label(b.entry)]["u_box"] = {{bx.lo[0], bx.hi[0]}, {bx.lo[1], bx.hi[1]}, {bx.lo[2], bx.hi[2]}};
    }
  }
  rep.payload["certificates"] = certs;
  rep.payload["manifest"] = manifest;

  const bool want_adjudication =
      cfg.entries.empty() || std::find(cfg.entries.begin(), cfg.entries.end(), "ADJ") != cfg.entries.end();
  if (want_adjudication) {
    json adj = json::array();
    for (const auto& a : adjudicate(p, w, cfg.tol, n)) {
      std::string names;
      for (const auto& v : a.passing) names += (names.empty() ? "" : ", ") + v;
      const char* ref = a.conflict.rfind("TG", 0) == 0 ? kRefTotallyGeodesic : kRefParallel;
      rep.records.push_back({"adjudication " + a.conflict, ref, static_cast<double>(a.passing.size()), 1.0, a.resolved,
                             false, "passing: " + (names.empty() ? std::string("none") : names)});
      json variants = json::array();
      for (const auto& c : a.variants)
        variants.push_back({{"variant", c.variant}, {"passed", c.passed}, {"checks", c.checks}, {"error", c.error}});
      adj.push_back({{"conflict", a.conflict}, {"passing", a.passing}, {"resolved", a.resolved}, {"variants", variants}});
    }
    rep.payload["adjudication"] = adj;
  }
  return rep;
}

namespace {

const std::vector<std::string> kScanColumns{
    "entry",     "param",   "value", "max_h", "max_nabla_h", "max_riemann", "tr_mean", "tr_variation",
    "max_trace", "tg",      "parallel", "codazzi", "flat",   "minimal",     "cmc",     "causal",
    "passed",    "error"};

bool is_profile_param(const std::string& name) {
  return name == "m" || name == "mu" || name == "omega" || name == "alpha";
}

std::vector<std::string> scan_point(const ProfilePair& p, const RunConfig& cfg, const ScanSpec& s, double value) {
  std::vector<std::string> row(kScanColumns.size());
  row[0] = s.entry;
  row[1] = s.param;
  row[2] = format_number(value);
  try {
    ProfilePair q = p;
    std::map<std::string, double> prm;
    if (is_profile_param(s.param) && s.entry != "PAR-2-EX") {
      if (!p.is_homogeneous()) throw ConfigError("profile parameter sweeps need a homogeneous profile");
      auto params = p.parameters();
      if (!params.count(s.param)) throw ConfigError("profile has no parameter '" + s.param + "'");
      params[s.param] = value;
      q = make_homogeneous(p.kind(), params);
    } else {
      prm[s.param] = value;
    }
    const Built b = build_entry(q, s.entry, prm, cfg.window(), build_options(cfg));
    const Certificate c = certify(b.profile, b.entry, cfg.tol, cfg.box.count, 1);
    if (!c.error.empty()) throw DegenerateError(c.error);
    const Verdict& v = c.verdict;
    auto flag = [](bool x) { return std::string(x ? "1" : "0"); };
    auto res = [&](const char* k) { return v.residuals.count(k) ? format_number(v.residuals.at(k)) : ""; };
    row[3] = res("max_h");
    row[4] = res("max_nabla_h");
    row[5] = res("max_riemann");
    row[6] = format_number(v.mean_curvature);
    row[7] = res("trace_variation");
    row[8] = res("max_trace");
    row[9] = flag(v.totally_geodesic);
    row[10] = flag(v.parallel);
    row[11] = flag(v.codazzi);
    row[12] = flag(v.flat);
    row[13] = flag(v.minimal);
    row[14] = flag(v.cmc);
    row[15] = to_string(v.causal);
    row[16] = flag(c.passed);
  } catch (const ConfigError& e) {
    row[17] = std::string("ConfigError: ") + e.what();
  } catch (const Error& e) {
    row[17] = std::string(error_kind(e)) + ": " + e.what();
  }
  return row;
}

}  // namespace

Report cmd_scan(const RunConfig& cfg) {
  if (!cfg.scan) throw ConfigError("scan needs an entry, a parameter and a range");
  const ProfilePair p = load_profile(cfg);
  const ScanSpec& s = *cfg.scan;
  (void)build_options(cfg);
  Report rep;
  rep.command = "scan";
  rep.profile = p.spec();
  rep.columns = kScanColumns;
  const auto values = s.range.points();
  rep.rows.resize(values.size());
  const int workers = std::clamp(cfg.jobs, 1, std::max<int>(1, static_cast<int>(values.size())));
  std::vector<std::thread> pool;
  for (int k = 0; k < workers; ++k)
    pool.emplace_back([&, k] {
      for (std::size_t i = k; i < values.size(); i += workers) rep.rows[i] = scan_point(p, cfg, s, values[i]);
    });
  for (auto& t : pool) t.join();
  rep.payload["scan"] = {{"entry", s.entry}, {"param", s.param}, {"range", s.range.str()}};
  return rep;
}

Report cmd_classify_normal(const RunConfig& cfg, const std::array<double, 4>& coeffs) {
  const ProfilePair p = for_certification(load_profile(cfg));
  const auto grid = radial_grid(p, cfg);
  const auto [a, b, c, d] = coeffs;
  const double norm = a * a - b * b - c * c - d * d;
  if (!(std::abs(std::abs(norm) - 1.0) < 1e-3))
    throw ParameterError("normal tuple must satisfy |a^2 - b^2 - c^2 - d^2| = 1, got " + format_number(norm));
  const Vec4 xi(a, b, c, d);
  Report rep;
  rep.command = "classify-normal";
  rep.profile = p.spec();
  const double thr = cfg.tol.first_derivative;
  const double residual = grid_max(grid, [&](double r) { return codazzi_normal_residual(p, r, xi); });

  auto zero = [](double x) { return std::abs(x) < 1e-12; };
  struct Case {
    const char* name;
    bool shape;
    std::function<double(const InvariantTriple&)> side;
  };
  const std::vector<Case> cases{
      {"I", zero(a) && zero(b) && zero(c), [](const InvariantTriple&) { return 0.0; }},
      {"II", zero(a) && zero(c) && zero(d), [](const InvariantTriple&) { return 0.0; }},
      {"III", zero(a) && zero(d), [](const InvariantTriple& f) { return std::abs(f.f2); }},
      {"IV", zero(b) && zero(d),
       [&](const InvariantTriple& f) { return std::abs(a * c * (f.f1 + f.f3) - (a * a + c * c) * f.f2); }},
      {"V", zero(b) && zero(c), [](const InvariantTriple& f) { return std::abs(f.f1); }},
      {"VI", zero(d), [](const InvariantTriple& f) { return std::max(std::abs(f.f2), std::abs(f.f1 + f.f3)); }},
  };
  json found = json::array();
  std::string matched, details;
  for (const auto& cs : cases) {
    if (!cs.shape) continue;
    const double side = grid_max(grid, [&](double r) { return cs.side(invariants(p, r)); });
    const bool ok = side < thr;
    found.push_back({{"case", cs.name}, {"side_condition_residual", side}, {"holds", ok}});
    details += std::string(details.empty() ? "" : "; ") + "(" + cs.name + ") side " + format_number(side);
    if (ok && matched.empty()) matched = cs.name;
  }
  rep.records.push_back(below("theorem_residual", kRefCases, residual, thr, "max over the r-grid"));
  rep.records.push_back({"classification", kRefCases, residual, thr, !matched.empty(), false,
                         matched.empty() ? "no case; residual r=" + format_number(residual) +
                                               (details.empty() ? "" : " (" + details + ")")
                                         : "case (" + matched + ")" + (details.empty() ? "" : " (" + details + ")")});
  rep.payload = {{"coeffs", coeffs}, {"case", matched.empty() ? json(nullptr) : json(matched)},
                 {"theorem_residual", residual}, {"candidates", found}};
  return rep;
}

Report run_command(std::string_view command, const RunConfig& cfg) {
  if (command == "verify-geometry") return cmd_verify_geometry(cfg);
  if (command == "certify-catalog") return cmd_certify_catalog(cfg);
  if (command == "scan") return cmd_scan(cfg);
  if (command == "classify-normal") {
    if (!cfg.coeffs) throw ConfigError("classify-normal needs four coefficients (--coeffs a,b,c,d)");
    return cmd_classify_normal(cfg, *cfg.coeffs);
  }
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

}  // namespace godel
