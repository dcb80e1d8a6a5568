#include "godel/godel_geo.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "godel/commands.hpp"
#include "godel/errors.hpp"

struct godel_profile {
  godel::ProfilePair pair;
};

struct godel_report {
  godel::Report report;
};

namespace {

thread_local std::string last_error;

godel_status fail(godel_status s, const char* what) {
  last_error = what;
  return s;
}

// Runs f, mapping the engine's exceptions onto status codes.
template <class F>
godel_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return GODEL_OK;
  } catch (const godel::DomainError& e) {
    return fail(GODEL_E_DOMAIN, e.what());
  } catch (const godel::ParseError& e) {
    return fail(GODEL_E_PARSE, e.what());
  } catch (const godel::DegenerateError& e) {
    return fail(GODEL_E_DEGENERATE, e.what());
  } catch (const godel::NullNormalError& e) {
    return fail(GODEL_E_NULL_NORMAL, e.what());
  } catch (const godel::ParameterError& e) {
    return fail(GODEL_E_PARAMETER, e.what());
  } catch (const godel::ApplicabilityError& e) {
    return fail(GODEL_E_APPLICABILITY, e.what());
  } catch (const godel::ConfigError& e) {
    return fail(GODEL_E_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(GODEL_E_INTERNAL, e.what());
  } catch (...) {
    return fail(GODEL_E_INTERNAL, "unknown failure");
  }
}

#define REQUIRE_ARG(cond)                                          \
  do {                                                             \
    if (!(cond)) return fail(GODEL_E_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

}  // namespace

extern "C" {

const char* godel_version(void) { return "1.0.0"; }

const char* godel_last_error(void) { return last_error.c_str(); }

const char* godel_status_name(godel_status status) {
  switch (status) {
    case GODEL_OK: return "ok";
    case GODEL_E_DOMAIN: return "domain error";
    case GODEL_E_PARSE: return "parse error";
    case GODEL_E_DEGENERATE: return "degenerate immersion";
    case GODEL_E_NULL_NORMAL: return "null normal";
    case GODEL_E_PARAMETER: return "parameter error";
    case GODEL_E_APPLICABILITY: return "not applicable";
    case GODEL_E_CONFIG: return "configuration error";
    case GODEL_E_ARGUMENT: return "invalid argument";
    case GODEL_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

godel_status godel_profile_parse(const char* spec, godel_profile** out) {
  REQUIRE_ARG(spec && out);
  *out = nullptr;
  return guarded([&] { *out = new godel_profile{godel::ProfilePair::parse(spec)}; });
}

void godel_profile_free(godel_profile* profile) { delete profile; }

godel_status godel_profile_sample(const godel_profile* profile, double r, double out[6]) {
  REQUIRE_ARG(profile && out);
  return guarded([&] {
    const auto s = profile->pair.sample(r);
    const double v[6] = {s.H, s.Hp, s.Hpp, s.D, s.Dp, s.Dpp};
    std::memcpy(out, v, sizeof v);
  });
}

godel_status godel_profile_invariants(const godel_profile* profile, double r, double out[3]) {
  REQUIRE_ARG(profile && out);
  return guarded([&] {
    const auto f = godel::invariants(profile->pair, r);
    out[0] = f.f1;
    out[1] = f.f2;
    out[2] = f.f3;
  });
}

godel_status godel_frame_connection(const godel_profile* profile, double r, double out[64]) {
  REQUIRE_ARG(profile && out);
  return guarded([&] {
    const auto c = godel::frame_connection(profile->pair, r);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) out[16 * i + 4 * j + k] = c.nabla[i][j][k];
  });
}

godel_status godel_frame_curvature(const godel_profile* profile, double r, double out[256]) {
  REQUIRE_ARG(profile && out);
  return guarded([&] {
    const auto R = godel::frame_curvature(profile->pair, r);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) out[64 * i + 16 * j + 4 * k + l] = R.R[i][j][k][l];
  });
}

godel_status godel_codazzi_normal_residual(const godel_profile* profile, double r, const double coeffs[4],
                                           double* out) {
  REQUIRE_ARG(profile && coeffs && out);
  return guarded([&] {
    *out = godel::codazzi_normal_residual(profile->pair, r, godel::Vec4(coeffs[0], coeffs[1], coeffs[2], coeffs[3]));
  });
}

godel_status godel_config_check(const char* config_json) {
  REQUIRE_ARG(config_json);
  return guarded([&] { (void)godel::RunConfig::from_json(config_json); });
}

godel_status godel_run(const char* command, const char* config_json, godel_report** out) {
  REQUIRE_ARG(command && config_json && out);
  *out = nullptr;
  return guarded([&] {
    const auto cfg = godel::RunConfig::from_json(config_json);
    *out = new godel_report{godel::run_command(command, cfg)};
  });
}

void godel_report_free(godel_report* report) { delete report; }

int godel_report_exit_code(const godel_report* report) { return report ? report->report.exit_code() : 1; }

size_t godel_report_failed(const godel_report* report) { return report ? report->report.failed() : 0; }

godel_status godel_report_render(const godel_report* report, const char* format, char** out) {
  REQUIRE_ARG(report && format && out);
  *out = nullptr;
  return guarded([&] {
    const std::string text = report->report.render(format);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void godel_string_free(char* s) { std::free(s); }

}  // extern "C"
