// godel-geo: command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "godel/godel_geo.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct Flags {
  std::string config, profile, r, box, out, format, entry, param, range, coeffs;
  std::vector<std::string> entries;
  double tol_closed_form = 0, tol_first_derivative = 0, tol_h = 0, tol_nabla_h = 0;
  int jobs = 0;
  unsigned long long seed = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration; flags override it");
  cmd->add_option("--profile", f.profile, "profile, e.g. class1(m=1.414,omega=1)");
  cmd->add_option("--r", f.r, "radial grid start:stop:count");
  cmd->add_option("--box", f.box, "u-box start:stop:count (use --box=-0.5:0.5:5 for negative starts)");
  cmd->add_option("--tol-closed-form", f.tol_closed_form)->check(CLI::PositiveNumber);
  cmd->add_option("--tol-first-derivative", f.tol_first_derivative)->check(CLI::PositiveNumber);
  cmd->add_option("--tol-h", f.tol_h)->check(CLI::PositiveNumber);
  cmd->add_option("--tol-nabla-h", f.tol_nabla_h)->check(CLI::PositiveNumber);
  cmd->add_option("--entries", f.entries, "catalog ids, optionally id:variant; ADJ adds adjudication")->delimiter(',');
  cmd->add_option("--out", f.out, "write the report here instead of stdout");
  cmd->add_option("--jobs", f.jobs)->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed);
  cmd->add_option("--format", f.format)->check(CLI::IsMember({"json", "csv", "table"}));
}

struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Builds the JSON handed to the library: the config file first, then every flag that was given.
std::string merged_config(const CLI::App* cmd, const Flags& f) {
  nlohmann::json doc = nlohmann::json::object();
  if (!f.config.empty()) {
    const std::string text = slurp(f.config);
    // Check the file as written so diagnostics point at its lines, not at the merged document.
    if (const godel_status s = godel_config_check(text.c_str()); s != GODEL_OK)
      throw ConfigFailure(f.config + ": " + godel_last_error());
    doc = nlohmann::json::parse(text);
  }
  auto given = [&](const char* name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--profile")) doc["profile"] = f.profile;
  if (given("--r")) doc["r"] = f.r;
  if (given("--box")) doc["box"] = f.box;
  if (!doc.contains("tol") || !doc["tol"].is_object()) {
    if (given("--tol-closed-form") || given("--tol-first-derivative") || given("--tol-h") || given("--tol-nabla-h"))
      doc["tol"] = nlohmann::json::object();
  }
  if (given("--tol-closed-form")) doc["tol"]["closed_form"] = f.tol_closed_form;
  if (given("--tol-first-derivative")) doc["tol"]["first_derivative"] = f.tol_first_derivative;
  if (given("--tol-h")) doc["tol"]["h"] = f.tol_h;
  if (given("--tol-nabla-h")) doc["tol"]["nabla_h"] = f.tol_nabla_h;
  if (given("--entries")) doc["entries"] = f.entries;
  if (given("--out")) doc["out"] = f.out;
  if (given("--jobs")) doc["jobs"] = f.jobs;
  if (given("--seed")) doc["seed"] = f.seed;
  if (given("--format")) doc["format"] = f.format;
  if (given("--entry") || given("--param") || given("--range")) {
    if (!doc.contains("scan") || !doc["scan"].is_object()) doc["scan"] = nlohmann::json::object();
    if (given("--entry")) doc["scan"]["entry"] = f.entry;
    if (given("--param")) doc["scan"]["param"] = f.param;
    if (given("--range")) doc["scan"]["range"] = f.range;
  }
  if (given("--coeffs")) {
    std::vector<double> c;
    std::stringstream ss(f.coeffs);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double x = 0;
      try {
        x = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size()) throw CLI::ValidationError("--coeffs", "expected four numbers a,b,c,d");
      c.push_back(x);
    }
    if (c.size() != 4) throw CLI::ValidationError("--coeffs", "expected four numbers a,b,c,d");
    doc["coeffs"] = c;
  }
  return doc.dump();
}

int status_exit(godel_status s) {
  switch (s) {
    case GODEL_E_PARSE:
    case GODEL_E_CONFIG:
    case GODEL_E_DOMAIN:
    case GODEL_E_PARAMETER:
    case GODEL_E_ARGUMENT:
    case GODEL_E_APPLICABILITY:
      return kExitUsage;
    default:
      return kExitInternal;
  }
}

int run(const std::string& command, const CLI::App* cmd, const Flags& f) {
  const std::string config = merged_config(cmd, f);
  godel_report* raw = nullptr;
  const godel_status s = godel_run(command.c_str(), config.c_str(), &raw);
  if (s != GODEL_OK) {
    std::cerr << "godel-geo: " << godel_status_name(s) << ": " << godel_last_error() << "\n";
    return status_exit(s);
  }
  std::unique_ptr<godel_report, decltype(&godel_report_free)> report(raw, godel_report_free);

  // The format and out path may come from the config file, so read them back from the merged document.
  std::string format = "table", out;
  if (auto doc = nlohmann::json::parse(config, nullptr, false); doc.is_object()) {
    if (doc.contains("format") && doc["format"].is_string()) format = doc["format"];
    if (doc.contains("out") && doc["out"].is_string()) out = doc["out"];
  }
  char* text = nullptr;
  if (godel_report_render(report.get(), format.c_str(), &text) != GODEL_OK) {
    std::cerr << "godel-geo: " << godel_last_error() << "\n";
    return kExitInternal;
  }
  std::unique_ptr<char, decltype(&godel_string_free)> owned(text, godel_string_free);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!(file << text)) {
      std::cerr << "godel-geo: cannot write " << out << "\n";
      return kExitInternal;
    }
    std::cout << command << ": " << godel_report_failed(report.get()) << " failed, report written to " << out << "\n";
  }
  return godel_report_exit_code(report.get());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for hypersurfaces of Goedel-type spacetimes", "godel-geo"};
  app.set_version_flag("--version", std::string(godel_version()));
  app.require_subcommand(1);

  Flags f;
  auto* verify = app.add_subcommand("verify-geometry", "frame, connection, curvature and identity checks");
  auto* certify = app.add_subcommand("certify-catalog", "certify the catalogued hypersurface families");
  auto* scan = app.add_subcommand("scan", "sweep one parameter of one family and emit CSV rows");
  auto* classify = app.add_subcommand("classify-normal", "decide which Codazzi case a constant normal satisfies");
  for (auto* c : {verify, certify, scan, classify}) add_common(c, f);
  scan->add_option("--entry", f.entry, "family id, optionally id:variant");
  scan->add_option("--param", f.param, "swept parameter");
  scan->add_option("--range", f.range, "start:stop:count; count may be 0");
  classify->add_option("--coeffs", f.coeffs, "a,b,c,d with a^2-b^2-c^2-d^2 = +-1")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (auto* c : {verify, certify, scan, classify})
      if (c->parsed()) return run(c->get_name(), c, f);
  } catch (const ConfigFailure& e) {
    std::cerr << "godel-geo: configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "godel-geo: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "godel-geo: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
