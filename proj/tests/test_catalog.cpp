#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "godel/catalog.hpp"
#include "godel/errors.hpp"

using namespace godel;

namespace {

const Tolerances kTol;
const Window kWin;

ProfilePair sqrt_profile() {
  return ProfilePair::custom(Expression::parse("sqrt(1+r^2)"), Expression::parse("r"));
}

Certificate run(const ProfilePair& p, const CatalogEntry& e, int n = 3) { return certify(p, e, kTol, n); }

std::string failed(const Certificate& c) {
  std::string out = c.error;
  for (const auto& [k, ok] : c.checks)
    if (!ok) out += " " + k;
  return out;
}

}  // namespace

TEST_CASE("radial slice: h table and mean curvature D'(c)/D(c)") {
  const auto p = ProfilePair::class_i(2.0, 1.0);
  const double c = 1.2;
  const auto e = par_1(p, c);
  const auto cert = run(p, e);
  INFO(failed(cert));
  CHECK(cert.passed);
  // D = sinh(2r)/2, so D'/D = 2 coth(2c) with the orientation xi = E2
  CHECK(std::abs(cert.verdict.mean_curvature) == doctest::Approx(2.0 / std::tanh(2 * c)).epsilon(1e-7));
  CHECK(cert.verdict.cmc);
  CHECK_FALSE(cert.verdict.minimal);
}

TEST_CASE("radial slice is minimal exactly where D' vanishes") {
  // class 4 with alpha < 0: D = sin(r), D'(pi/2) = 0
  const auto p = ProfilePair::class_iv(-1.0);
  const auto e = par_1(p, M_PI / 2);
  CHECK(*e.expected.minimal);
  const auto cert = run(p, e);
  INFO(failed(cert));
  CHECK(cert.passed);
  CHECK(cert.verdict.minimal);
}

TEST_CASE("trivial slice is totally geodesic on every profile") {
  for (const auto& p : {ProfilePair::class_i(1.0, 1.0), ProfilePair::class_ii(0.5), sqrt_profile()}) {
    const auto cert = run(p, tg_a(p, kWin));
    INFO(failed(cert));
    CHECK(cert.passed);
  }
}

TEST_CASE("TG-b keeps h(Y1, Y2) = -H'/(2D) and is not totally geodesic") {
  const auto p = ProfilePair::class_i(2.0, 1.0);
  const auto e = tg_b(p, 0.3, kWin);
  const auto cert = run(p, e);
  CHECK_FALSE(cert.passed);
  CHECK(cert.checks.at("totally_geodesic") == false);
  CHECK(cert.checks.at("table"));
  CHECK(cert.checks.at("coordinates"));
  // |H'/(2D)| = omega = 1 for class I
  CHECK(cert.verdict.residuals.at("max_h") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cert.verdict.parallel);
}

TEST_CASE("TG-b is totally geodesic once H' = 0") {
  const auto p = ProfilePair::class_iv(1.0);
  const auto cert = run(p, tg_b(p, 0.4, kWin));
  INFO(failed(cert));
  CHECK(cert.passed);
}

TEST_CASE("type III families refuse profiles with f2 != 0") {
  const auto p = sqrt_profile();
  CHECK_THROWS_AS(tg_b(p, 0.1, kWin), ApplicabilityError);
  CHECK_THROWS_AS(par_2(p, 0.5, 0.3, kWin), ApplicabilityError);
  CHECK_NOTHROW(par_2(p, 0.5, 0.3, kWin, {.force = true}));
}

TEST_CASE("PAR-2: parallel, flat, trace -lambda; lambda = 0 is minimal") {
  const auto p = ProfilePair::class_ii(1.0);
  for (double lambda : {0.7, 0.0}) {
    const auto cert = run(p, par_2(p, lambda, 0.2, kWin));
    INFO(lambda, failed(cert));
    CHECK(cert.passed);
    CHECK(std::abs(cert.verdict.mean_curvature) == doctest::Approx(std::abs(lambda)).epsilon(1e-6));
    CHECK(cert.verdict.minimal == (lambda == 0.0));
  }
}

TEST_CASE("PAR-2 property: random homogeneous profiles and parameters") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> om(0.3, 1.5), lam(-1.0, 1.0), th(-0.6, 0.6), mm(0.5, 2.5);
  for (int trial = 0; trial < 6; ++trial) {
    const double omega = om(rng);
    const auto p = trial % 2 ? ProfilePair::class_ii(omega) : ProfilePair::class_i(mm(rng), omega);
    const double lambda = lam(rng), theta0 = th(rng);
    const auto cert = run(p, par_2(p, lambda, theta0, kWin));
    INFO(p.spec(), " lambda=", lambda, " theta0=", theta0, failed(cert));
    CHECK(cert.passed);
  }
}

TEST_CASE("COD-III property: Codazzi and flat but not parallel") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> k(-0.5, 0.5), th(-0.5, 0.5);
  for (int trial = 0; trial < 4; ++trial) {
    const auto p = ProfilePair::class_iii(1.0, 0.5 + 0.2 * trial);
    const auto cert = run(p, cod_iii(p, th(rng), k(rng), kWin));
    INFO(failed(cert));
    CHECK(cert.passed);
    CHECK(cert.verdict.codazzi);
    CHECK_FALSE(cert.verdict.parallel);
  }
}

TEST_CASE("constant-angle example: profile fit and certificate") {
  const double omega = 0.8, rho = 1.3, lambda = 0.6, theta = 0.5, k = 0.4;
  const auto ex = par_2_example(omega, rho, lambda, theta, k, kWin);
  const auto grid = linspace(kWin.r_lo, kWin.r_hi, 9);
  const auto fit = detect_homogeneous(ex.profile, grid, 1e-8);
  REQUIRE(fit);
  const double c2 = std::cos(theta) * std::cos(theta);
  CHECK(fit->alpha == doctest::Approx(lambda * lambda / c2).epsilon(1e-9));
  CHECK(fit->omega == doctest::Approx(omega / c2).epsilon(1e-9));
  const auto cert = run(ex.profile, ex.entry);
  INFO(failed(cert));
  CHECK(cert.passed);
  CHECK(std::abs(cert.verdict.mean_curvature) == doctest::Approx(lambda).epsilon(1e-6));
}

TEST_CASE("type III constraint residual evaluates the stated expression") {
  // rho = 0: G1' = 0, G2' = 1, G3' = 0, so the residual is D^2 - (H - 1)^2
  const auto p = ProfilePair::class_i(2.0, 1.0);
  const auto e = tg_b(p, 0.0, kWin);
  const double r = (*e.immersion)(e.immersion->box.center())[1];
  const double expect = p.D(r) * p.D(r) - (p.H(r) - 1) * (p.H(r) - 1);
  CHECK(type_iii_constraint_residual(p, e) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("quarter-log angle on the custom profile satisfies sinh(2 theta) = r") {
  const auto p = for_certification(sqrt_profile());
  const auto law = ThetaLaw::quarter_log();
  for (double r : {0.9, 1.2, 1.5}) CHECK(std::sinh(2 * law.radial(p.sample(r))) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("TG-c derivation is totally geodesic with the causal character of eps") {
  const auto p = sqrt_profile();
  for (int eps : {-1, 1}) {
    const auto cert = run(p, tg_c(p, eps, "derivation", kWin));
    INFO(eps, failed(cert));
    CHECK(cert.passed);
    CHECK(cert.verdict.causal == causal_from_eps(eps));
  }
}

TEST_CASE("TG-c refuses profiles where the distribution does not integrate") {
  const auto p = ProfilePair::class_iii(1.0, 0.3);
  CHECK_THROWS_AS(tg_c(p, -1, "derivation", kWin), ApplicabilityError);
}

TEST_CASE("PAR-3 lambda in the limiting case is -omega") {
  const auto p = ProfilePair::class_i(2.0, 1.0);
  for (double r : {0.9, 1.3}) CHECK(par_3_lambda(p, r) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("PAR-3 derivation passes and eps = +1 is impossible in the limiting case") {
  const auto p = ProfilePair::class_i(2.0, 1.0);
  const auto cert = run(p, par_3(p, -1.0, 0.0, 1, -1, "derivation", kWin));
  INFO(failed(cert));
  CHECK(cert.passed);
  CHECK(cert.verdict.minimal);
  CHECK_THROWS_AS(par_3(p, 1.0, 0.0, 1, 1, "derivation", kWin), ApplicabilityError);
  CHECK_THROWS_AS(par_3(p, 0.0, 0.0, 1, -1, "derivation", kWin), ParameterError);
}

TEST_CASE("TG-d and PAR-4 on constant-H profiles") {
  const auto p = ProfilePair::class_iv(1.0);
  for (int eps : {-1, 1}) {
    const auto a = run(p, tg_d(p, 0.4, eps, "derivation", kWin));
    INFO(eps, failed(a));
    CHECK(a.passed);
    const auto b = run(p, par_4(p, 1.5, 0.2, eps, "derivation", kWin));
    INFO(failed(b));
    CHECK(b.passed);
    // tr h = -eps k1 for the continued normal; only the size is orientation free
    CHECK(std::abs(b.verdict.mean_curvature) == doctest::Approx(1.5).epsilon(1e-6));
  }
  CHECK_THROWS_AS(tg_d(ProfilePair::class_ii(1.0), 0.4, 1, "derivation", kWin), ApplicabilityError);
}

TEST_CASE("limiting case: xi = E1 is rejected by an asymmetry of 2 omega") {
  const auto p = ProfilePair::class_i(2.0, 1.0);
  const auto entries = codazzi_vi(p, kWin);
  REQUIRE(entries.size() == 2);
  REQUIRE(entries[0].rejection_asymmetry);
  CHECK(*entries[0].rejection_asymmetry == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(run(p, entries[0]).passed);
  CHECK(run(p, entries[1]).passed);
  CHECK_THROWS_AS(codazzi_vi(ProfilePair::class_i(1.0, 1.0), kWin), ApplicabilityError);
}

TEST_CASE("enumeration excludes the flat profile and lists applicable families") {
  const auto flat = ProfilePair::custom(Expression::parse("2"), Expression::parse("r"));
  const auto none = catalog_enumerate(flat, kWin);
  CHECK(none.entries.empty());
  CHECK_FALSE(none.diagnostics.empty());

  const auto all = catalog_enumerate(ProfilePair::class_i(2.0, 1.0), kWin);
  std::vector<std::string> ids;
  for (const auto& e : all.entries) ids.push_back(e.id);
  for (const char* want : {"TG-a", "PAR-1", "TG-b", "PAR-2", "COD-III", "TG-c", "PAR-3", "VI-E1", "VI-E2"})
    CHECK(std::find(ids.begin(), ids.end(), want) != ids.end());
}

TEST_CASE("adjudication: labels and scale factor resolve, the sign conflict does not") {
  const auto lim = adjudicate(ProfilePair::class_i(2.0, 1.0), kWin, kTol, 3);
  int seen = 0;
  for (const auto& a : lim) {
    INFO(a.conflict);
    CHECK(a.resolved);
    REQUIRE(a.passing.size() == 1);
    CHECK(a.passing[0] == "derivation");
    ++seen;
  }
  CHECK(seen == 3);  // two TG-c branches and one PAR-3 branch
  const auto v = adjudicate(ProfilePair::class_iv(1.0), kWin, kTol, 3);
  int sign_conflicts = 0;
  for (const auto& a : v)
    if (a.conflict.rfind("PAR-4", 0) == 0) {
      ++sign_conflicts;
      CHECK(a.passing.size() == 2);
      CHECK_FALSE(a.resolved);
    }
  CHECK(sign_conflicts == 2);
}

TEST_CASE("certificates do not depend on the number of jobs") {
  const auto p = ProfilePair::class_ii(1.0);
  const auto e = par_2(p, 0.4, 0.1, kWin);
  const auto a = certify(p, e, kTol, 3, 1), b = certify(p, e, kTol, 3, 4);
  CHECK(a.passed == b.passed);
  CHECK(a.verdict.residuals == b.verdict.residuals);
}
