#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "godel/errors.hpp"
#include "godel/hypersurfaces.hpp"

using namespace godel;

namespace {

UBox box(Vec3 lo, Vec3 hi) { return {lo, hi}; }

Immersion slice_z0() {
  return {[](const Vec3& u) { return Vec4(u[0], u[1], u[2], 0.0); }, box({-0.5, 0.8, -0.5}, {0.5, 1.6, 0.5}), {},
          CausalCharacter::Timelike};
}

// r = c slice written in the coordinates of the frame E1, E3, E4
Immersion radial_slice(const ProfilePair& p, double c) {
  const double H = p.H(c), D = p.D(c);
  Immersion F;
  F.map = [=](const Vec3& u) { return Vec4(u[0] - H / D * u[1], c, u[1] / D, u[2]); };
  F.jacobian = [=](const Vec3&) {
    Tangents T = Tangents::Zero();
    T(0, 0) = 1.0;
    T(0, 1) = -H / D;
    T(2, 1) = 1.0 / D;
    T(3, 2) = 1.0;
    return T;
  };
  F.box = box({-1, -1, -1}, {1, 1, 1});
  F.expected = CausalCharacter::Timelike;
  return F;
}

// smooth random perturbation of the z = 0 slice
Immersion random_immersion(std::mt19937_64& rng) {
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
  F.box = box({-0.3, 0.8, -0.3}, {0.3, 1.2, 0.3});
  return F;
}

}  // namespace

TEST_CASE("tangent frame examples") {
  const auto p = ProfilePair::class_ii(1.0);
  const HypersurfaceEngine e(p, slice_z0());
  const Tangents T = e.tangent_frame({0.1, 1.2, 0.3});
  CHECK((T - Tangents::Identity()).cwiseAbs().maxCoeff() < 1e-10);

  const auto F = radial_slice(p, 2.0);
  const HypersurfaceEngine e2(p, F);
  const Tangents T2 = e2.tangent_frame({0.2, -0.4, 0.1});
  CHECK((T2.col(1) - Vec4(2.0, 0.0, 0.5, 0.0)).norm() < 1e-8);  // E3 at r = 2: (-H/D, 0, 1/D, 0)
  CHECK((T2 - F.jacobian({})).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("degenerate and null tangent spaces are errors") {
  const auto p = ProfilePair::class_ii(1.0);
  Immersion rank2{[](const Vec3& u) { return Vec4(u[0], 1.0 + u[1], u[1], 0.0); }, box({0, 0, 0}, {1, 1, 1})};
  CHECK_THROWS_AS(HypersurfaceEngine(p, rank2).tangent_frame({0.5, 0.5, 0.5}), DegenerateError);
  // with H = 0, t = z contains the null direction d_t + d_z orthogonal to everything else:
  // a lightlike hypersurface (its induced metric degenerates first)
  Immersion null{[](const Vec3& u) { return Vec4(u[0], 1.0 + u[1], u[2], u[0]); }, box({0, 0, 0}, {1, 1, 1})};
  CHECK_THROWS_AS(HypersurfaceEngine(ProfilePair::class_iv(1.0), null).unit_normal({0.5, 0.5, 0.5}), Error);
  // with H != 0 the same slice is an honest timelike hypersurface
  CHECK(HypersurfaceEngine(p, null).unit_normal({0.5, 0.5, 0.5}).eps == -1);
}

TEST_CASE("z = 0 slice: xi = E4, eps = -1, totally geodesic") {
  for (const auto& p : {ProfilePair::class_i(std::sqrt(2.0), 1.0), ProfilePair::class_iii(1.0, 1.0),
                        ProfilePair::parse("custom(H=\"0\",D=\"cosh(r)\")")}) {
    const HypersurfaceEngine e(p, slice_z0());
    const auto n = e.unit_normal({0.0, 1.1, 0.2});
    CHECK(n.eps == -1);
    CHECK((n.xi - Vec4(0, 0, 0, 1)).norm() < 1e-8);
    const auto f = e.forms({0.1, 1.1, -0.2});
    CHECK(f.h.cwiseAbs().maxCoeff() < 1e-7);
    for (const auto& m : f.nabla_h) CHECK(m.cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("r = c slice reproduces the closed-form h table") {
  const auto p = ProfilePair::class_ii(1.0);
  const HypersurfaceEngine e(p, radial_slice(p, 1.0));
  const auto f = e.forms({0.1, 0.2, -0.3});
  CHECK(f.normal.eps == -1);
  CHECK((f.normal.xi - Vec4(0, 1, 0, 0)).norm() < 1e-8);
  // tangents are E1, E3, E4 exactly, so coordinate h is the frame table:
  // h(E3,E3) = -D'/D = -1 and h(E1,E3) = H'/2D = -1 at r = 1
  CHECK(f.h(1, 1) == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(f.h(0, 1) == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(std::abs(f.h(0, 0)) < 1e-7);
  CHECK(std::abs(f.h(2, 2)) < 1e-7);
  CHECK(f.mean_curvature == doctest::Approx(1.0).epsilon(1e-7));  // G = diag(1,-1,-1)
  for (const auto& m : f.nabla_h) CHECK(m.cwiseAbs().maxCoeff() < 1e-6);
  for (const auto& a : f.riemann)
    for (const auto& m : a) CHECK(m.cwiseAbs().maxCoeff() < 1e-6);

  const auto Y = std::array<Vec4, 3>{Vec4::Unit(0), Vec4::Unit(2), Vec4::Unit(3)};
  const auto ff = e.frame_form(f, Y, Vec4::Unit(1));
  CHECK(ff.tangency < 1e-8);
  CHECK(ff.h(1, 1) == doctest::Approx(-1.0).epsilon(1e-7));
  // reversing the reference normal flips h
  CHECK(e.frame_form(f, Y, -Vec4::Unit(1)).h(1, 1) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("property: Gauss and Codazzi identities on random immersions") {
  std::mt19937_64 rng(2024);
  const auto profiles = std::vector<ProfilePair>{
      ProfilePair::class_ii(1.0), ProfilePair::class_i(1.3, 0.6),
      ProfilePair::parse("custom(H=\"0.3*r^3-r\",D=\"r+0.2*r^2\")").with_mode(DerivativeMode::automatic())};
  for (int n = 0; n < 6; ++n) {
    const auto F = random_immersion(rng);
    const HypersurfaceEngine e(profiles[n % profiles.size()], F);
    for (const auto& u : F.box.grid(2)) {
      const auto f = e.forms(u);
      const auto id = e.gauss_codazzi(f);
      CHECK(id.gauss < 1e-4);
      CHECK(id.codazzi < 1e-4);
      CHECK(f.h_asymmetry < 1e-6);
      // generic immersions are neither totally geodesic nor parallel
      CHECK(f.h.cwiseAbs().maxCoeff() > 1e-3);
    }
  }
}

TEST_CASE("Theorem 3.1 contractions") {
  const auto c1 = ProfilePair::class_i(std::sqrt(2.0), 1.0);
  CHECK(codazzi_normal_residual(c1, 0.9, Vec4(0, 0, 0, 1)) < 1e-14);
  CHECK(codazzi_normal_residual(c1, 0.9, Vec4(0, std::cos(0.3), std::sin(0.3), 0)) < 1e-12);
  // case IV with a*c*(f1+f3) != 0 while f2 = 0
  CHECK(codazzi_normal_residual(c1, 0.9, Vec4(std::cosh(0.4), 0, std::sinh(0.4), 0)) > 1e-2);
  // xi = cE3 + dE4 is in no case; only the pair (X5, X6) sees it
  CHECK(codazzi_normal_residual(c1, 0.9, Vec4(0, 0, 0.1, 1)) > 1e-2);
}

TEST_CASE("distribution second form of xi = E1 is asymmetric") {
  const auto s = ProfilePair::class_i(2.0, 1.0).sample(0.8);
  const auto h = distribution_second_form(s, {Vec4::Unit(1), Vec4::Unit(2), Vec4::Unit(3)}, Vec4::Unit(0));
  // h(E2,E3) = -H'/2D, h(E3,E2) = H'/2D; H'/2D = -omega
  CHECK(h(0, 1) == doctest::Approx(1.0));
  CHECK(h(1, 0) == doctest::Approx(-1.0));
}

TEST_CASE("classification implication chain and tolerance scaling") {
  const auto p = ProfilePair::class_ii(1.0);
  const HypersurfaceEngine e(p, radial_slice(p, 1.0));
  const auto grid = e.immersion().box.grid(3);
  const auto v = classify(e, grid, Tolerances{}, 2);
  CHECK_FALSE(v.totally_geodesic);
  CHECK(v.parallel);
  CHECK(v.codazzi);
  CHECK(v.semi_parallel);
  CHECK(v.flat);
  CHECK(v.cmc);
  CHECK_FALSE(v.minimal);
  CHECK(v.eps == -1);
  CHECK(v.causal == CausalCharacter::Timelike);
  CHECK_FALSE(v.chain_adjusted);
  const auto serial = classify(e, grid, Tolerances{}, 1);
  CHECK(serial.residuals == v.residuals);
  CHECK(Tolerances{}.scaled(3.0).nabla_h == doctest::Approx(3e-5));
}
