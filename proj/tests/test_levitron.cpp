#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "levi/levitron.hpp"
#include "oracles.hpp"

using namespace levi;

namespace {
constexpr double kPi = 3.14159265358979323846;

LevitronModel unit_model(double M) {
  LevitronParams p;
  p.a = 1.0;
  p.c = 1.0;
  p.M = M;
  return LevitronModel(p);
}
} // namespace

TEST_CASE("parameter validation") {
  LevitronParams p;
  p.a = 0.0;
  CHECK_THROWS_AS(LevitronModel(p), ValidationError);
  p.a = 1.0;
  p.M = -1.0;
  CHECK_THROWS_AS(LevitronModel(p), ValidationError);
  p.M = 0.0;
  p.sin_guard = 1.5;
  CHECK_THROWS_AS(LevitronModel(p), ValidationError);
}

TEST_CASE("energy at the horizontal-axis on-axis point is q3") {
  PhaseState s;
  s.q = Vec6{{0.0, 0.0, 1.72, kPi / 2.0, 0.0, 0.0}};
  // transverse potential gradient vanishes on axis and cos(q4) ~ 0, so the
  // magnetic term drops out for any M
  for (double M : {0.0, 1.0, 8.2}) {
    CHECK_THAT(unit_model(M).energy(s),
               Catch::Matchers::WithinAbs(1.72, 1e-14));
  }
  s.p[0] = 1.0;
  CHECK_THAT(unit_model(8.2).energy(s),
             Catch::Matchers::WithinAbs(2.22, 1e-14));
}

TEST_CASE("for M = 0 and q4 = pi/2 the energy is exactly q3 + kinetic") {
  const LevitronModel m = unit_model(0.0);
  PhaseState s;
  s.q = Vec6{{0.4, -0.2, 2.3, kPi / 2.0, 1.0, 2.0}};
  CHECK(m.energy(s) == s.q[2]);
}

TEST_CASE("dH_dp examples") {
  const LevitronModel m = unit_model(3.0);
  PhaseState s;
  s.q = Vec6{{0.1, 0.2, 1.5, kPi / 2.0, 0.7, 0.3}};

  SECTION("zero momentum gives zero velocity") {
    const Vec6 v = m.dH_dp(s);
    for (int i = 0; i < 6; ++i) CHECK(v[i] == 0.0);
  }

  SECTION("a = c = 1, q4 = pi/2, p5 = p6 = 1 gives components 5 and 6 = 1") {
    s.p[4] = 1.0;
    s.p[5] = 1.0;
    const Vec6 v = m.dH_dp(s);
    CHECK_THAT(v[4], Catch::Matchers::WithinAbs(1.0, 1e-15));
    CHECK_THAT(v[5], Catch::Matchers::WithinAbs(1.0, 1e-15));
  }

  SECTION("component 1 is p1 for any state") {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 50; ++n) {
      const PhaseState r = oracles::random_levitron_state(rng);
      CHECK(m.dH_dp(r)[0] == r.p[0]);
    }
  }
}

TEST_CASE("q6 is cyclic: force component 6 is identically zero") {
  std::mt19937_64 rng(5);
  const LevitronModel m = unit_model(7.3);
  for (int n = 0; n < 200; ++n) {
    const PhaseState s = oracles::random_levitron_state(rng);
    CHECK(m.dH_dq(s)[5] == 0.0);
  }
}

TEST_CASE("with M = 0 and p5 = p6 = 0 only gravity remains") {
  std::mt19937_64 rng(6);
  const LevitronModel m = unit_model(0.0);
  for (int n = 0; n < 50; ++n) {
    PhaseState s = oracles::random_levitron_state(rng);
    s.p[4] = 0.0;
    s.p[5] = 0.0;
    const Vec6 g = m.dH_dq(s);
    const Vec6 expect{{0.0, 0.0, 1.0, 0.0, 0.0, 0.0}};
    for (int i = 0; i < 6; ++i) CHECK(g[i] == expect[i]);
  }
}

TEST_CASE("gradients match central finite differences of the energy") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ua(0.1, 2.0), uM(0.0, 12.0);
  for (int n = 0; n < 200; ++n) {
    LevitronParams p;
    p.a = ua(rng);
    p.c = ua(rng);
    p.M = uM(rng);
    const LevitronModel m(p);
    const PhaseState s = oracles::random_levitron_state(rng);
    auto energy = [&m](const PhaseState& x) { return m.energy(x); };
    CHECK(oracles::grad_close(m.dH_dq(s), oracles::fd_grad_q(energy, s), 1e-6));
    CHECK(oracles::grad_close(m.dH_dp(s), oracles::fd_grad_p(energy, s), 1e-6));
  }
}

TEST_CASE("the coordinate guard rejects near-singular tilts") {
  const LevitronModel m = unit_model(1.0);
  PhaseState s;
  s.q = Vec6{{0.0, 0.0, 1.72, 1e-9, 0.0, 0.0}};
  CHECK_FALSE(m.admissible(s));
  CHECK_THROWS_AS(m.energy(s), SingularityError);
  CHECK_THROWS_AS(m.dH_dp(s), SingularityError);
  CHECK_THROWS_AS(m.dH_dq(s), SingularityError);
  s.q[3] = 0.0;
  CHECK_THROWS_AS(m.energy(s), SingularityError);
}

TEST_CASE("energy is invariant under the transverse mirror symmetry") {
  std::mt19937_64 rng(8);
  const LevitronModel m = unit_model(5.5);
  for (int n = 0; n < 100; ++n) {
    const PhaseState s = oracles::random_levitron_state(rng);
    PhaseState f = s;
    f.q[0] = -s.q[0];
    f.q[1] = -s.q[1];
    f.p[0] = -s.p[0];
    f.p[1] = -s.p[1];
    f.q[4] = s.q[4] + kPi;
    const double h0 = m.energy(s);
    CHECK_THAT(m.energy(f),
               Catch::Matchers::WithinAbs(h0, 1e-12 * std::max(1.0, std::abs(h0))));
  }
}

TEST_CASE("for M = 0 the gauge H - q3 depends only on p and q4") {
  std::mt19937_64 rng(9);
  const LevitronModel m = unit_model(0.0);
  for (int n = 0; n < 50; ++n) {
    const PhaseState s = oracles::random_levitron_state(rng);
    PhaseState other = oracles::random_levitron_state(rng);
    other.p = s.p;
    other.q[3] = s.q[3];
    const double gauge = m.energy(s) - s.q[2];
    // equal up to the rounding of the q3 addition itself
    CHECK_THAT(m.energy(other) - other.q[2],
               Catch::Matchers::WithinAbs(gauge,
                                          1e-14 * std::max(1.0, std::abs(gauge))));
  }
}

TEST_CASE("equilibrium calibration") {
  const double z = 1.72;

  SECTION("plugged-back residual vanishes") {
    const double M = calibrate_M(z);
    CHECK(M > 0.0);
    CHECK(std::abs(vertical_force_residual(M, z)) < 1e-12);
  }

  SECTION("matches the bisection oracle to 1e-10") {
    const double M = calibrate_M(z);
    const double M_bis = oracles::bisect(
        [z](double mm) { return vertical_force_residual(mm, z); }, 0.0, 1e3,
        1e-11);
    CHECK_THAT(M, Catch::Matchers::WithinAbs(M_bis, 1e-10));
  }

  SECTION("doubling gravity doubles M") {
    const double M1 = calibrate_M(z);
    const double M2 = calibrate_M(z, 0.0, 0.0, 2.0);
    CHECK_THAT(M2, Catch::Matchers::WithinAbs(2.0 * M1, 1e-12 * M1));
  }

  SECTION("no equilibrium when the magnetic vertical force vanishes") {
    // with the axis horizontal the on-axis magnetic vertical force is zero
    CHECK_THROWS_AS(calibrate_M(z, kPi / 2.0), NoEquilibriumError);
  }

  SECTION("rejects nonpositive height") {
    CHECK_THROWS_AS(calibrate_M(0.0), ValidationError);
  }

  SECTION("residual function agrees with the model force") {
    LevitronParams p;
    p.a = 0.7;
    p.c = 0.4;
    p.M = 3.0;
    const LevitronModel m(p);
    PhaseState s;
    s.q = Vec6{{0.0, 0.0, 1.9, 0.3, 0.0, 0.0}};
    CHECK_THAT(-m.dH_dq(s)[2],
               Catch::Matchers::WithinAbs(
                   vertical_force_residual(3.0, 1.9, 0.3), 1e-15));
  }
}

TEST_CASE("spinning start uses the pure-spin momentum convention") {
  const PhaseState s = spinning_start(1.72, 0.01, 1.6);
  CHECK(s.q[2] == 1.72);
  CHECK(s.q[3] == 0.01);
  CHECK(s.p[5] == 1.6);
  CHECK(s.p[4] == 1.6 * std::cos(0.01));
  // the reduced kinetic term (p5 - p6 cos q4)^2 vanishes at the start
  CHECK(s.p[4] - s.p[5] * std::cos(s.q[3]) == 0.0);
}
