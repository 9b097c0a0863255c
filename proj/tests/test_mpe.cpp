#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "levi/levitron.hpp"
#include "levi/mpe.hpp"
#include "levi/oscillator.hpp"

using namespace levi;

namespace {

double state_distance(const PhaseState& a, const PhaseState& b) {
  return std::max(max_abs(a.q - b.q), max_abs(a.p - b.p));
}

} // namespace

TEST_CASE("rational arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, -3) == Rational(-1, 3));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
  CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
  CHECK((-Rational(5, 7)).str() == "-5/7");
  CHECK_THROWS_AS(Rational(1, 0), ValidationError);
  const Rational huge = Rational::from_int128(
      (static_cast<__int128>(1) << 100), 1);
  CHECK_THROWS_AS(huge * huge, OverflowError);
}

TEST_CASE("extrapolation weights match the printed tables") {
  const MPETable t2 = mpe_coefficients(2);
  REQUIRE(t2.c.size() == 2);
  CHECK(t2.c[0] == Rational(-1, 3));
  CHECK(t2.c[1] == Rational(4, 3));

  const MPETable t3 = mpe_coefficients(3);
  CHECK(t3.c[0] == Rational(1, 24));
  CHECK(t3.c[1] == Rational(-16, 15));
  CHECK(t3.c[2] == Rational(81, 40));

  const MPETable t4 = mpe_coefficients(4);
  CHECK(t4.c[0] == Rational(-1, 360));
  CHECK(t4.c[1] == Rational(16, 45));
  CHECK(t4.c[2] == Rational(-729, 280));
  CHECK(t4.c[3] == Rational(1024, 315));

  const MPETable t5 = mpe_coefficients(5);
  CHECK(t5.c[0] == Rational(1, 8640));
  CHECK(t5.c[1] == Rational(-64, 945));
  CHECK(t5.c[2] == Rational(6561, 4480));
  CHECK(t5.c[3] == Rational(-16384, 2835));
  CHECK(t5.c[4] == Rational(390625, 72576));
}

TEST_CASE("order conditions hold exactly for every supported table") {
  for (int n = 1; n <= 8; ++n) {
    const MPETable t = mpe_coefficients(n);
    CHECK(t.order() == 2 * n);
    CHECK(t.weight_sum() == Rational(1));
    for (int j = 1; j < n; ++j) CHECK(t.order_condition(j) == Rational(0));
  }
}

TEST_CASE("unsupported table sizes are rejected") {
  CHECK_THROWS_AS(mpe_coefficients(0), OverflowError);
  CHECK_THROWS_AS(mpe_coefficients(9), OverflowError);
}

TEST_CASE("single-term table reproduces one kernel step") {
  OscillatorModel osc(1.0, 1.0);
  PhaseState s;
  s.q[0] = 1.0;
  s.p[1] = 0.3;
  auto kernel = [&osc](const PhaseState& x, double h) {
    return verlet_separable_step(osc, x, h);
  };
  const MPETable t1 = mpe_coefficients(1);
  CHECK(mpe_step(kernel, s, 0.1, t1) == kernel(s, 0.1));
}

TEST_CASE("h = 0 is the identity for every table") {
  OscillatorModel osc(1.0, 1.0);
  PhaseState s;
  s.q[0] = 0.8;
  s.p[4] = -1.1;
  s.t = 2.5;
  auto kernel = [&osc](const PhaseState& x, double h) {
    return verlet_separable_step(osc, x, h);
  };
  for (int n = 1; n <= 4; ++n)
    CHECK(mpe_step(kernel, s, 0.0, mpe_coefficients(n)) == s);
}

TEST_CASE("an exact-flow kernel passes through every table") {
  OscillatorModel osc(1.0, 1.0);
  PhaseState s;
  s.q[0] = 1.0;
  s.p[2] = 0.4;
  auto exact = [&osc](const PhaseState& x, double h) {
    return osc.exact_flow(x, h);
  };
  const PhaseState flow = osc.exact_flow(s, 0.2);
  for (int n = 1; n <= 5; ++n) {
    const PhaseState out = mpe_step(exact, s, 0.2, mpe_coefficients(n));
    CHECK(state_distance(out, flow) <= 1e-13);
  }
  const PhaseState rich = richardson3_step(exact, s, 0.2, 3);
  CHECK(state_distance(rich, flow) <= 1e-13);
}

TEST_CASE("richardson with k = 2 coincides with the n = 2 table") {
  OscillatorModel osc(1.0, 1.0);
  PhaseState s;
  s.q[0] = 1.0;
  s.p[0] = -0.6;
  auto kernel = [&osc](const PhaseState& x, double h) {
    return verlet_separable_step(osc, x, h);
  };
  const PhaseState a = richardson3_step(kernel, s, 0.1, 2);
  const PhaseState b = mpe_step(kernel, s, 0.1, mpe_coefficients(2));
  CHECK(a == b);
  CHECK_THROWS_AS(richardson3_step(kernel, s, 0.1, 1), ValidationError);
}

TEST_CASE("richardson extrapolation reaches at least third order") {
  OscillatorModel osc(1.0, 1.0);
  PhaseState s;
  s.q[0] = 1.0;
  auto kernel = [&osc](const PhaseState& x, double h) {
    return verlet_separable_step(osc, x, h);
  };
  const double T = 2.0;
  std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  std::vector<double> errs;
  for (const double h : hs) {
    PhaseState x = s;
    const long steps = std::lround(T / h);
    for (long i = 0; i < steps; ++i) x = richardson3_step(kernel, x, h, 2);
    errs.push_back(state_distance(x, osc.exact_flow(s, T)));
  }
  double slope_min = 1e9;
  for (std::size_t i = 1; i < hs.size(); ++i)
    slope_min = std::min(slope_min, std::log(errs[i - 1] / errs[i]) /
                                        std::log(hs[i - 1] / hs[i]));
  CHECK(slope_min >= 3.0);
}

TEST_CASE("iterative extrapolation reduces to the separable kernel result") {
  OscillatorModel osc(1.0, 1.0);
  PhaseState s;
  s.q[0] = 1.0;
  s.p[3] = 0.9;
  auto kernel = [&osc](const PhaseState& x, double h) {
    return verlet_separable_step(osc, x, h);
  };
  for (int n : {2, 3}) {
    const MPETable t = mpe_coefficients(n);
    const PhaseState plain = mpe_step(kernel, s, 0.05, t);
    IterationConfig cfg;
    cfg.max_iters = 4;
    cfg.tol = 1e-30;
    const StepReport rep = iterative_mpe_step(osc, s, 0.05, t, cfg);
    CHECK(state_distance(rep.new_state, plain) <= 1e-14);
    CHECK(rep.iterations_used >= 2);
  }
}

TEST_CASE("one sweep with previous-step start is the frozen-gradient step") {
  LevitronParams lp;
  lp.a = 0.1;
  lp.c = 0.1;
  lp.M = calibrate_M(1.72);
  const LevitronModel m(lp);
  PhaseState s = spinning_start(1.72, 0.2, 1.4);
  s.p[0] = 0.3;
  const MPETable t = mpe_coefficients(2);

  IterationConfig cfg;
  cfg.max_iters = 1;
  cfg.init = InitScheme::PreviousStep;
  const StepReport rep = iterative_mpe_step(m, s, 1e-3, t, cfg);

  const Vec6 frozen = s.p;
  auto kernel = [&](const PhaseState& x, double h) {
    return detail::vv_sweep(m, x, h, frozen);
  };
  CHECK(rep.new_state == mpe_step(kernel, s, 1e-3, t));
}

TEST_CASE("extrapolated steps conserve the spin momentum bit-exactly") {
  LevitronParams lp;
  lp.a = 0.1;
  lp.c = 0.1;
  lp.M = calibrate_M(1.72);
  const LevitronModel m(lp);
  PhaseState x = spinning_start(1.72, 0.01, 1.6);
  const double p6 = x.p[5];
  IterationConfig cfg;
  const MPETable t3 = mpe_coefficients(3);
  for (int i = 0; i < 500; ++i)
    x = iterative_mpe_step(m, x, 1e-3, t3, cfg).new_state;
  CHECK(x.p[5] == p6);
}
