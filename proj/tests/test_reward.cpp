#include <doctest.h>

#include <cmath>

#include "deepen/reward.hpp"

using namespace deepen;

namespace {
const RewardConfig kCfg;
}

TEST_CASE("terminal reward is +/- r_T") {
  CHECK(terminal_reward(0, kCfg) == 15.0);
  CHECK(terminal_reward(1, kCfg) == -15.0);
  RewardConfig zero = kCfg;
  zero.r_terminal = 0.0;
  CHECK(terminal_reward(0, zero) == 0.0);
  CHECK(terminal_reward(1, zero) == 0.0);
}

TEST_CASE("physiological reward hand cases") {
  CHECK(phys_reward(5, 5, 2.0, 2.0, kCfg) == doctest::Approx(-0.025).epsilon(1e-9));
  CHECK(phys_reward(0, 0, 1.0, 1.0, kCfg) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(phys_reward(6, 4, 3.0, 2.0, kCfg) == doctest::Approx(1.7731883119115297).epsilon(1e-9));
}

TEST_CASE("shaping function hand cases") {
  CHECK(std::abs(shaping_f(160.0, kCfg.glucose_range) - 2.0) < 1e-8);
  CHECK(std::abs(shaping_f(140.0, kCfg.glucose_range) - 1.0) < 1e-15);
  CHECK(shaping_f(-1e5, kCfg.glucose_range) == doctest::Approx(0.0).epsilon(1e-30));
}

TEST_CASE("shaping function is unimodal and bounded in (0, 2)") {
  double prev = shaping_f(40.0, kCfg.glucose_range);
  for (double x = 41.0; x <= 140.0; x += 1.0) {
    const double f = shaping_f(x, kCfg.glucose_range);
    CHECK(f > prev);  // increasing below the lower bound
    prev = f;
  }
  prev = shaping_f(180.0, kCfg.glucose_range);
  for (double x = 181.0; x <= 300.0; x += 1.0) {
    const double f = shaping_f(x, kCfg.glucose_range);
    CHECK(f < prev);  // decreasing above the upper bound
    prev = f;
  }
  for (double x = 0.0; x <= 400.0; x += 0.5) {
    const double f = shaping_f(x, kCfg.glucose_range);
    CHECK(f > 0.0);
    CHECK(f < 2.0);
  }
}

TEST_CASE("normalized deviation hand cases and shape") {
  CHECK(deviation(200.0, kCfg.glucose_range) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(deviation(160.0, kCfg.glucose_range) == 0.0);
  CHECK(deviation(1.5, kCfg.phosphate_range) == doctest::Approx(0.5).epsilon(1e-12));
  // Zero exactly on the range, piecewise linear outside.
  for (double x = 140.0; x <= 180.0; x += 1.0) CHECK(deviation(x, kCfg.glucose_range) == 0.0);
  CHECK(deviation(190.0, kCfg.glucose_range) == doctest::Approx(0.25));
  CHECK(deviation(130.0, kCfg.glucose_range) == doctest::Approx(0.25));
}

TEST_CASE("biomarker reward hand cases") {
  CHECK(biomarker_reward(200.0, 180.0, kCfg.glucose_range, kCfg.epsilon) ==
        doctest::Approx(1.1).epsilon(1e-7));
  CHECK(std::abs(biomarker_reward(160.0, 160.0, kCfg.glucose_range, kCfg.epsilon) - 2.0) < 1e-8);
  // Worsening earns no bonus: the positive-part operator zeroes it.
  CHECK(biomarker_reward(180.0, 200.0, kCfg.glucose_range, kCfg.epsilon) ==
        shaping_f(200.0, kCfg.glucose_range));
}

TEST_CASE("improvement bonus is never negative") {
  for (double pre = 50.0; pre <= 350.0; pre += 7.0) {
    for (double post = 50.0; post <= 350.0; post += 7.0) {
      const double r = biomarker_reward(pre, post, kCfg.glucose_range, kCfg.epsilon);
      CHECK(r >= shaping_f(post, kCfg.glucose_range));
    }
  }
}

TEST_CASE("total reward case split") {
  RewardInputs term;
  term.terminal = true;
  term.mortality = 0;
  term.glucose_t1 = 40.0;  // terminal windows ignore biomarkers entirely
  term.phosphate_t1 = 0.5;
  CHECK(total_reward(term, kCfg) == 15.0);
  term.mortality = 1;
  CHECK(total_reward(term, kCfg) == -15.0);

  // Neutral fixed points: SOFA 0 -> 0, flat lactate, glucose at 160, phosphate
  // at 3.5. Phys terms vanish; glucose sits on its plateau (~2); the phosphate
  // plateau in the narrow [2.5, 4.5] band peaks at f(3.5) = 0.92423431.
  RewardInputs in;
  in.terminal = false;
  in.sofa_t = 0.0;
  in.sofa_t1 = 0.0;
  in.lactate_t = 1.0;
  in.lactate_t1 = 1.0;
  in.glucose_t = 160.0;
  in.glucose_t1 = 160.0;
  in.phosphate_t = 3.5;
  in.phosphate_t1 = 3.5;
  CHECK(total_reward(in, kCfg) == doctest::Approx(2.9242343062754053).epsilon(1e-9));

  RewardConfig degenerate;
  degenerate.r_terminal = 0.0;
  degenerate.c0 = degenerate.c1 = degenerate.c2 = 0.0;
  degenerate.lambda_glucose = degenerate.lambda_phosphate = 0.0;
  CHECK(total_reward(in, degenerate) == 0.0);
}

TEST_CASE("total reward is pure") {
  RewardInputs in;
  in.sofa_t = 7;
  in.sofa_t1 = 6;
  in.lactate_t = 2.4;
  in.lactate_t1 = 2.1;
  in.glucose_t = 195.0;
  in.glucose_t1 = 170.0;
  in.phosphate_t = 2.1;
  in.phosphate_t1 = 2.8;
  const double a = total_reward(in, kCfg);
  const double b = total_reward(in, kCfg);
  CHECK(a == b);
}

TEST_CASE("intermediate rewards stay below the terminal magnitude") {
  // |R_phys| <= c0 + 24*c1 + c2 = 5.025 over the full SOFA/lactate domain.
  double max_phys = 0.0;
  for (int s0 = 0; s0 <= 24; ++s0)
    for (int s1 = 0; s1 <= 24; ++s1)
      for (double dl = -20.0; dl <= 20.0; dl += 0.5)
        max_phys = std::max(max_phys, std::abs(phys_reward(s0, s1, 2.0, 2.0 + dl, kCfg)));
  CHECK(max_phys <= 0.025 + 24 * 0.125 + 2.0 + 1e-12);

  // With per-marker deviations held to <= 1 the biomarker sum obeys 2*(2+eps).
  double max_bio_unit = 0.0;
  for (double g0 = 100.0; g0 <= 220.0; g0 += 2.0)
    for (double g1 = 100.0; g1 <= 220.0; g1 += 2.0)
      for (double p0 = 0.5; p0 <= 6.5; p0 += 0.25)
        for (double p1 = 0.5; p1 <= 6.5; p1 += 0.25)
          max_bio_unit = std::max(
              max_bio_unit, biomarker_reward(g0, g1, kCfg.glucose_range, kCfg.epsilon) +
                                biomarker_reward(p0, p1, kCfg.phosphate_range, kCfg.epsilon));
  CHECK(max_bio_unit <= 2.0 * (2.0 + kCfg.epsilon) + 1e-12);

  // Across the full clinically plausible grid the one-step reward stays under
  // the terminal magnitude 15.
  double max_im = 0.0;
  for (int s0 = 0; s0 <= 24; s0 += 4)
    for (int s1 = 0; s1 <= 24; s1 += 4)
      for (double g0 = 40.0; g0 <= 500.0; g0 += 20.0)
        for (double g1 = 40.0; g1 <= 500.0; g1 += 20.0)
          for (double p0 = 0.3; p0 <= 12.0; p0 += 1.5)
            for (double p1 = 0.3; p1 <= 12.0; p1 += 1.5) {
              RewardInputs in;
              in.sofa_t = s0;
              in.sofa_t1 = s1;
              in.lactate_t = 1.0;
              in.lactate_t1 = 15.0;
              in.glucose_t = g0;
              in.glucose_t1 = g1;
              in.phosphate_t = p0;
              in.phosphate_t1 = p1;
              max_im = std::max(max_im, std::abs(total_reward(in, kCfg)));
            }
  CHECK(max_im < 15.0);
}
