#pragma once

#include <array>

namespace deepen {

// Weights and target ranges of the composite reward. All constants are
// overridable through the run config.
struct RewardConfig {
  double r_terminal = 15.0;
  double c0 = 0.025;  // SOFA stagnation penalty
  double c1 = 0.125;  // SOFA change penalty
  double c2 = 2.0;    // lactate change penalty
  double epsilon = 0.2;  // improvement bonus weight
  double lambda_glucose = 1.0;
  double lambda_phosphate = 1.0;
  std::array<double, 2> glucose_range{140.0, 180.0};    // mg/dL
  std::array<double, 2> phosphate_range{2.5, 4.5};      // mg/dL
};

// +r_T on survival, -r_T on death. Applies only to terminal windows.
double terminal_reward(int mortality, const RewardConfig& cfg);

// Physiological shaping on raw SOFA and lactate:
//   -c0 * 1{dSOFA == 0 and SOFA_t > 0} - c1 * (SOFA_{t+1} - SOFA_t)
//   - c2 * tanh(Lactate_{t+1} - Lactate_t)
double phys_reward(double sofa_t, double sofa_t1, double lactate_t, double lactate_t1,
                   const RewardConfig& cfg);

// Difference of two unit-scale logistics centred at the range bounds; smooth
// plateau inside the range, decaying outside. Bounded in (0, 2).
double shaping_f(double x, const std::array<double, 2>& range);

// Normalized deviation from the target range; 0 inside, piecewise linear outside.
double deviation(double x, const std::array<double, 2>& range);

// Per-biomarker reward: f(x_{t+1}) + epsilon * max(0, delta_pre - delta_post).
double biomarker_reward(double x_t, double x_t1, const std::array<double, 2>& range,
                        double epsilon);

// Raw clinical values entering the reward at one step.
struct RewardInputs {
  bool terminal = false;
  int mortality = 0;
  double sofa_t = 0.0;
  double sofa_t1 = 0.0;
  double lactate_t = 0.0;
  double lactate_t1 = 0.0;
  double glucose_t = 0.0;
  double glucose_t1 = 0.0;
  double phosphate_t = 0.0;
  double phosphate_t1 = 0.0;
};

// Terminal windows get only the terminal reward; non-terminal windows get
// phys_reward + lambda_g * R_glucose + lambda_p * R_phosphate.
double total_reward(const RewardInputs& in, const RewardConfig& cfg);

}  // namespace deepen
