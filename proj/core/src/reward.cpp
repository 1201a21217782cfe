#include "deepen/reward.hpp"

#include <cassert>
#include <cmath>

namespace deepen {

double terminal_reward(int mortality, const RewardConfig& cfg) {
  return mortality ? -cfg.r_terminal : cfg.r_terminal;
}

double phys_reward(double sofa_t, double sofa_t1, double lactate_t, double lactate_t1,
                   const RewardConfig& cfg) {
  const double d_sofa = sofa_t1 - sofa_t;
  const bool stagnant = d_sofa == 0.0 && sofa_t > 0.0;
  return -cfg.c0 * (stagnant ? 1.0 : 0.0) - cfg.c1 * d_sofa -
         cfg.c2 * std::tanh(lactate_t1 - lactate_t);
}

double shaping_f(double x, const std::array<double, 2>& range) {
  return 2.0 / (1.0 + std::exp(-(x - range[0]))) - 2.0 / (1.0 + std::exp(-(x - range[1])));
}

double deviation(double x, const std::array<double, 2>& range) {
  return (std::max(0.0, x - range[1]) + std::max(0.0, range[0] - x)) / (range[1] - range[0]);
}

double biomarker_reward(double x_t, double x_t1, const std::array<double, 2>& range,
                        double epsilon) {
  const double improvement = deviation(x_t, range) - deviation(x_t1, range);
  return shaping_f(x_t1, range) + epsilon * std::max(0.0, improvement);
}

double total_reward(const RewardInputs& in, const RewardConfig& cfg) {
  if (in.terminal) return terminal_reward(in.mortality, cfg);
  assert(std::isfinite(in.glucose_t1) && std::isfinite(in.phosphate_t1));
  const double phys = phys_reward(in.sofa_t, in.sofa_t1, in.lactate_t, in.lactate_t1, cfg);
  const double bio =
      cfg.lambda_glucose * biomarker_reward(in.glucose_t, in.glucose_t1, cfg.glucose_range, cfg.epsilon) +
      cfg.lambda_phosphate *
          biomarker_reward(in.phosphate_t, in.phosphate_t1, cfg.phosphate_range, cfg.epsilon);
  return phys + bio;
}

}  // namespace deepen
