#include "deepen/action_codec.hpp"

#include <cmath>
#include <limits>

#include "deepen/errors.hpp"

namespace deepen {

const std::array<ActionTableEntry, kNumActions>& action_table() {
  static const std::array<ActionTableEntry, kNumActions> table = {{
      {0, 1, 1, 1, 21268}, {1, 4, 4, 4, 15932}, {2, 4, 4, 3, 13241},
      {3, 2, 2, 1, 11755}, {4, 4, 4, 2, 9322},  {5, 3, 3, 2, 9179},
      {6, 1, 1, 2, 9000},  {7, 2, 2, 2, 8683},  {8, 1, 1, 4, 8392},
      {9, 1, 1, 3, 8093},  {10, 3, 3, 3, 7969}, {11, 2, 2, 3, 6763},
      {12, 3, 3, 1, 5740}, {13, 2, 2, 4, 5536}, {14, 3, 3, 4, 5458},
      {15, 4, 3, 4, 5169}, {16, 3, 4, 2, 4777}, {17, 2, 3, 2, 4695},
      {18, 3, 4, 3, 4644}, {19, 1, 2, 1, 4325}, {20, 4, 3, 3, 4253},
      {21, 3, 2, 4, 4098}, {22, 2, 3, 1, 3993}, {23, 3, 2, 3, 3485},
      {24, 2, 1, 4, 3434}, {25, 3, 4, 4, 3266}, {26, 3, 2, 2, 3147},
      {27, 2, 3, 3, 3128}, {28, 4, 3, 2, 2980}, {29, 3, 2, 1, 2352},
      {30, 4, 4, 1, 2337}, {31, 2, 1, 3, 2232}, {32, 1, 2, 2, 1955},
      {33, 2, 3, 4, 1774}, {34, 2, 1, 2, 1578}, {35, 1, 2, 3, 1384},
      {36, 4, 3, 1, 1218}, {37, 2, 1, 1, 1205}, {38, 3, 4, 1, 1179},
      {39, 1, 2, 4, 1062}, {40, 4, 2, 4, 1037}, {41, 3, 1, 4, 535},
      {42, 2, 4, 1, 385},  {43, 2, 4, 2, 368},  {44, 4, 2, 3, 324},
      {45, 2, 4, 3, 311},  {46, 1, 3, 1, 272},  {47, 2, 4, 4, 249},
      {48, 3, 1, 3, 163},  {49, 4, 2, 2, 162},  {50, 1, 3, 2, 147},
  }};
  return table;
}

namespace {

constexpr int triple_key(int c, int p, int w) { return (c - 1) * 16 + (p - 1) * 4 + (w - 1); }

// 64-slot lookup from level triple to id, -1 for the 13 unobserved triples.
const std::array<int, 64>& triple_to_id() {
  static const std::array<int, 64> lut = [] {
    std::array<int, 64> m{};
    m.fill(-1);
    for (const auto& e : action_table())
      m[triple_key(e.cal_level, e.pro_level, e.water_level)] = e.id;
    return m;
  }();
  return lut;
}

}  // namespace

ActionCode decode_action(int id) {
  if (id < 0 || id >= kNumActions)
    throw DataError("action id out of range: " + std::to_string(id));
  const auto& e = action_table()[static_cast<std::size_t>(id)];
  return {e.cal_level, e.pro_level, e.water_level, e.id};
}

ActionCode encode_levels(int cal_level, int pro_level, int water_level) {
  for (int lvl : {cal_level, pro_level, water_level})
    if (lvl < 1 || lvl > 4)
      throw DataError("dose level out of range: " + std::to_string(lvl));
  const int id = triple_to_id()[static_cast<std::size_t>(triple_key(cal_level, pro_level, water_level))];
  ActionCode code{cal_level, pro_level, water_level, std::nullopt};
  if (id >= 0) code.id = id;
  return code;
}

int dose_component_level(double value, const std::array<double, 3>& cuts) {
  if (!(value > 0.0))
    throw DataError("dose component must be > 0, got " + std::to_string(value));
  if (value <= cuts[0]) return 1;
  if (value <= cuts[1]) return 2;
  if (value <= cuts[2]) return 3;
  return 4;
}

ActionCode discretize_dose(double calories, double protein, double water,
                           const QuantileThresholds& thresholds) {
  const int c = dose_component_level(calories, thresholds.calories);
  const int p = dose_component_level(protein, thresholds.protein);
  const int w = dose_component_level(water, thresholds.water);
  return encode_levels(c, p, w);
}

ActionCode discretize_dose(const DoseTriple& dose, const QuantileThresholds& thresholds) {
  return discretize_dose(dose.calories, dose.protein, dose.water, thresholds);
}

int nearest_observed_action(int cal_level, int pro_level, int water_level) {
  int best_id = -1;
  int best_dist = std::numeric_limits<int>::max();
  for (const auto& e : action_table()) {
    const int dist = std::abs(e.cal_level - cal_level) + std::abs(e.pro_level - pro_level) +
                     std::abs(e.water_level - water_level);
    if (dist < best_dist || (dist == best_dist && e.id < best_id)) {
      best_dist = dist;
      best_id = e.id;
    }
  }
  return best_id;
}

}  // namespace deepen
