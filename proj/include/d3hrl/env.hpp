#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "d3hrl/schema.hpp"

namespace d3hrl {

// Primitive actions: 4 movement directions plus one interact.
inline constexpr int kActionUp = 0;
inline constexpr int kActionDown = 1;
inline constexpr int kActionLeft = 2;
inline constexpr int kActionRight = 3;
inline constexpr int kActionInteract = 4;
inline constexpr int kPrimitiveActions = 5;

struct FactoredState {
  std::vector<int> counts;
  int agent_x = 0;
  int agent_y = 0;
  int step_index = 0;
};

struct PendingEffect {
  int effect = 0;
  int due_step = 0;
  int delta = 0;
};

struct StepResult {
  FactoredState state;
  double reward = 0.0;
  bool done = false;
};

/// One episode: s_0 plus per-step (action, resulting state, reward, done).
struct Trajectory {
  FactoredState initial;
  std::vector<int> actions;
  std::vector<FactoredState> states;  // states[t] is the result of actions[t]
  std::vector<double> rewards;
  std::vector<bool> dones;

  int length() const { return static_cast<int>(actions.size()); }
  const FactoredState& state_at(int t) const { return t == 0 ? initial : states[t - 1]; }
  int action_at(int t) const { return actions[t]; }  // action taken from state_at(t)
};

/// Span-indexed ground-truth matrices derived from the recipe table.
/// present[h] is M x (M+1) with rows = effects, columns = causes (A last);
/// spans collapses them into one span-valued matrix (0 = no edge).
struct GroundTruth {
  std::vector<Eigen::MatrixXi> present;  // index 0 unused; present[h] for h in [1, tau_max]
  Eigen::MatrixXi spans;
};

class Env {
 public:
  explicit Env(const EnvConfig& config);
  Env(const EnvConfig& config, TaskSpec spec);  // custom recipe tables (tests, synthetic tasks)

  FactoredState reset(uint64_t seed);
  StepResult step(int action);

  const FactoredState& state() const { return state_; }
  bool done() const { return done_; }
  const VariableSchema& schema() const { return spec_.schema; }
  const TaskSpec& spec() const { return spec_; }
  const EnvConfig& config() const { return config_; }
  int episode_cap() const { return config_.episode_cap; }
  int goal_var() const { return spec_.goal_var; }

  GroundTruth ground_truth() const;

  /// Milestones toward the goal that have never been positive this episode.
  int task_distance(const FactoredState& state) const;

  /// Site kind id at a cell, or -1 when empty. Kind ids index spec().site_kinds.
  int site_at(int x, int y) const;
  int grid_size() const { return config_.grid_size; }

  /// True when the interact action at (x, y) with the given counts would
  /// trigger `recipe` (site matches, causes met, effect free and not capped).
  bool recipe_triggerable(const Recipe& recipe, const FactoredState& state) const;
  const std::vector<PendingEffect>& pending() const { return pending_; }

 private:
  void place_layout(uint64_t seed);
  void apply_due_effects(int step);
  void try_fire_site_recipe();
  void fire_auto_recipes(int step);
  bool causes_met(const Recipe& recipe, const std::vector<int>& counts) const;
  bool has_pending(int var) const;

  EnvConfig config_;
  TaskSpec spec_;
  std::vector<int> grid_;  // per cell: site kind id or -1
  FactoredState state_;
  std::vector<PendingEffect> pending_;
  std::vector<bool> achieved_;  // per variable, sticky within the episode
  bool done_ = true;
  bool goal_rewarded_ = false;
  int start_x_ = 0;
  int start_y_ = 0;
};

GroundTruth ground_truth_from_spec(const TaskSpec& spec);

}  // namespace d3hrl
