#include "d3hrl/env.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "d3hrl/rng.hpp"

namespace d3hrl {

Env::Env(const EnvConfig& config) : Env(config, task_spec(config)) {}

Env::Env(const EnvConfig& config, TaskSpec spec)
    : config_(config), spec_(std::move(spec)) {
  validate_task_spec(spec_);
  config_.tau_max = spec_.schema.tau_max;
  grid_.assign(static_cast<size_t>(config_.grid_size) * config_.grid_size, -1);
}

int Env::site_at(int x, int y) const {
  if (x < 0 || y < 0 || x >= config_.grid_size || y >= config_.grid_size) return -1;
  return grid_[static_cast<size_t>(y) * config_.grid_size + x];
}

void Env::place_layout(uint64_t seed) {
  const int n = config_.grid_size;
  std::vector<int> cells(static_cast<size_t>(n) * n);
  std::iota(cells.begin(), cells.end(), 0);
  Rng rng(derive_seed(seed, 0x6c61796fULL));
  std::shuffle(cells.begin(), cells.end(), rng);

  std::fill(grid_.begin(), grid_.end(), -1);
  const int per_kind = resource_tiles_per_kind(config_.resource_level);
  size_t next = 0;
  for (size_t kind = 0; kind < spec_.site_kinds.size(); ++kind) {
    for (int k = 0; k < per_kind; ++k) {
      if (next >= cells.size()) throw std::runtime_error("grid too small for site tiles");
      grid_[cells[next++]] = static_cast<int>(kind);
    }
  }
  if (next >= cells.size()) throw std::runtime_error("grid too small for the start cell");
  start_x_ = cells[next] % n;
  start_y_ = cells[next] / n;
}

FactoredState Env::reset(uint64_t seed) {
  place_layout(seed);
  state_.counts.assign(spec_.schema.var_count(), 0);
  state_.agent_x = start_x_;
  state_.agent_y = start_y_;
  state_.step_index = 0;
  pending_.clear();
  achieved_.assign(spec_.schema.var_count(), false);
  done_ = false;
  goal_rewarded_ = false;
  fire_auto_recipes(0);
  return state_;
}

bool Env::has_pending(int var) const {
  for (const auto& p : pending_)
    if (p.effect == var) return true;
  return false;
}

bool Env::causes_met(const Recipe& recipe, const std::vector<int>& counts) const {
  for (const auto& cause : recipe.causes) {
    if (cause.column == spec_.schema.action_column()) continue;
    if (counts[cause.column] < cause.min_count) return false;
  }
  return true;
}

bool Env::recipe_triggerable(const Recipe& recipe, const FactoredState& state) const {
  if (!causes_met(recipe, state.counts)) return false;
  if (has_pending(recipe.effect)) return false;
  return state.counts[recipe.effect] < spec_.schema.max_count(recipe.effect);
}

void Env::try_fire_site_recipe() {
  const int site = site_at(state_.agent_x, state_.agent_y);
  if (site < 0) return;
  const std::string& kind = spec_.site_kinds[site];
  for (const auto& recipe : spec_.recipes) {
    if (recipe.site != kind) continue;
    if (!recipe_triggerable(recipe, state_)) continue;
    for (const auto& [var, count] : recipe.consumes) state_.counts[var] -= count;
    pending_.push_back({recipe.effect, state_.step_index + recipe.span, +1});
    return;  // one trigger per interact
  }
}

void Env::fire_auto_recipes(int step) {
  for (const auto& recipe : spec_.recipes) {
    if (!recipe.site.empty()) continue;
    if (!recipe_triggerable(recipe, state_)) continue;
    for (const auto& [var, count] : recipe.consumes) state_.counts[var] -= count;
    pending_.push_back({recipe.effect, step + recipe.span, +1});
  }
}

void Env::apply_due_effects(int step) {
  // ascending effect index keeps the ordering deterministic; overlapping
  // effects touch distinct variables so the order cannot matter
  std::stable_sort(pending_.begin(), pending_.end(),
                   [](const PendingEffect& a, const PendingEffect& b) { return a.effect < b.effect; });
  std::vector<PendingEffect> rest;
  for (const auto& p : pending_) {
    if (p.due_step == step) {
      const int cap = spec_.schema.max_count(p.effect);
      state_.counts[p.effect] = std::clamp(state_.counts[p.effect] + p.delta, 0, cap);
    } else {
      rest.push_back(p);
    }
  }
  pending_ = std::move(rest);
}

StepResult Env::step(int action) {
  if (done_) throw std::logic_error("step called on a finished episode");
  if (action < 0 || action >= spec_.schema.action_count)
    throw std::out_of_range("action index outside the primitive action space");

  const int trigger_step = state_.step_index;

  switch (action) {
    case kActionUp:
      state_.agent_y = std::max(0, state_.agent_y - 1);
      break;
    case kActionDown:
      state_.agent_y = std::min(config_.grid_size - 1, state_.agent_y + 1);
      break;
    case kActionLeft:
      state_.agent_x = std::max(0, state_.agent_x - 1);
      break;
    case kActionRight:
      state_.agent_x = std::min(config_.grid_size - 1, state_.agent_x + 1);
      break;
    case kActionInteract:
      try_fire_site_recipe();
      break;
    default:
      break;
  }

  state_.step_index = trigger_step + 1;
  apply_due_effects(state_.step_index);
  fire_auto_recipes(state_.step_index);

  for (int i = 0; i < spec_.schema.var_count(); ++i)
    if (state_.counts[i] > 0) achieved_[i] = true;

  StepResult result;
  result.reward = 0.0;
  if (!goal_rewarded_ && state_.counts[spec_.goal_var] >= 1) {
    result.reward = 1.0;
    goal_rewarded_ = true;
    done_ = true;
  }
  if (state_.step_index >= config_.episode_cap) done_ = true;
  result.state = state_;
  result.done = done_;
  return result;
}

GroundTruth Env::ground_truth() const { return ground_truth_from_spec(spec_); }

GroundTruth ground_truth_from_spec(const TaskSpec& spec) {
  const int m = spec.schema.var_count();
  const int cols = spec.schema.cause_columns();
  GroundTruth truth;
  truth.present.resize(spec.schema.tau_max + 1, Eigen::MatrixXi::Zero(m, cols));
  truth.spans = Eigen::MatrixXi::Zero(m, cols);
  for (const auto& recipe : spec.recipes) {
    for (const auto& cause : recipe.causes) {
      truth.present[recipe.span](recipe.effect, cause.column) = 1;
      truth.spans(recipe.effect, cause.column) = recipe.span;
    }
  }
  return truth;
}

int Env::task_distance(const FactoredState& state) const {
  int missing = 0;
  for (int var : spec_.milestones) {
    const bool seen = (var < static_cast<int>(achieved_.size()) && achieved_[var]) ||
                      state.counts[var] > 0;
    if (!seen) ++missing;
  }
  return missing;
}

}  // namespace d3hrl
