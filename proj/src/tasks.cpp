#include <algorithm>
#include <set>
#include <stdexcept>

#include "d3hrl/schema.hpp"

namespace d3hrl {

std::string to_string(Task t) {
  switch (t) {
    case Task::GetIron: return "getiron";
    case Task::GetSilverore: return "getsilverore";
    case Task::Wood2Wet: return "wood2wet";
    case Task::Fire2Burn: return "fire2burn";
  }
  return "?";
}

std::string to_string(SpanConfig s) {
  switch (s) {
    case SpanConfig::T0: return "t0";
    case SpanConfig::T1: return "t1";
    case SpanConfig::T2: return "t2";
    case SpanConfig::T3: return "t3";
  }
  return "?";
}

std::string to_string(ResourceLevel r) {
  return r == ResourceLevel::R0 ? "r0" : "r1";
}

Task task_from_string(const std::string& s) {
  if (s == "getiron") return Task::GetIron;
  if (s == "getsilverore") return Task::GetSilverore;
  if (s == "wood2wet") return Task::Wood2Wet;
  if (s == "fire2burn") return Task::Fire2Burn;
  throw std::invalid_argument("unknown task: " + s);
}

SpanConfig span_config_from_string(const std::string& s) {
  if (s == "t0") return SpanConfig::T0;
  if (s == "t1") return SpanConfig::T1;
  if (s == "t2") return SpanConfig::T2;
  if (s == "t3") return SpanConfig::T3;
  throw std::invalid_argument("unknown span config: " + s);
}

ResourceLevel resource_level_from_string(const std::string& s) {
  if (s == "r0") return ResourceLevel::R0;
  if (s == "r1") return ResourceLevel::R1;
  throw std::invalid_argument("unknown resource level: " + s);
}

int VariableSchema::index_of(const std::string& name) const {
  for (int i = 0; i < var_count(); ++i)
    if (state_vars[i].first == name) return i;
  return -1;
}

std::string VariableSchema::column_name(int col) const {
  if (col == action_column()) return "A";
  return state_vars[col].first;
}

int resource_tiles_per_kind(ResourceLevel level) {
  return level == ResourceLevel::R0 ? 2 : 8;
}

namespace {

struct RecipeRow {
  std::string effect;
  std::vector<std::pair<std::string, int>> material_causes;  // (var, min_count)
  std::map<std::string, int> consumes;
  std::string site;  // empty = self-firing rule
};

// Span tables per config. T1 fixes wood/stone at 3; the remaining T1 entries
// and all of T2/T3 are this project's shipped assignment in [1, 4]
// (configs/tasks.toml mirrors them).
std::map<std::string, int> span_table(Task task, SpanConfig cfg, int tau_max) {
  auto scaled = [&](int at4) {  // wood2wet spans grow with tau_max
    return std::max(1, (at4 * tau_max) / 4);
  };
  switch (task) {
    case Task::GetIron:
    case Task::GetSilverore: {
      std::map<std::string, int> t;
      switch (cfg) {
        case SpanConfig::T0:
          t = {{"wood", 1}, {"stone", 1}, {"stick", 1}, {"stonepickaxe", 1},
               {"coal", 1}, {"ironore", 1}, {"iron", 1}, {"ironpickaxe", 1}, {"silverore", 1}};
          break;
        case SpanConfig::T1:
          t = {{"wood", 3}, {"stone", 3}, {"stick", 2}, {"stonepickaxe", 4},
               {"coal", 2}, {"ironore", 3}, {"iron", 4}, {"ironpickaxe", 2}, {"silverore", 3}};
          break;
        case SpanConfig::T2:
          t = {{"wood", 2}, {"stone", 4}, {"stick", 1}, {"stonepickaxe", 3},
               {"coal", 4}, {"ironore", 2}, {"iron", 1}, {"ironpickaxe", 3}, {"silverore", 4}};
          break;
        case SpanConfig::T3:
          t = {{"wood", 4}, {"stone", 1}, {"stick", 3}, {"stonepickaxe", 2},
               {"coal", 1}, {"ironore", 4}, {"iron", 3}, {"ironpickaxe", 4}, {"silverore", 1}};
          break;
      }
      return t;
    }
    case Task::Wood2Wet:
      if (cfg == SpanConfig::T0) return {{"wood", 1}, {"wet", 1}};
      return {{"wood", scaled(3)}, {"wet", scaled(2)}};
    case Task::Fire2Burn:
      if (cfg == SpanConfig::T0) return {{"wood", 1}, {"fire", 1}, {"burn", 1}};
      return {{"wood", 3}, {"fire", 2}, {"burn", 4}};
  }
  throw std::invalid_argument("unknown task in span_table");
}

std::vector<RecipeRow> recipe_rows(Task task) {
  switch (task) {
    case Task::GetIron:
      return {
          {"wood", {}, {}, "tree"},
          {"stone", {}, {}, "rock"},
          {"stick", {{"wood", 1}}, {{"wood", 1}}, "stick_bench"},
          {"stonepickaxe", {{"stone", 1}, {"stick", 1}}, {{"stone", 1}, {"stick", 1}}, "pickaxe_bench"},
          {"coal", {{"stonepickaxe", 1}}, {}, "coal_deposit"},
          {"ironore", {{"stonepickaxe", 1}}, {}, "iron_deposit"},
          {"iron", {{"ironore", 1}, {"coal", 1}}, {{"ironore", 1}, {"coal", 1}}, "furnace"},
      };
    case Task::GetSilverore: {
      auto rows = recipe_rows(Task::GetIron);
      rows.push_back({"ironpickaxe", {{"iron", 1}, {"stick", 1}}, {{"iron", 1}, {"stick", 1}},
                      "ironpickaxe_bench"});
      rows.push_back({"silverore", {{"ironpickaxe", 1}}, {}, "silver_deposit"});
      return rows;
    }
    case Task::Wood2Wet:
      return {
          {"wood", {}, {}, "tree"},
          {"wet", {{"wood", 1}}, {{"wood", 1}}, "water"},
      };
    case Task::Fire2Burn:
      return {
          {"wood", {}, {}, "tree"},
          {"fire", {}, {}, "firepit"},
          {"burn", {{"wood", 1}, {"fire", 1}}, {{"wood", 1}, {"fire", 1}}, "burn_site"},
      };
  }
  throw std::invalid_argument("unknown task in recipe_rows");
}

std::vector<std::pair<std::string, int>> state_var_rows(Task task) {
  // max counts are small; chains only ever need a couple of each material
  switch (task) {
    case Task::GetIron:
      return {{"wood", 4}, {"stone", 4}, {"stick", 4}, {"stonepickaxe", 2},
              {"coal", 4}, {"ironore", 4}, {"iron", 2}};
    case Task::GetSilverore:
      return {{"wood", 4}, {"stone", 4}, {"stick", 4}, {"stonepickaxe", 2},
              {"coal", 4}, {"ironore", 4}, {"iron", 2}, {"ironpickaxe", 2}, {"silverore", 2}};
    case Task::Wood2Wet:
      return {{"wood", 4}, {"wet", 2}};
    case Task::Fire2Burn:
      return {{"wood", 4}, {"fire", 2}, {"burn", 2}};
  }
  throw std::invalid_argument("unknown task in state_var_rows");
}

std::string goal_name(Task task) {
  switch (task) {
    case Task::GetIron: return "iron";
    case Task::GetSilverore: return "silverore";
    case Task::Wood2Wet: return "wet";
    case Task::Fire2Burn: return "burn";
  }
  throw std::invalid_argument("unknown task in goal_name");
}

}  // namespace

void validate_task_spec(const TaskSpec& spec) {
  const auto& schema = spec.schema;
  if (schema.var_count() < 1) throw std::invalid_argument("schema needs at least one state variable");
  if (schema.action_count < 1) throw std::invalid_argument("schema needs a positive action count");
  if (schema.tau_max < 1) throw std::invalid_argument("tau_max must be positive");
  std::set<std::string> names;
  for (const auto& [name, max_count] : schema.state_vars) {
    if (!names.insert(name).second) throw std::invalid_argument("duplicate state variable: " + name);
    if (max_count < 0) throw std::invalid_argument("negative max_count for " + name);
  }
  if (spec.goal_var < 0 || spec.goal_var >= schema.var_count())
    throw std::invalid_argument("goal variable outside schema");
  std::set<int> effects;
  for (const auto& recipe : spec.recipes) {
    if (recipe.effect < 0 || recipe.effect >= schema.var_count())
      throw std::invalid_argument("recipe effect outside schema");
    if (!effects.insert(recipe.effect).second)
      throw std::invalid_argument("multiple recipes for one effect variable");
    if (recipe.span < 1 || recipe.span > schema.tau_max)
      throw std::invalid_argument("recipe span outside [1, tau_max] for " +
                                  schema.var_name(recipe.effect));
    for (const auto& cause : recipe.causes) {
      if (cause.column < 0 || cause.column > schema.action_column())
        throw std::invalid_argument("recipe cause outside schema columns");
      if (cause.min_count < 0) throw std::invalid_argument("negative cause min_count");
    }
    for (const auto& [var, count] : recipe.consumes) {
      if (var < 0 || var >= schema.var_count())
        throw std::invalid_argument("consumed variable outside schema");
      if (count < 1) throw std::invalid_argument("consume count must be positive");
    }
    if (!recipe.site.empty() &&
        std::find(spec.site_kinds.begin(), spec.site_kinds.end(), recipe.site) ==
            spec.site_kinds.end())
      throw std::invalid_argument("recipe site not in site kinds: " + recipe.site);
  }
}

TaskSpec task_spec(const EnvConfig& config) {
  int tau_max = config.tau_max;
  if (tau_max == 0) tau_max = (config.span_config == SpanConfig::T0) ? 1 : 4;
  if (config.span_config == SpanConfig::T0 && tau_max != 1)
    throw std::invalid_argument("T0 requires tau_max = 1");
  if (tau_max < 1) throw std::invalid_argument("tau_max must be positive");
  if (config.grid_size < 4) throw std::invalid_argument("grid too small");
  if (config.episode_cap < 1) throw std::invalid_argument("episode cap must be positive");

  TaskSpec spec;
  spec.schema.state_vars = state_var_rows(config.task);
  spec.schema.action_count = 5;
  spec.schema.tau_max = tau_max;

  const auto spans = span_table(config.task, config.span_config, tau_max);
  for (const auto& row : recipe_rows(config.task)) {
    Recipe recipe;
    recipe.effect = spec.schema.index_of(row.effect);
    recipe.span = spans.at(row.effect);
    for (const auto& [var, min_count] : row.material_causes)
      recipe.causes.push_back({spec.schema.index_of(var), min_count});
    if (!row.site.empty())
      recipe.causes.push_back({spec.schema.action_column(), 0});
    for (const auto& [var, count] : row.consumes)
      recipe.consumes[spec.schema.index_of(var)] = count;
    recipe.site = row.site;
    if (!row.site.empty() &&
        std::find(spec.site_kinds.begin(), spec.site_kinds.end(), row.site) ==
            spec.site_kinds.end())
      spec.site_kinds.push_back(row.site);
    spec.recipes.push_back(std::move(recipe));
  }
  spec.goal_var = spec.schema.index_of(goal_name(config.task));

  // Milestones: recipe order is already topological for the built-in chains.
  for (const auto& recipe : spec.recipes) spec.milestones.push_back(recipe.effect);

  validate_task_spec(spec);
  return spec;
}

}  // namespace d3hrl
