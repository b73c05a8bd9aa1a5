#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace d3hrl {

enum class Task { GetIron, GetSilverore, Wood2Wet, Fire2Burn };
enum class SpanConfig { T0, T1, T2, T3 };
enum class ResourceLevel { R0, R1 };

std::string to_string(Task t);
std::string to_string(SpanConfig s);
std::string to_string(ResourceLevel r);
Task task_from_string(const std::string& s);
SpanConfig span_config_from_string(const std::string& s);
ResourceLevel resource_level_from_string(const std::string& s);

/// State variables plus the primitive action space. Cause columns are the M
/// state variables followed by one aggregated action column (index M).
struct VariableSchema {
  std::vector<std::pair<std::string, int>> state_vars;  // (name, max_count)
  int action_count = 5;
  int tau_max = 1;

  int var_count() const { return static_cast<int>(state_vars.size()); }
  int cause_columns() const { return var_count() + 1; }
  int action_column() const { return var_count(); }
  int index_of(const std::string& name) const;  // -1 when absent
  const std::string& var_name(int i) const { return state_vars[i].first; }
  int max_count(int i) const { return state_vars[i].second; }
  std::string column_name(int col) const;
};

struct Cause {
  int column = 0;     // cause column index; schema.action_column() for A
  int min_count = 0;  // ignored for the action column
};

/// One effect-generating rule. `site` names the tile kind where the interact
/// action triggers it; empty site means the rule fires on its own whenever
/// the cause counts are met.
struct Recipe {
  int effect = 0;
  std::vector<Cause> causes;
  int span = 1;
  std::map<int, int> consumes;  // state var -> count taken at trigger
  std::string site;
};

struct EnvConfig {
  Task task = Task::GetIron;
  SpanConfig span_config = SpanConfig::T1;
  ResourceLevel resource_level = ResourceLevel::R0;
  int grid_size = 10;
  int episode_cap = 200;
  int tau_max = 0;  // 0 = default for the span config (T0 -> 1, T1..T3 -> 4)
  uint64_t seed = 0;
};

/// A complete task definition: schema, recipe table, goal, and the tile
/// kinds the layout generator must place.
struct TaskSpec {
  VariableSchema schema;
  std::vector<Recipe> recipes;
  int goal_var = 0;
  std::vector<std::string> site_kinds;
  std::vector<int> milestones;  // topological order toward the goal
};

/// Built-in table for a named task. Throws on inconsistent config.
TaskSpec task_spec(const EnvConfig& config);

/// Validates schema/recipe consistency; throws std::invalid_argument.
void validate_task_spec(const TaskSpec& spec);

int resource_tiles_per_kind(ResourceLevel level);  // R0 -> 2, R1 -> 8

}  // namespace d3hrl
