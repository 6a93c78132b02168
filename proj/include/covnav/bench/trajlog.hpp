#pragma once

#include <string>
#include <vector>

#include "covnav/core/geometry.hpp"
#include "covnav/scene/episode.hpp"

namespace covnav::bench {

struct AgentTrajectory {
  std::vector<Pose> poses;        // steps + 1 entries, starting pose first
  std::vector<Action> actions;    // executed commands
  std::vector<uint8_t> collided;  // per step
  std::vector<uint8_t> succeeded; // per step, sticky
  bool success = false;
  int steps_used = 0;             // first-success step, else max steps
  double path_length = 0.0;       // sum of per-step displacements
  double final_geodesic = 0.0;    // d^g at episode end
  double initial_geodesic = 0.0;  // l^g
};

struct CommStepCounts {
  int queries_sent = 0;
  int values_sent = 0;
  long scalars = 0;
  int communicated = 0;  // requesters whose self-gate passed
};

struct TrajectoryLog {
  std::string arena_id;
  int episode_index = 0;
  scene::Difficulty difficulty = scene::Difficulty::easy;
  scene::Task task = scene::Task::common_goal;
  int n_agents = 0;
  uint64_t seed = 0;
  std::vector<Pose> starts;
  std::vector<Pose> goals;
  std::vector<AgentTrajectory> agents;
  std::vector<CommStepCounts> comm;  // per step
  int t_final = 0;

  std::string to_json() const;
  static TrajectoryLog from_json(const std::string& text);
};

void write_jsonl(const std::vector<TrajectoryLog>& logs, const std::string& path);
std::vector<TrajectoryLog> read_jsonl(const std::string& path);

}  // namespace covnav::bench
