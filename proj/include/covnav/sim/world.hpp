#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "covnav/core/geometry.hpp"
#include "covnav/core/robot.hpp"
#include "covnav/scene/episode.hpp"
#include "covnav/scene/geodesic.hpp"

namespace covnav::sim {

enum class HitType : uint8_t { wall = 0, agent = 1, max_range = 2 };

struct Observation {
  std::vector<double> depths;      // K entries, normalized by max range
  std::vector<HitType> hit_types;  // K entries
  double ego_v = 0.0;              // previous step's clamped command
  double ego_w = 0.0;
  int step_index = 0;
  const scene::GoalSignature* goal_signature = nullptr;

  static int feature_dim(int k_rays) { return 4 * k_rays + 2; }
  // [depths | wall flags | agent flags | max-range flags | ego_v | ego_w]
  Eigen::VectorXd features() const;
};

struct AgentBody {
  Pose pose;
  double radius = kAgentRadius;
  bool frozen = false;
  bool collided_last_step = false;
  Action prev_action;  // clamped command applied on the previous step
};

struct StepOutcome {
  double delta_geodesic = 0.0;  // d(t) - d(t+1), positive when approaching
  bool collided = false;
  bool succeeded = false;  // sticky
  bool done = false;       // episode-level
};

struct SimConfig {
  int k_rays = kDefaultRays;
  double max_range = kMaxSensorRange;
  int max_steps = kMaxEpisodeSteps;
  bool freeze_on_success = true;  // disabled by the reward-telescoping check
};

// Panoramic raycast against the arena grid and other agents' discs. Rays
// start at the agent's heading and sweep counter-clockwise.
Observation raycast_panorama(const scene::Arena& arena,
                             const std::vector<AgentBody>& agents,
                             int self_index, const SimConfig& cfg);

// True iff the geodesic distance at the pose's cell is <= 1 m (inclusive).
bool check_success(const scene::GeodesicField& field, const Pose& pose);

class World {
 public:
  World(std::shared_ptr<const scene::Arena> arena,
        std::shared_ptr<const scene::EpisodeSpec> episode,
        std::vector<std::shared_ptr<const scene::GeodesicField>> fields,
        SimConfig cfg = {});

  // Computes the per-goal geodesic fields (shared across agents with the
  // same goal cell) and validates the initial placement.
  static World make(std::shared_ptr<const scene::Arena> arena,
                    std::shared_ptr<const scene::EpisodeSpec> episode,
                    SimConfig cfg = {});

  std::vector<StepOutcome> step(const std::vector<Action>& actions);
  Observation observe(int agent_index) const;

  const scene::Arena& arena() const { return *arena_; }
  const scene::EpisodeSpec& episode() const { return *episode_; }
  const std::vector<AgentBody>& agents() const { return agents_; }
  const scene::GeodesicField& field(int agent_index) const {
    return *fields_[agent_index];
  }
  int t() const { return t_; }
  bool done() const { return done_; }
  int n_agents() const { return static_cast<int>(agents_.size()); }
  const SimConfig& config() const { return cfg_; }

  double geodesic(int agent_index) const {
    return fields_[agent_index]->at_nearest(agents_[agent_index].pose, 12);
  }
  double initial_geodesic(int agent_index) const { return initial_geo_[agent_index]; }
  double path_length(int agent_index) const { return path_len_[agent_index]; }
  // Steps taken until first success; max_steps when the agent never succeeded.
  int steps_used(int agent_index) const { return steps_used_[agent_index]; }
  bool succeeded(int agent_index) const { return succeeded_[agent_index]; }

 private:
  std::shared_ptr<const scene::Arena> arena_;
  std::shared_ptr<const scene::EpisodeSpec> episode_;
  std::vector<std::shared_ptr<const scene::GeodesicField>> fields_;
  SimConfig cfg_;
  std::vector<AgentBody> agents_;
  std::vector<double> initial_geo_;
  std::vector<double> path_len_;
  std::vector<int> steps_used_;
  std::vector<bool> succeeded_;
  int t_ = 0;
  bool done_ = false;
};

}  // namespace covnav::sim
