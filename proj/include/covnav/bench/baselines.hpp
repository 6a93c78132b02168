#pragma once

#include <memory>
#include <vector>

#include "covnav/core/rng.hpp"
#include "covnav/scene/geodesic.hpp"
#include "covnav/sim/world.hpp"

namespace covnav::bench {

// Uniform action on [-1, 1]^2.
Action random_policy(Rng& rng);

// Steepest-descent follower on a geodesic field: rotate toward a short
// validated lookahead along the descent chain, then drive with speed
// proportional to the remaining distance so the agent parks at the goal
// cell. Throws when the pose sits on an unreachable cell.
Action oracle_policy(const scene::GeodesicField& field, const Pose& pose);

// Per-episode oracle state: steers on a margin-inflated field (extra body
// clearance) while success/reward stay on the standard field; falls back
// to the standard field where the margin field is unreachable. When a
// teammate freezes it re-plans with the parked body stamped into the grid,
// so routes bend around blockades instead of pressing into them.
class OracleContext {
 public:
  OracleContext(const scene::Arena& arena, const scene::EpisodeSpec& episode);
  Action act(const sim::World& world, int agent);

 private:
  void replan(const sim::World& world, int agent, uint64_t mask);

  const scene::Arena* arena_;
  std::vector<Pose> goals_;
  std::vector<std::shared_ptr<const scene::GeodesicField>> margin_fields_;
  std::vector<std::shared_ptr<const scene::GeodesicField>> plain_fields_;
  std::vector<std::shared_ptr<const scene::GeodesicField>> base_plain_fields_;
  std::vector<uint64_t> planned_mask_;  // frozen sets already attempted
  std::vector<uint64_t> stamped_mask_;  // frozen set baked into the fields
  std::vector<Pose> prev_pose_;
  std::vector<double> prev_v_;
  std::vector<int> stuck_steps_;
  std::vector<double> commit_x_, commit_y_;
  std::vector<int> commit_steps_;
};

}  // namespace covnav::bench
