#pragma once

#include <string>
#include <vector>

#include "covnav/core/rng.hpp"
#include "covnav/scene/arena.hpp"

namespace covnav::scene {

enum class Difficulty { easy, medium, hard };
enum class Task { common_goal, specific_goal };

const char* to_string(Difficulty d);
const char* to_string(Task t);
Difficulty difficulty_from_string(const std::string& s);
Task task_from_string(const std::string& s);

// Start-goal geodesic range per difficulty bin, inclusive.
struct DifficultyBin {
  double lo;
  double hi;
};
DifficultyBin difficulty_bin(Difficulty d);

// Pose-free panoramic depth signature rendered at the goal pose; the goal
// is given as "what you would perceive there", never as coordinates.
struct GoalSignature {
  std::vector<double> vector;  // entries in [0, 1], depth / max range
  bool pose_free = true;
};

GoalSignature render_goal_signature(const Arena& arena, const Pose& pose,
                                    int k_rays, double max_range);

struct EpisodeSpec {
  std::string arena_id;
  int n_agents = 1;
  std::vector<Pose> starts;
  std::vector<Pose> goals;
  std::vector<GoalSignature> goal_signatures;
  Difficulty difficulty = Difficulty::easy;
  Task task = Task::common_goal;
  uint64_t seed = 0;

  std::string to_json() const;
  static EpisodeSpec from_json(const std::string& text);
};

// Rejection-sample a valid episode on the arena. Deterministic in `seed`.
// Throws std::runtime_error("cannot place episode") after the attempt
// budget; the caller regenerates the arena.
EpisodeSpec safe_init(const Arena& arena, int n_agents, Difficulty difficulty,
                      Task task, uint64_t seed, int k_rays, double max_range,
                      int max_attempts = 10000);

}  // namespace covnav::scene
