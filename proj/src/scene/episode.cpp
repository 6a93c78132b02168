#include "covnav/scene/episode.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

#include "covnav/core/raycast.hpp"
#include "covnav/core/robot.hpp"
#include "covnav/scene/geodesic.hpp"

namespace covnav::scene {

const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::medium: return "medium";
    default: return "hard";
  }
}

const char* to_string(Task t) {
  return t == Task::common_goal ? "common" : "specific";
}

Difficulty difficulty_from_string(const std::string& s) {
  if (s == "easy") return Difficulty::easy;
  if (s == "medium") return Difficulty::medium;
  if (s == "hard") return Difficulty::hard;
  throw std::invalid_argument("unknown difficulty: " + s);
}

Task task_from_string(const std::string& s) {
  if (s == "common") return Task::common_goal;
  if (s == "specific") return Task::specific_goal;
  throw std::invalid_argument("unknown task: " + s);
}

DifficultyBin difficulty_bin(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return {1.5, 3.0};
    case Difficulty::medium: return {3.0, 5.0};
    default: return {5.0, 10.0};
  }
}

GoalSignature render_goal_signature(const Arena& arena, const Pose& pose,
                                    int k_rays, double max_range) {
  if (arena.disc_collides(pose.x, pose.y, kAgentRadius)) {
    throw std::invalid_argument("signature pose is not collision-free");
  }
  GoalSignature sig;
  sig.vector.resize(k_rays);
  const GridView g{arena.nx, arena.ny, arena.cell_size, arena.occupancy.data()};
  for (int k = 0; k < k_rays; ++k) {
    const double ang = pose.o + 2.0 * M_PI * k / k_rays;
    const double d = raycast_grid(g, pose.x, pose.y, std::cos(ang), std::sin(ang), max_range);
    sig.vector[k] = std::min(d, max_range) / max_range;
  }
  return sig;
}

namespace {

nlohmann::json pose_to_json(const Pose& p) {
  return nlohmann::json::array({p.x, p.y, p.o});
}

Pose pose_from_json(const nlohmann::json& j) {
  return Pose(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

}  // namespace

std::string EpisodeSpec::to_json() const {
  nlohmann::json j;
  j["arena_id"] = arena_id;
  j["n_agents"] = n_agents;
  j["difficulty"] = to_string(difficulty);
  j["task"] = scene::to_string(task);
  j["seed"] = seed;
  auto starts_j = nlohmann::json::array();
  for (const auto& p : starts) starts_j.push_back(pose_to_json(p));
  j["starts"] = starts_j;
  auto goals_j = nlohmann::json::array();
  for (const auto& p : goals) goals_j.push_back(pose_to_json(p));
  j["goals"] = goals_j;
  auto sig_j = nlohmann::json::array();
  for (const auto& s : goal_signatures) sig_j.push_back(s.vector);
  j["goal_signatures"] = sig_j;
  return j.dump();
}

EpisodeSpec EpisodeSpec::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  EpisodeSpec e;
  e.arena_id = j.at("arena_id").get<std::string>();
  e.n_agents = j.at("n_agents").get<int>();
  e.difficulty = difficulty_from_string(j.at("difficulty").get<std::string>());
  e.task = task_from_string(j.at("task").get<std::string>());
  e.seed = j.at("seed").get<uint64_t>();
  for (const auto& p : j.at("starts")) e.starts.push_back(pose_from_json(p));
  for (const auto& p : j.at("goals")) e.goals.push_back(pose_from_json(p));
  for (const auto& s : j.at("goal_signatures")) {
    GoalSignature sig;
    sig.vector = s.get<std::vector<double>>();
    e.goal_signatures.push_back(std::move(sig));
  }
  return e;
}

namespace {

struct Budget {
  int left;
  void spend() {
    if (--left < 0) throw std::runtime_error("cannot place episode");
  }
};

// Sample a collision-free pose inside a cell that the field marks reachable
// within [bin.lo, bin.hi]. Returns false when the candidate set is empty.
bool sample_pose_in_bin(const Arena& arena, const GeodesicField& field,
                        const DifficultyBin& bin, Rng& rng, Budget& budget,
                        const std::vector<Pose>& placed, double min_clearance,
                        Pose* out) {
  std::vector<int> candidates;
  for (int iy = 0; iy < field.ny; ++iy) {
    for (int ix = 0; ix < field.nx; ++ix) {
      const double d = field.at_cell(ix, iy);
      if (d >= bin.lo && d <= bin.hi) candidates.push_back(iy * field.nx + ix);
    }
  }
  if (candidates.empty()) return false;
  while (true) {
    budget.spend();
    const int cell = candidates[rng.uniform_int(candidates.size())];
    const int ix = cell % field.nx, iy = cell / field.nx;
    const double x = (ix + rng.uniform()) * arena.cell_size;
    const double y = (iy + rng.uniform()) * arena.cell_size;
    if (arena.disc_collides(x, y, kAgentRadius)) continue;
    bool clear = true;
    for (const auto& p : placed) {
      if (std::hypot(p.x - x, p.y - y) < min_clearance) {
        clear = false;
        break;
      }
    }
    if (!clear) continue;
    *out = Pose(x, y, rng.uniform(-M_PI, M_PI));
    return true;
  }
}

Pose sample_free_pose(const Arena& arena, Rng& rng, Budget& budget) {
  while (true) {
    budget.spend();
    const double x = rng.uniform(0.0, arena.width);
    const double y = rng.uniform(0.0, arena.height);
    if (arena.disc_collides(x, y, kAgentRadius)) continue;
    return Pose(x, y, rng.uniform(-M_PI, M_PI));
  }
}

}  // namespace

EpisodeSpec safe_init(const Arena& arena, int n_agents, Difficulty difficulty,
                      Task task, uint64_t seed, int k_rays, double max_range,
                      int max_attempts) {
  if (n_agents < 1) throw std::invalid_argument("n_agents must be >= 1");
  Rng rng(Rng::derive(seed, 0xE15D));
  Budget budget{max_attempts};
  const DifficultyBin bin = difficulty_bin(difficulty);
  const double min_clearance = 2.0 * kAgentRadius + 0.05;

  EpisodeSpec e;
  e.arena_id = arena.id;
  e.n_agents = n_agents;
  e.difficulty = difficulty;
  e.task = task;
  e.seed = seed;

  while (true) {
    e.starts.clear();
    e.goals.clear();
    e.goal_signatures.clear();
    bool ok = true;

    if (task == Task::common_goal) {
      const Pose goal = sample_free_pose(arena, rng, budget);
      GeodesicField field;
      try {
        field = compute_geodesic_field(arena, goal, kAgentRadius);
      } catch (const std::runtime_error&) {
        continue;  // goal cell inside inflated obstacle
      }
      for (int n = 0; n < n_agents; ++n) {
        Pose start;
        if (!sample_pose_in_bin(arena, field, bin, rng, budget, e.starts,
                                min_clearance, &start)) {
          ok = false;
          break;
        }
        e.starts.push_back(start);
      }
      if (!ok) continue;
      GoalSignature sig = render_goal_signature(arena, goal, k_rays, max_range);
      for (int n = 0; n < n_agents; ++n) {
        e.goals.push_back(goal);
        e.goal_signatures.push_back(sig);
      }
    } else {
      for (int n = 0; n < n_agents && ok; ++n) {
        Pose goal;
        GeodesicField field;
        while (true) {
          budget.spend();
          goal = sample_free_pose(arena, rng, budget);
          bool distinct = true;
          for (const auto& g : e.goals) {
            if (arena.cell_x(g.x) == arena.cell_x(goal.x) &&
                arena.cell_y(g.y) == arena.cell_y(goal.y)) {
              distinct = false;
              break;
            }
          }
          if (!distinct) continue;
          try {
            field = compute_geodesic_field(arena, goal, kAgentRadius);
          } catch (const std::runtime_error&) {
            continue;
          }
          break;
        }
        Pose start;
        if (!sample_pose_in_bin(arena, field, bin, rng, budget, e.starts,
                                min_clearance, &start)) {
          ok = false;
          break;
        }
        e.starts.push_back(start);
        e.goals.push_back(goal);
        e.goal_signatures.push_back(render_goal_signature(arena, goal, k_rays, max_range));
      }
      if (!ok) continue;
    }
    return e;
  }
}

}  // namespace covnav::scene
