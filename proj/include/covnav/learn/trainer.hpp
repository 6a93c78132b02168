#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "covnav/comm/protocol.hpp"
#include "covnav/learn/ppo.hpp"
#include "covnav/mapping/ego_map.hpp"
#include "covnav/policy/net.hpp"
#include "covnav/sim/world.hpp"

namespace covnav::learn {

// Episode source shared by training and evaluation. Arenas and episode
// specs are immutable and shared across environment slots.
struct EpisodePool {
  std::vector<std::shared_ptr<const scene::Arena>> arenas;
  std::vector<std::shared_ptr<const scene::EpisodeSpec>> episodes;
  std::vector<int> episode_arena;  // arena index per episode

  size_t size() const { return episodes.size(); }
};

// Drives one episode for a parametric team: observation, map update,
// communication round, policy forward, world step. Used by rollouts,
// evaluation and imitation collection so the pipelines cannot drift apart.
class TeamRunner {
 public:
  // Executed actions come from this callback instead of the policy when set
  // (imitation teachers); policy outputs are still recorded.
  using ActionOverride = std::function<Action(const sim::World&, int agent)>;

  TeamRunner(std::shared_ptr<const scene::Arena> arena,
             std::shared_ptr<const scene::EpisodeSpec> episode,
             const policy::ParamSet& params, const mapping::MapConfig& map_cfg,
             Method method, sim::SimConfig sim_cfg = {});

  struct AgentRecord {
    bool active = false;  // frozen agents produce no transition
    Transition transition;
    Action action;  // executed action
  };

  struct StepResult {
    std::vector<AgentRecord> agents;
    comm::RoundLog comm_log;
    bool episode_done = false;
  };

  StepResult step(policy::ActMode mode, Rng* rng,
                  const ActionOverride& override_action = nullptr);

  // Runs the observe/communicate/act phase for the current state and caches
  // it for the next step; returns each agent's value estimate (bootstrap).
  std::vector<double> peek_values(policy::ActMode mode, Rng* rng);

  // Copies each agent's memory into its transitions' trace matrices and
  // starts a fresh trace. Call at every rollout cut.
  void finalize_traces();

  const sim::World& world() const { return *world_; }
  bool done() const { return world_->done(); }
  int n_agents() const { return world_->n_agents(); }
  Method method() const { return method_; }

 private:
  struct Pending {
    std::vector<AgentRecord> agents;
    std::vector<Action> actions;
    comm::RoundLog comm_log;
    std::vector<double> values;
  };

  void run_phase_a(policy::ActMode mode, Rng* rng, const ActionOverride& override_action);

  std::shared_ptr<const scene::Arena> arena_;
  std::shared_ptr<const scene::EpisodeSpec> episode_;
  const policy::ParamSet* params_;
  mapping::MapConfig map_cfg_;
  Method method_;
  std::unique_ptr<sim::World> world_;
  std::vector<mapping::EgoMap> maps_;
  std::vector<std::unique_ptr<comm::CommMemory>> memories_;
  std::vector<std::shared_ptr<EpisodeCommTrace>> traces_;
  std::vector<Eigen::VectorXd> hidden_;
  std::vector<Pose> last_pose_;
  std::optional<Pending> pending_;
};

struct TrainBudget {
  long max_updates = 0;         // 0 = no cap
  double max_seconds = 0.0;     // 0 = no cap (wall clock)
  double target_probe_sr = -1;  // stop early when the probe SR reaches this
  int probe_every = 20;         // updates between validation probes
  int probe_episodes = 24;
};

struct CurvePoint {
  long update = 0;
  long env_steps = 0;
  double mean_episode_reward = 0.0;
  double probe_sr = -1.0;  // -1 when no probe ran at this point
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  long scalars_transmitted = 0;
};

struct TrainResult {
  policy::ParamSet params;
  std::vector<CurvePoint> curve;
  long updates_done = 0;
  long total_scalars_transmitted = 0;
  bool reached_target = false;
  double best_probe_sr = -1.0;
};

// Decentralized PPO over parallel environments. Deterministic in
// (cfg.seed, pools, budget caps other than max_seconds).
TrainResult train_run(Method method, const EpisodePool& train_pool,
                      const EpisodePool& probe_pool, const TrainConfig& cfg,
                      const policy::ArchConfig& arch,
                      const mapping::MapConfig& map_cfg, const TrainBudget& budget);

// Deterministic-policy success rate over the first `max_episodes` episodes
// of the pool (all of them when max_episodes <= 0).
double probe_success_rate(const policy::ParamSet& params, Method method,
                          const mapping::MapConfig& map_cfg,
                          const EpisodePool& pool, int max_episodes);

std::string curve_to_csv(const std::vector<CurvePoint>& curve);

}  // namespace covnav::learn
