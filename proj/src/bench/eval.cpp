#include "covnav/bench/eval.hpp"

#include "covnav/bench/baselines.hpp"

namespace covnav::bench {

namespace {

TrajectoryLog log_skeleton(const scene::EpisodeSpec& e, int index) {
  TrajectoryLog log;
  log.arena_id = e.arena_id;
  log.episode_index = index;
  log.difficulty = e.difficulty;
  log.task = e.task;
  log.n_agents = e.n_agents;
  log.seed = e.seed;
  log.starts = e.starts;
  log.goals = e.goals;
  log.agents.resize(e.n_agents);
  for (int i = 0; i < e.n_agents; ++i) log.agents[i].poses.push_back(e.starts[i]);
  return log;
}

void finish_log(const sim::World& world, TrajectoryLog* log) {
  log->t_final = world.t();
  for (int i = 0; i < world.n_agents(); ++i) {
    AgentTrajectory& a = log->agents[i];
    a.success = world.succeeded(i);
    a.steps_used = world.steps_used(i);
    a.path_length = world.path_length(i);
    a.final_geodesic = world.geodesic(i);
    a.initial_geodesic = world.initial_geodesic(i);
  }
}

void run_baseline(const EvalJob& job, const learn::EpisodePool& pool, int index,
                  TrajectoryLog* log) {
  auto arena = pool.arenas[pool.episode_arena[index]];
  auto episode = pool.episodes[index];
  sim::World world = sim::World::make(arena, episode);
  std::optional<OracleContext> oracle;
  if (job.baseline == Baseline::oracle) oracle.emplace(*arena, *episode);
  Rng rng(Rng::derive(job.seed, 0xBA5E + static_cast<uint64_t>(index)));

  const int n = world.n_agents();
  std::vector<Action> actions(n);
  while (!world.done()) {
    for (int i = 0; i < n; ++i) {
      if (job.baseline == Baseline::random) {
        actions[i] = random_policy(rng);  // drawn even when frozen: fixed stream
      } else {
        actions[i] = world.agents()[i].frozen ? Action{0.0, 0.0}
                                              : oracle->act(world, i);
      }
    }
    const auto outcomes = world.step(actions);
    for (int i = 0; i < n; ++i) {
      AgentTrajectory& a = log->agents[i];
      a.poses.push_back(world.agents()[i].pose);
      a.actions.push_back(actions[i]);
      a.collided.push_back(outcomes[i].collided ? 1 : 0);
      a.succeeded.push_back(outcomes[i].succeeded ? 1 : 0);
    }
    log->comm.push_back(CommStepCounts{});
  }
  finish_log(world, log);
}

void run_checkpoint(const EvalJob& job, const learn::EpisodePool& pool, int index,
                    TrajectoryLog* log) {
  learn::TeamRunner runner(pool.arenas[pool.episode_arena[index]],
                           pool.episodes[index], *job.params, job.map_cfg,
                           job.method);
  while (!runner.done()) {
    const auto rec = runner.step(policy::ActMode::deterministic, nullptr);
    const sim::World& world = runner.world();
    CommStepCounts cc;
    cc.queries_sent = rec.comm_log.queries_sent;
    cc.values_sent = rec.comm_log.values_sent;
    cc.scalars = rec.comm_log.scalars_transmitted;
    for (const auto& r : rec.comm_log.per_requester) {
      if (r.communicated) cc.communicated++;
    }
    log->comm.push_back(cc);
    for (int i = 0; i < world.n_agents(); ++i) {
      AgentTrajectory& a = log->agents[i];
      a.poses.push_back(world.agents()[i].pose);
      a.actions.push_back(rec.agents[i].action);
      a.collided.push_back(world.agents()[i].collided_last_step ? 1 : 0);
      a.succeeded.push_back(world.succeeded(i) ? 1 : 0);
    }
  }
  finish_log(runner.world(), log);
}

}  // namespace

EvalOutput eval_policy(const EvalJob& job, const learn::EpisodePool& pool) {
  if (pool.size() == 0) throw std::invalid_argument("empty evaluation pool");
  if (job.baseline == Baseline::none && job.params == nullptr) {
    throw std::invalid_argument("checkpoint evaluation needs parameters");
  }
  EvalOutput out;
  for (size_t i = 0; i < pool.size(); ++i) {
    TrajectoryLog log = log_skeleton(*pool.episodes[i], static_cast<int>(i));
    if (job.baseline == Baseline::none) {
      run_checkpoint(job, pool, static_cast<int>(i), &log);
    } else {
      run_baseline(job, pool, static_cast<int>(i), &log);
    }
    out.logs.push_back(std::move(log));
  }
  out.report = compute_metrics(out.logs, kMaxEpisodeSteps);
  return out;
}

}  // namespace covnav::bench
