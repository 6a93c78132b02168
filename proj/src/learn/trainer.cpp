#include "covnav/learn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace covnav::learn {

TeamRunner::TeamRunner(std::shared_ptr<const scene::Arena> arena,
                       std::shared_ptr<const scene::EpisodeSpec> episode,
                       const policy::ParamSet& params,
                       const mapping::MapConfig& map_cfg, Method method,
                       sim::SimConfig sim_cfg)
    : arena_(std::move(arena)),
      episode_(std::move(episode)),
      params_(&params),
      map_cfg_(map_cfg),
      method_(method) {
  sim_cfg.k_rays = params.config().k_rays;
  world_ = std::make_unique<sim::World>(sim::World::make(arena_, episode_, sim_cfg));
  const int n = world_->n_agents();
  for (int i = 0; i < n; ++i) {
    maps_.emplace_back(map_cfg_);
    memories_.push_back(std::make_unique<comm::CommMemory>(i));
    traces_.push_back(std::make_shared<EpisodeCommTrace>());
    hidden_.push_back(Eigen::VectorXd::Zero(params.config().hidden_dim));
    last_pose_.push_back(world_->agents()[i].pose);
  }
}

void TeamRunner::run_phase_a(policy::ActMode mode, Rng* rng,
                             const ActionOverride& override_action) {
  const int n = world_->n_agents();
  const policy::ArchConfig& cfg = params_->config();

  std::vector<Eigen::VectorXd> enc_inputs(n), embeddings(n), digests(n);
  std::vector<int> mem_len(n, 0);
  for (int i = 0; i < n; ++i) {
    const sim::Observation obs = world_->observe(i);
    const Pose cur = world_->agents()[i].pose;
    maps_[i].update(obs, last_pose_[i], cur);
    last_pose_[i] = cur;
    digests[i] = maps_[i].summary(cur);
    const Eigen::VectorXd goal = Eigen::Map<const Eigen::VectorXd>(
        obs.goal_signature->vector.data(), obs.goal_signature->vector.size());
    Eigen::VectorXd feat = obs.features();
    enc_inputs[i].resize(cfg.enc_in());
    enc_inputs[i] << feat, digests[i], goal;
    embeddings[i] = policy::encode(feat, digests[i], goal, *params_);
    mem_len[i] = static_cast<int>(memories_[i]->size());
  }

  const bool with_comm = (method_ == Method::vanilla_com || method_ == Method::memory_com) && n > 1;
  comm::RoundResult round;
  if (with_comm) {
    std::vector<comm::CommMemory*> mems;
    for (auto& m : memories_) mems.push_back(m.get());
    const comm::Mode cmode = method_ == Method::memory_com ? comm::Mode::memory
                                                           : comm::Mode::vanilla;
    round = comm::run_round(cmode, embeddings, digests, mems,
                            params_->qkv_heads(), world_->t(), 1.0 / n);
  } else {
    round.messages.resize(n);
    for (int i = 0; i < n; ++i) {
      round.messages[i].vector = Eigen::VectorXd::Zero(cfg.comm.d_v);
    }
    round.log.per_requester.resize(n);
  }

  Pending pend;
  pend.agents.resize(n);
  pend.actions.resize(n);
  pend.values.assign(n, 0.0);
  pend.comm_log = round.log;
  for (int i = 0; i < n; ++i) {
    AgentRecord& rec = pend.agents[i];
    if (world_->agents()[i].frozen) {
      pend.actions[i] = Action{0.0, 0.0};
      continue;
    }
    const policy::PolicyOutput out =
        policy::act(embeddings[i], round.messages[i].vector, hidden_[i], *params_,
                    mode, rng);
    rec.active = true;
    Transition& tr = rec.transition;
    tr.enc_input = std::move(enc_inputs[i]);
    tr.omega = round.messages[i].vector;
    tr.hidden = hidden_[i];
    tr.presquash = out.presquash;
    tr.log_prob = out.log_prob;
    tr.value = out.value;
    if (with_comm) {
      tr.communicated = round.messages[i].communicated ? 1 : 0;
      if (tr.communicated) {
        tr.mem_len = mem_len[i];
        tr.trace = traces_[i];
        tr.pooled = round.pooled[i];
        tr.self_position = i;
        tr.other_logits.resize(n - 1);
        int k = 0;
        for (int m = 0; m < n; ++m) {
          if (m != i) tr.other_logits[k++] = round.agent_logits[i][m];
        }
        tr.supporter_sum = round.supporter_sum[i];
      }
    }
    pend.values[i] = out.value;
    hidden_[i] = out.new_hidden;
    rec.action = out.action;
    pend.actions[i] = out.action;
  }
  if (override_action) {
    for (int i = 0; i < n; ++i) {
      if (world_->agents()[i].frozen) continue;
      const Action a = override_action(*world_, i);
      pend.actions[i] = a;
      pend.agents[i].action = a;
    }
  }
  pending_ = std::move(pend);
}

TeamRunner::StepResult TeamRunner::step(policy::ActMode mode, Rng* rng,
                                        const ActionOverride& override_action) {
  if (!pending_) run_phase_a(mode, rng, override_action);
  Pending pend = std::move(*pending_);
  pending_.reset();

  const std::vector<sim::StepOutcome> outcomes = world_->step(pend.actions);
  StepResult res;
  res.comm_log = std::move(pend.comm_log);
  res.episode_done = world_->done();
  res.agents = std::move(pend.agents);
  for (size_t i = 0; i < res.agents.size(); ++i) {
    if (!res.agents[i].active) continue;
    Transition& tr = res.agents[i].transition;
    tr.delta_geodesic = outcomes[i].delta_geodesic;
    tr.collided = outcomes[i].collided ? 1 : 0;
    tr.reward = compute_reward(outcomes[i].delta_geodesic, outcomes[i].collided);
    tr.done = (outcomes[i].succeeded || outcomes[i].done) ? 1 : 0;
  }
  return res;
}

std::vector<double> TeamRunner::peek_values(policy::ActMode mode, Rng* rng) {
  if (!pending_) run_phase_a(mode, rng, nullptr);
  return pending_->values;
}

void TeamRunner::finalize_traces() {
  if (method_ != Method::memory_com) return;
  const comm::CommDims dims = params_->config().comm;
  for (size_t i = 0; i < memories_.size(); ++i) {
    const auto& entries = memories_[i]->entries();
    const int cols = static_cast<int>(entries.size());
    traces_[i]->keys.resize(dims.d_k, cols);
    traces_[i]->values.resize(dims.d_v, cols);
    for (int c = 0; c < cols; ++c) {
      traces_[i]->keys.col(c) = entries[c].key;
      traces_[i]->values.col(c) = entries[c].value;
    }
    // subsequent transitions of a continuing episode reference a new trace
    auto fresh = std::make_shared<EpisodeCommTrace>();
    traces_[i] = std::move(fresh);
  }
}

namespace {

struct EnvSlot {
  std::unique_ptr<TeamRunner> runner;
  Rng rng;
  std::vector<int> order;
  size_t pos = 0;
  std::vector<double> agent_reward_acc;

  int next_episode() {
    const int e = order[pos];
    pos = (pos + 1) % order.size();
    return e;
  }
};

std::unique_ptr<TeamRunner> make_runner(const EpisodePool& pool, int episode_idx,
                                        const policy::ParamSet& params,
                                        const mapping::MapConfig& map_cfg,
                                        Method method) {
  return std::make_unique<TeamRunner>(pool.arenas[pool.episode_arena[episode_idx]],
                                      pool.episodes[episode_idx], params, map_cfg,
                                      method);
}

}  // namespace

double probe_success_rate(const policy::ParamSet& params, Method method,
                          const mapping::MapConfig& map_cfg,
                          const EpisodePool& pool, int max_episodes) {
  const int count = max_episodes > 0
                        ? std::min<int>(max_episodes, static_cast<int>(pool.size()))
                        : static_cast<int>(pool.size());
  if (count == 0) throw std::invalid_argument("empty probe pool");
  long succ = 0, total = 0;
  for (int e = 0; e < count; ++e) {
    TeamRunner runner(pool.arenas[pool.episode_arena[e]], pool.episodes[e], params,
                      map_cfg, method);
    while (!runner.done()) {
      runner.step(policy::ActMode::deterministic, nullptr);
    }
    for (int i = 0; i < runner.n_agents(); ++i) {
      total++;
      if (runner.world().succeeded(i)) succ++;
    }
  }
  return static_cast<double>(succ) / static_cast<double>(total);
}

TrainResult train_run(Method method, const EpisodePool& train_pool,
                      const EpisodePool& probe_pool, const TrainConfig& cfg,
                      const policy::ArchConfig& arch,
                      const mapping::MapConfig& map_cfg, const TrainBudget& budget) {
  cfg.validate();
  if (train_pool.size() == 0) throw std::invalid_argument("empty training pool");
  if (method == Method::il) {
    throw std::invalid_argument("imitation runs through bc_train");
  }

  TrainResult result{policy::ParamSet(arch), {}, 0, 0, false, -1.0};
  result.params.init(cfg.seed);
  AdamState adam;
  adam.init(result.params.count());

  const int n_agents = train_pool.episodes[0]->n_agents;
  std::vector<EnvSlot> slots(cfg.parallel_envs);
  for (int e = 0; e < cfg.parallel_envs; ++e) {
    slots[e].rng.reseed(Rng::derive(cfg.seed, 0xE200 + e));
    slots[e].order.resize(train_pool.size());
    for (size_t i = 0; i < train_pool.size(); ++i) slots[e].order[i] = static_cast<int>(i);
    for (size_t i = train_pool.size() - 1; i > 0; --i) {
      const size_t j = slots[e].rng.uniform_int(i + 1);
      std::swap(slots[e].order[i], slots[e].order[j]);
    }
    slots[e].runner = make_runner(train_pool, slots[e].next_episode(), result.params,
                                  map_cfg, method);
    slots[e].agent_reward_acc.assign(n_agents, 0.0);
  }

  RolloutBuffer buffer;
  const auto t_start = std::chrono::steady_clock::now();
  double completed_reward_sum = 0.0;
  long completed_episodes = 0;
  long env_steps = 0;
  double last_probe = -1.0;

  for (long update = 0;; ++update) {
    if (budget.max_updates > 0 && update >= budget.max_updates) break;
    if (budget.max_seconds > 0.0) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      if (elapsed >= budget.max_seconds) break;
    }

    buffer.reset(cfg.parallel_envs, n_agents);
    for (int step = 0; step < cfg.rollout_steps; ++step) {
      for (int e = 0; e < cfg.parallel_envs; ++e) {
        EnvSlot& slot = slots[e];
        if (slot.runner->done()) {
          slot.runner->finalize_traces();
          double ep_reward = 0.0;
          for (double r : slot.agent_reward_acc) ep_reward += r;
          completed_reward_sum += ep_reward / n_agents;
          completed_episodes++;
          slot.agent_reward_acc.assign(n_agents, 0.0);
          slot.runner = make_runner(train_pool, slot.next_episode(), result.params,
                                    map_cfg, method);
        }
        TeamRunner::StepResult rec = slot.runner->step(policy::ActMode::sample, &slot.rng);
        env_steps++;
        result.total_scalars_transmitted += rec.comm_log.scalars_transmitted;
        for (int i = 0; i < n_agents; ++i) {
          if (!rec.agents[i].active) continue;
          slot.agent_reward_acc[i] += rec.agents[i].transition.reward;
          buffer.data.push_back(std::move(rec.agents[i].transition));
          buffer.streams[static_cast<size_t>(e) * n_agents + i].push_back(
              static_cast<int>(buffer.data.size()) - 1);
        }
      }
    }
    // bootstraps for episodes cut by the rollout boundary
    for (int e = 0; e < cfg.parallel_envs; ++e) {
      EnvSlot& slot = slots[e];
      if (slot.runner->done()) continue;
      bool needs_bootstrap = false;
      for (int i = 0; i < n_agents; ++i) {
        const auto& stream = buffer.streams[static_cast<size_t>(e) * n_agents + i];
        if (!stream.empty() && !buffer.data[stream.back()].done) needs_bootstrap = true;
      }
      if (!needs_bootstrap) continue;
      const std::vector<double> values =
          slot.runner->peek_values(policy::ActMode::sample, &slot.rng);
      for (int i = 0; i < n_agents; ++i) {
        buffer.bootstrap[static_cast<size_t>(e) * n_agents + i] = values[i];
      }
    }
    for (int e = 0; e < cfg.parallel_envs; ++e) slots[e].runner->finalize_traces();

    const UpdateStats stats = ppo_update(buffer, &result.params, cfg, &adam,
                                         Rng::derive(cfg.seed, 0xADD + static_cast<uint64_t>(update)));
    if (stats.diverged) {
      std::ostringstream msg;
      msg << "ppo update diverged at update " << update
          << " (policy_loss=" << stats.policy_loss << ", samples=" << stats.samples << ")";
      throw std::runtime_error(msg.str());
    }
    result.updates_done = update + 1;

    CurvePoint pt;
    pt.update = update + 1;
    pt.env_steps = env_steps;
    pt.mean_episode_reward =
        completed_episodes > 0 ? completed_reward_sum / completed_episodes : 0.0;
    pt.policy_loss = stats.policy_loss;
    pt.value_loss = stats.value_loss;
    pt.entropy = stats.entropy;
    pt.scalars_transmitted = result.total_scalars_transmitted;
    completed_reward_sum = 0.0;
    completed_episodes = 0;

    const bool probe_now = probe_pool.size() > 0 && budget.probe_every > 0 &&
                           ((update + 1) % budget.probe_every == 0);
    if (probe_now) {
      last_probe = probe_success_rate(result.params, method, map_cfg, probe_pool,
                                      budget.probe_episodes);
      result.best_probe_sr = std::max(result.best_probe_sr, last_probe);
      pt.probe_sr = last_probe;
      if (budget.target_probe_sr >= 0.0 && last_probe >= budget.target_probe_sr) {
        result.curve.push_back(pt);
        result.reached_target = true;
        return result;
      }
    }
    result.curve.push_back(pt);
  }
  return result;
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "update,env_steps,mean_episode_reward,probe_sr,policy_loss,value_loss,entropy,scalars_transmitted\n";
  for (const auto& p : curve) {
    out << p.update << ',' << p.env_steps << ',' << p.mean_episode_reward << ','
        << p.probe_sr << ',' << p.policy_loss << ',' << p.value_loss << ','
        << p.entropy << ',' << p.scalars_transmitted << '\n';
  }
  return out.str();
}

}  // namespace covnav::learn
