#include "covnav/learn/bc.hpp"

#include <chrono>
#include <cmath>

namespace covnav::learn {

namespace {

// Teacher actions sit on the [-1, 1] boundary; cap before atanh so targets
// stay finite (tanh(2.994) ~ 0.995).
Eigen::VectorXd presquash_target(const Action& a) {
  Eigen::VectorXd t(2);
  t[0] = std::atanh(covnav::clamp(a.v, -0.995, 0.995));
  t[1] = std::atanh(covnav::clamp(a.w, -0.995, 0.995));
  return t;
}

}  // namespace

TrainResult bc_train(const TeamRunner::ActionOverride& teacher,
                     const EpisodePool& train_pool, const EpisodePool& probe_pool,
                     const TrainConfig& cfg, const policy::ArchConfig& arch,
                     const mapping::MapConfig& map_cfg, const TrainBudget& budget) {
  cfg.validate();
  TrainResult result{policy::ParamSet(arch), {}, 0, 0, false, -1.0};
  result.params.init(cfg.seed);
  AdamState adam;
  adam.init(result.params.count());

  struct Slot {
    std::unique_ptr<TeamRunner> runner;
    std::vector<int> order;
    size_t pos = 0;
  };
  std::vector<Slot> slots(cfg.parallel_envs);
  for (int e = 0; e < cfg.parallel_envs; ++e) {
    Rng order_rng(Rng::derive(cfg.seed, 0xBC00 + e));
    slots[e].order.resize(train_pool.size());
    for (size_t i = 0; i < train_pool.size(); ++i) slots[e].order[i] = static_cast<int>(i);
    for (size_t i = train_pool.size() - 1; i > 0; --i) {
      const size_t j = order_rng.uniform_int(i + 1);
      std::swap(slots[e].order[i], slots[e].order[j]);
    }
  }
  auto next_runner = [&](Slot& slot) {
    const int idx = slot.order[slot.pos];
    slot.pos = (slot.pos + 1) % slot.order.size();
    slot.runner = std::make_unique<TeamRunner>(
        train_pool.arenas[train_pool.episode_arena[idx]], train_pool.episodes[idx],
        result.params, map_cfg, Method::il);
  };
  for (auto& s : slots) next_runner(s);

  std::vector<Transition> batch;
  const auto t_start = std::chrono::steady_clock::now();
  long env_steps = 0;

  for (long update = 0;; ++update) {
    if (budget.max_updates <= 0 && budget.max_seconds <= 0.0) break;
    if (budget.max_updates > 0 && update >= budget.max_updates) break;
    if (budget.max_seconds > 0.0) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      if (elapsed >= budget.max_seconds) break;
    }

    batch.clear();
    for (int step = 0; step < cfg.rollout_steps; ++step) {
      for (auto& slot : slots) {
        if (slot.runner->done()) next_runner(slot);
        TeamRunner::StepResult rec =
            slot.runner->step(policy::ActMode::deterministic, nullptr, teacher);
        env_steps++;
        for (auto& a : rec.agents) {
          if (!a.active) continue;
          Transition tr = std::move(a.transition);
          tr.presquash = presquash_target(a.action);  // regression target
          batch.push_back(std::move(tr));
        }
      }
    }

    const int n = static_cast<int>(batch.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng shuffle(Rng::derive(cfg.seed, 0xBC5F + static_cast<uint64_t>(update)));
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(result.params.count());
    ad::Tape tape(result.params.values());
    double loss_acc = 0.0;
    long loss_count = 0;

    for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
      for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(shuffle.uniform_int(static_cast<uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
      }
      for (int mb = 0; mb < cfg.minibatches; ++mb) {
        const int lo = static_cast<int>(static_cast<long>(mb) * n / cfg.minibatches);
        const int hi = static_cast<int>(static_cast<long>(mb + 1) * n / cfg.minibatches);
        if (hi <= lo) continue;
        grad.setZero();
        const double inv = 1.0 / static_cast<double>(hi - lo);
        for (int k = lo; k < hi; ++k) {
          const Transition& s = batch[order[k]];
          tape.clear();
          const int emb = policy::tape_embed(tape, result.params, s.enc_input);
          const int omega = tape.constant(s.omega);
          const policy::TapeCore core =
              policy::tape_core(tape, result.params, emb, omega, s.hidden);
          const int diff = tape.sub(core.mean, tape.constant(s.presquash));
          const int loss = tape.sum(tape.hadamard(diff, diff));
          loss_acc += tape.value(loss)[0];
          loss_count++;
          tape.backward(loss, inv, &grad);
        }
        adam_step(adam, &result.params.values(), grad, cfg.lr);
      }
    }
    result.params.bump_version();
    result.updates_done = update + 1;

    CurvePoint pt;
    pt.update = update + 1;
    pt.env_steps = env_steps;
    pt.policy_loss = loss_count > 0 ? loss_acc / loss_count : 0.0;
    if (probe_pool.size() > 0 && budget.probe_every > 0 &&
        (update + 1) % budget.probe_every == 0) {
      pt.probe_sr = probe_success_rate(result.params, Method::il, map_cfg, probe_pool,
                                       budget.probe_episodes);
      result.best_probe_sr = std::max(result.best_probe_sr, pt.probe_sr);
    }
    result.curve.push_back(pt);
  }
  return result;
}

}  // namespace covnav::learn
