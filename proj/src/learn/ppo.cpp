#include "covnav/learn/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covnav/core/rng.hpp"

namespace covnav::learn {

namespace {

// Rebuild the requester's own message contribution from live parameters:
// query/key/value heads, temporal softmax over the (fixed) stored history
// plus the current entry, cross-agent softmax against the other agents'
// fixed logits, and the fixed supporter payload added on top.
int build_self_route_omega(ad::Tape& t, const policy::ParamSet& p,
                           const Transition& s, int embedding) {
  const policy::ArchConfig& cfg = p.config();
  const int obs_dim = cfg.obs_dim();
  const Eigen::VectorXd digest = s.enc_input.segment(obs_dim, cfg.digest_dim);
  const policy::TapeQkv qkv = policy::tape_qkv(t, p, embedding, digest, s.pooled);

  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.comm.d_k));
  const int l_cur = t.scale(t.dot(qkv.query, qkv.key), scale);
  int logits, mixture;
  if (s.mem_len > 0) {
    const int l_past = t.scale(
        t.const_matvec_t(s.trace->keys.data(), cfg.comm.d_k, s.mem_len, qkv.query),
        scale);
    logits = t.concat(l_past, l_cur);
    const int w = t.softmax(logits);
    mixture = t.add(
        t.mix_columns(s.trace->values.data(), cfg.comm.d_v, s.mem_len,
                      t.slice(w, 0, s.mem_len)),
        t.smul_vec(qkv.value, t.slice(w, s.mem_len, 1)));
  } else {
    logits = l_cur;
    const int w = t.softmax(logits);
    mixture = t.smul_vec(qkv.value, t.slice(w, 0, 1));
  }

  const int self_logit = t.mean(logits);
  const int before = t.constant(s.other_logits.head(s.self_position));
  const int after =
      t.constant(s.other_logits.tail(s.other_logits.size() - s.self_position));
  const int all_logits = t.concat3(before, self_logit, after);
  const int scores = t.softmax(all_logits);
  const int self_score = t.slice(scores, s.self_position, 1);

  return t.add(t.smul_vec(mixture, self_score), t.constant(s.supporter_sum));
}

struct SampleNodes {
  int loss = -1;
  int ratio = -1;
  int vloss = -1;
  int entropy = -1;
};

SampleNodes build_sample_nodes(ad::Tape& tape, const policy::ParamSet& params,
                               const Transition& s, double advantage,
                               double value_target, const TrainConfig& cfg) {
  const int embedding = policy::tape_embed(tape, params, s.enc_input);
  const int omega = s.communicated
                        ? build_self_route_omega(tape, params, s, embedding)
                        : tape.constant(s.omega);
  const policy::TapeCore core =
      policy::tape_core(tape, params, embedding, omega, s.hidden);

  SampleNodes nodes;
  const int lp = policy::tape_log_prob(tape, core, s.presquash);
  nodes.ratio = tape.exp_(tape.sub(lp, tape.scalar(s.log_prob)));
  const int surr = tape.smin(
      tape.scale(nodes.ratio, advantage),
      tape.scale(tape.clamp_(nodes.ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps),
                 advantage));

  const int vdiff = tape.sub(core.value, tape.scalar(value_target));
  nodes.vloss = tape.hadamard(vdiff, vdiff);
  nodes.entropy = policy::tape_entropy(tape, core, params.config().action_dim);

  nodes.loss = tape.add3(tape.scale(surr, -1.0), tape.scale(nodes.vloss, cfg.value_coef),
                         tape.scale(nodes.entropy, -cfg.entropy_coef));
  return nodes;
}

}  // namespace

void normalize_advantages(std::vector<double>* advantages) {
  const size_t n = advantages->size();
  if (n == 0) return;
  double mean = 0.0;
  for (double a : *advantages) mean += a;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double a : *advantages) var += (a - mean) * (a - mean);
  const double denom = std::max(std::sqrt(var / static_cast<double>(n)), 1e-8);
  for (double& a : *advantages) a = (a - mean) / denom;
}

int build_sample_loss(ad::Tape& tape, const policy::ParamSet& params,
                      const Transition& s, double advantage, double value_target,
                      const TrainConfig& cfg, double* ratio_out) {
  const SampleNodes nodes = build_sample_nodes(tape, params, s, advantage,
                                               value_target, cfg);
  if (ratio_out != nullptr) *ratio_out = tape.value(nodes.ratio)[0];
  return nodes.loss;
}

UpdateStats ppo_update(const RolloutBuffer& buffer, policy::ParamSet* params,
                       const TrainConfig& cfg, AdamState* adam,
                       uint64_t shuffle_seed) {
  UpdateStats stats;
  const int n = static_cast<int>(buffer.data.size());
  if (n == 0) throw std::invalid_argument("empty rollout buffer");
  stats.samples = n;

  // GAE per (env, agent) stream
  std::vector<double> advantages(n, 0.0), value_targets(n, 0.0);
  for (size_t si = 0; si < buffer.streams.size(); ++si) {
    const auto& stream = buffer.streams[si];
    if (stream.empty()) continue;
    std::vector<double> rewards, values;
    std::vector<uint8_t> dones;
    for (int idx : stream) {
      rewards.push_back(buffer.data[idx].reward);
      values.push_back(buffer.data[idx].value);
      dones.push_back(buffer.data[idx].done);
    }
    const GaeResult g = compute_gae(rewards, values, dones, cfg.gamma,
                                    cfg.gae_lambda, buffer.bootstrap[si]);
    for (size_t k = 0; k < stream.size(); ++k) {
      advantages[stream[k]] = g.advantages[k];
      value_targets[stream[k]] = g.returns[k];
    }
  }

  normalize_advantages(&advantages);

  double sum_abs_adv = 0.0;
  for (double a : advantages) sum_abs_adv += std::abs(a);
  stats.mean_advantage_abs = sum_abs_adv / n;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng(Rng::derive(shuffle_seed, 0x5AFF1E));

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params->count());
  ad::Tape tape(params->values());
  long stat_count = 0;

  for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
    // Fisher-Yates with the deterministic stream
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(i) + 1));
      std::swap(order[i], order[j]);
    }
    for (int mb = 0; mb < cfg.minibatches; ++mb) {
      const int lo = static_cast<int>(static_cast<long>(mb) * n / cfg.minibatches);
      const int hi = static_cast<int>(static_cast<long>(mb + 1) * n / cfg.minibatches);
      if (hi <= lo) continue;
      grad.setZero();
      const double inv = 1.0 / static_cast<double>(hi - lo);
      for (int k = lo; k < hi; ++k) {
        const int idx = order[k];
        const Transition& s = buffer.data[idx];
        tape.clear();
        const SampleNodes nodes =
            build_sample_nodes(tape, *params, s, advantages[idx],
                               value_targets[idx], cfg);
        const double loss_val = tape.value(nodes.loss)[0];
        if (!std::isfinite(loss_val)) {
          stats.diverged = true;
          return stats;
        }
        tape.backward(nodes.loss, inv, &grad);

        const double ratio = tape.value(nodes.ratio)[0];
        const double a = advantages[idx];
        const double clipped = covnav::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
        stats.policy_loss += -std::min(ratio * a, clipped * a);
        stats.value_loss += tape.value(nodes.vloss)[0];
        stats.entropy += tape.value(nodes.entropy)[0];
        stats.approx_kl += (ratio - 1.0) - std::log(ratio);
        stats.clip_fraction += std::abs(ratio - 1.0) > cfg.clip_eps ? 1.0 : 0.0;
        stat_count++;
      }
      if (!grad.allFinite()) {
        stats.diverged = true;
        return stats;
      }
      adam_step(*adam, &params->values(), grad, cfg.lr);
    }
  }
  if (stat_count > 0) {
    const double c = static_cast<double>(stat_count);
    stats.policy_loss /= c;
    stats.value_loss /= c;
    stats.entropy /= c;
    stats.approx_kl /= c;
    stats.clip_fraction /= c;
  }
  params->bump_version();
  return stats;
}

}  // namespace covnav::learn
