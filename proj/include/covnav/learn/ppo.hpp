#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "covnav/learn/gae.hpp"
#include "covnav/policy/net.hpp"

namespace covnav::learn {

// Frozen per-(env, agent, episode) communication record: columns are the
// keys/values physically stored in the private memory, oldest first. Wire
// data, fixed during updates.
struct EpisodeCommTrace {
  Eigen::MatrixXd keys;    // d_k x steps, column-major
  Eigen::MatrixXd values;  // d_v x steps
};

struct Transition {
  Eigen::VectorXd enc_input;  // [obs features | digest | goal]
  Eigen::VectorXd omega;      // aggregated message as received (fixed)
  Eigen::VectorXd hidden;     // recurrent state entering this step
  Eigen::VectorXd presquash;  // sampled pre-squash action
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  double delta_geodesic = 0.0;
  uint8_t done = 0;
  uint8_t collided = 0;

  // self-route data (communicated steps of the handshake methods): the
  // requester's own contribution is rebuilt from live parameters during the
  // update while everything received from others stays a fixed payload
  uint8_t communicated = 0;
  int mem_len = 0;  // past memory entries visible this step
  std::shared_ptr<const EpisodeCommTrace> trace;
  Eigen::VectorXd pooled;         // avg of stored past values (query input)
  Eigen::VectorXd other_logits;   // cross-agent logits of the other agents
  int self_position = 0;          // own slot within the logit vector
  Eigen::VectorXd supporter_sum;  // gated supporter contribution (fixed)
};

struct RolloutBuffer {
  std::vector<Transition> data;
  // per (env * n_agents + agent): indices into data, in time order
  std::vector<std::vector<int>> streams;
  std::vector<double> bootstrap;  // per stream, V(next state) at the cut
  int n_envs = 0;
  int n_agents = 0;

  void reset(int envs, int agents) {
    data.clear();
    n_envs = envs;
    n_agents = agents;
    streams.assign(static_cast<size_t>(envs) * agents, {});
    bootstrap.assign(static_cast<size_t>(envs) * agents, 0.0);
  }
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double mean_advantage_abs = 0.0;
  int samples = 0;
  bool diverged = false;
};

// In-place batch normalization to mean 0, population std 1 (guarded for
// near-constant batches).
void normalize_advantages(std::vector<double>* advantages);

// Builds the per-sample loss graph (policy surrogate + value + entropy,
// with the self-communication route rebuilt for communicated samples) and
// returns the scalar loss node.
int build_sample_loss(ad::Tape& tape, const policy::ParamSet& params,
                      const Transition& s, double advantage, double value_target,
                      const TrainConfig& cfg, double* ratio_out);

// Clipped-PPO update over the buffer: GAE, batch advantage normalization,
// ppo_epochs x minibatches shuffled passes, Adam steps. Mutates params.
UpdateStats ppo_update(const RolloutBuffer& buffer, policy::ParamSet* params,
                       const TrainConfig& cfg, AdamState* adam,
                       uint64_t shuffle_seed);

}  // namespace covnav::learn
