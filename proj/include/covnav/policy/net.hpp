#pragma once

#include <Eigen/Dense>

#include <functional>

#include "covnav/core/geometry.hpp"
#include "covnav/core/rng.hpp"
#include "covnav/policy/autodiff.hpp"
#include "covnav/policy/params.hpp"

namespace covnav::policy {

enum class ActMode { sample, deterministic };

struct PolicyOutput {
  Eigen::VectorXd mean;      // pre-squash Gaussian mean
  Eigen::VectorXd log_std;   // clamped to [-5, 2]
  double value = 0.0;
  Eigen::VectorXd new_hidden;
  Eigen::VectorXd presquash; // sampled Gaussian draw (mean in deterministic mode)
  Action action;             // tanh-squashed, always in [-1, 1]^2
  double log_prob = 0.0;     // density of `action` incl. tanh change of variables
};

// Fixed-width embedding of [observation features | map digest | goal signature].
Eigen::VectorXd encode(const Eigen::VectorXd& obs_features,
                       const Eigen::VectorXd& map_digest,
                       const Eigen::VectorXd& goal, const ParamSet& p);

// Recurrent core + Gaussian action head + value head. `message` is the
// aggregated communication vector (zero when none was received). The rng is
// only touched in sample mode.
PolicyOutput act(const Eigen::VectorXd& embedding, const Eigen::VectorXd& message,
                 const Eigen::VectorXd& hidden, const ParamSet& p, ActMode mode,
                 Rng* rng);

// log pi(action) for a stored pre-squash draw under (mean, log_std)
double gaussian_tanh_log_prob(const Eigen::VectorXd& mean,
                              const Eigen::VectorXd& log_std,
                              const Eigen::VectorXd& presquash);
// sum_i log(1 - tanh(z_i)^2), evaluated stably
double tanh_log_det(const Eigen::VectorXd& presquash);

// --- tape (training) forward, mirroring the plain path op for op ---

struct TapeCore {
  int embedding = -1;
  int mean = -1;
  int log_std = -1;  // clamped
  int value = -1;    // size-1 node
  int new_hidden = -1;
};

// enc_input = [obs features | digest | goal] as one constant leaf.
int tape_embed(ad::Tape& t, const ParamSet& p, const Eigen::VectorXd& enc_input);

// Recurrent core and heads; the message enters as a node so the
// communication route stays differentiable when it is rebuilt upstream.
TapeCore tape_core(ad::Tape& t, const ParamSet& p, int embedding_node,
                   int omega_node, const Eigen::VectorXd& hidden);

struct TapeQkv {
  int query = -1;
  int key = -1;
  int value = -1;
};

// Communication feature heads on the tape; digest and pooled past values
// enter as fixed inputs, the embedding as a differentiable node.
TapeQkv tape_qkv(ad::Tape& t, const ParamSet& p, int embedding_node,
                 const Eigen::VectorXd& digest, const Eigen::VectorXd& pooled);

// log-prob node for a stored pre-squash action (constant w.r.t. params)
int tape_log_prob(ad::Tape& t, const TapeCore& core, const Eigen::VectorXd& presquash);
// Gaussian entropy node (depends only on log_std)
int tape_entropy(ad::Tape& t, const TapeCore& core, int action_dim);

// Generic gradient evaluation: the builder assembles a scalar loss node on
// the tape; returns d(loss)/d(params).
using LossBuilder = std::function<int(ad::Tape&, const ParamSet&)>;
Eigen::VectorXd gradients(const ParamSet& params, const LossBuilder& builder);

}  // namespace covnav::policy
