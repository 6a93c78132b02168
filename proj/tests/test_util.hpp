#pragma once

#include <functional>

#include "covnav/core/rng.hpp"
#include "covnav/learn/ppo.hpp"
#include "covnav/policy/net.hpp"

namespace covnav::testutil {

inline Eigen::VectorXd random_vec(Rng& rng, int n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal() * scale;
  return v;
}

// Small architecture for gradient checks (317 params without comm heads,
// 467 with them).
inline policy::ArchConfig tiny_arch(bool with_comm_heads) {
  policy::ArchConfig cfg;
  cfg.k_rays = 4;
  cfg.digest_dim = 4;
  cfg.goal_dim = 4;
  cfg.embed_dim = 4;
  cfg.msg_embed_dim = 4;
  cfg.hidden_dim = 4;
  cfg.comm = comm::CommDims{3, 3, 8};
  cfg.with_comm_heads = with_comm_heads;
  return cfg;
}

// Synthetic transition compatible with the architecture. When `communicated`
// is set, the self-route fields carry a two-entry memory trace.
inline learn::Transition random_transition(Rng& rng, const policy::ArchConfig& cfg,
                                           bool communicated) {
  learn::Transition t;
  t.enc_input = random_vec(rng, cfg.enc_in(), 0.5);
  t.omega = random_vec(rng, cfg.comm.d_v, 0.5);
  t.hidden = random_vec(rng, cfg.hidden_dim, 0.5);
  t.presquash = random_vec(rng, cfg.action_dim, 0.8);
  t.log_prob = rng.normal();
  t.value = rng.normal();
  t.reward = rng.normal();
  t.communicated = communicated ? 1 : 0;
  if (communicated) {
    const int mem = 2;
    auto trace = std::make_shared<learn::EpisodeCommTrace>();
    trace->keys.resize(cfg.comm.d_k, mem);
    trace->values.resize(cfg.comm.d_v, mem);
    for (int c = 0; c < mem; ++c) {
      trace->keys.col(c) = random_vec(rng, cfg.comm.d_k, 0.7);
      trace->values.col(c) = random_vec(rng, cfg.comm.d_v, 0.7);
    }
    t.trace = trace;
    t.mem_len = mem;
    t.pooled = random_vec(rng, cfg.comm.d_v, 0.5);
    t.other_logits = random_vec(rng, 2, 0.5);
    t.self_position = 1;
    t.supporter_sum = random_vec(rng, cfg.comm.d_v, 0.5);
  }
  return t;
}

// Central finite differences of a loss closure over the parameter vector.
inline Eigen::VectorXd finite_diff(policy::ParamSet& params,
                                   const std::function<double()>& eval, double h) {
  Eigen::VectorXd grad(params.count());
  for (int i = 0; i < params.count(); ++i) {
    const double orig = params.values()[i];
    params.values()[i] = orig + h;
    const double hi = eval();
    params.values()[i] = orig - h;
    const double lo = eval();
    params.values()[i] = orig;
    grad[i] = (hi - lo) / (2.0 * h);
  }
  return grad;
}

inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1e-6});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace covnav::testutil
