#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace covnav::learn {

// Dense navigation reward: +1.00 per meter of geodesic progress, -0.05 on
// any step with a collision.
inline double compute_reward(double delta_geodesic, bool collided) {
  return 1.00 * delta_geodesic - (collided ? 0.05 : 0.0);
}

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

// delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t
// A_t = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// The bootstrap value stands in for V after the final stored step.
GaeResult compute_gae(const std::vector<double>& rewards,
                      const std::vector<double>& values,
                      const std::vector<uint8_t>& dones, double gamma,
                      double lambda, double bootstrap_value);

enum class Method { ippo_no_com, vanilla_com, memory_com, il };
const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct TrainConfig {
  double lr = 1e-5;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double entropy_coef = 0.001;
  double value_coef = 0.5;
  int ppo_epochs = 8;
  int minibatches = 5;
  int parallel_envs = 8;
  int rollout_steps = 80;
  uint64_t seed = 1;

  void validate() const;  // throws on non-positive entries
  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void init(int n) {
    m = Eigen::VectorXd::Zero(n);
    v = Eigen::VectorXd::Zero(n);
    t = 0;
  }
};

void adam_step(AdamState& state, Eigen::VectorXd* params,
               const Eigen::VectorXd& grad, double lr);

}  // namespace covnav::learn
