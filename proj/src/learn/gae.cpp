#include "covnav/learn/gae.hpp"

#include <json.hpp>

#include <stdexcept>

namespace covnav::learn {

GaeResult compute_gae(const std::vector<double>& rewards,
                      const std::vector<double>& values,
                      const std::vector<uint8_t>& dones, double gamma,
                      double lambda, double bootstrap_value) {
  const size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw std::invalid_argument("reward/value/done arrays must agree in length");
  }
  GaeResult r;
  r.advantages.resize(n);
  r.returns.resize(n);
  double gae = 0.0;
  for (size_t k = n; k-- > 0;) {
    const double not_done = dones[k] ? 0.0 : 1.0;
    const double next_v = (k + 1 < n) ? values[k + 1] : bootstrap_value;
    const double delta = rewards[k] + gamma * next_v * not_done - values[k];
    gae = delta + gamma * lambda * not_done * gae;
    r.advantages[k] = gae;
    r.returns[k] = gae + values[k];
  }
  return r;
}

const char* to_string(Method m) {
  switch (m) {
    case Method::ippo_no_com: return "ippo";
    case Method::vanilla_com: return "vanilla";
    case Method::memory_com: return "memory";
    default: return "il";
  }
}

Method method_from_string(const std::string& s) {
  if (s == "ippo") return Method::ippo_no_com;
  if (s == "vanilla") return Method::vanilla_com;
  if (s == "memory") return Method::memory_com;
  if (s == "il") return Method::il;
  throw std::invalid_argument("unknown method: " + s);
}

void TrainConfig::validate() const {
  if (lr <= 0 || gamma <= 0 || gae_lambda <= 0 || clip_eps <= 0 ||
      entropy_coef <= 0 || value_coef <= 0 || ppo_epochs <= 0 ||
      minibatches <= 0 || parallel_envs <= 0 || rollout_steps <= 0) {
    throw std::invalid_argument("train config entries must all be positive");
  }
}

std::string TrainConfig::to_json() const {
  nlohmann::json j;
  j["lr"] = lr;
  j["gamma"] = gamma;
  j["gae_lambda"] = gae_lambda;
  j["clip_eps"] = clip_eps;
  j["entropy_coef"] = entropy_coef;
  j["value_coef"] = value_coef;
  j["ppo_epochs"] = ppo_epochs;
  j["minibatches"] = minibatches;
  j["parallel_envs"] = parallel_envs;
  j["rollout_steps"] = rollout_steps;
  j["seed"] = seed;
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  TrainConfig c;
  c.lr = j.value("lr", c.lr);
  c.gamma = j.value("gamma", c.gamma);
  c.gae_lambda = j.value("gae_lambda", c.gae_lambda);
  c.clip_eps = j.value("clip_eps", c.clip_eps);
  c.entropy_coef = j.value("entropy_coef", c.entropy_coef);
  c.value_coef = j.value("value_coef", c.value_coef);
  c.ppo_epochs = j.value("ppo_epochs", c.ppo_epochs);
  c.minibatches = j.value("minibatches", c.minibatches);
  c.parallel_envs = j.value("parallel_envs", c.parallel_envs);
  c.rollout_steps = j.value("rollout_steps", c.rollout_steps);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

void adam_step(AdamState& state, Eigen::VectorXd* params,
               const Eigen::VectorXd& grad, double lr) {
  state.t++;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  *params -= (lr / bc1) * state.m.cwiseQuotient(
                 ((state.v / bc2).array().sqrt() + state.eps).matrix());
}

}  // namespace covnav::learn
