#include "covnav/policy/net.hpp"

#include <cmath>
#include <stdexcept>

namespace covnav::policy {

namespace {

constexpr double kLogStdLo = -5.0;
constexpr double kLogStdHi = 2.0;
constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)

double softplus(double y) {
  return std::max(y, 0.0) + std::log1p(std::exp(-std::abs(y)));
}

}  // namespace

Eigen::VectorXd encode(const Eigen::VectorXd& obs_features,
                       const Eigen::VectorXd& map_digest,
                       const Eigen::VectorXd& goal, const ParamSet& p) {
  const ArchConfig& cfg = p.config();
  if (obs_features.size() != cfg.obs_dim() || map_digest.size() != cfg.digest_dim ||
      goal.size() != cfg.goal_dim) {
    throw std::invalid_argument("encoder input dimension mismatch");
  }
  Eigen::VectorXd x(cfg.enc_in());
  x << obs_features, map_digest, goal;
  Eigen::VectorXd pre = p.matrix("enc_W") * x;
  pre = pre + p.vector("enc_b");
  return pre.array().tanh().matrix();
}

PolicyOutput act(const Eigen::VectorXd& embedding, const Eigen::VectorXd& message,
                 const Eigen::VectorXd& hidden, const ParamSet& p, ActMode mode,
                 Rng* rng) {
  const ArchConfig& cfg = p.config();
  if (embedding.size() != cfg.embed_dim || message.size() != cfg.comm.d_v ||
      hidden.size() != cfg.hidden_dim) {
    throw std::invalid_argument("policy input dimension mismatch");
  }

  Eigen::VectorXd m_pre = p.matrix("msg_W") * message;
  m_pre = m_pre + p.vector("msg_b");
  Eigen::VectorXd m = m_pre.array().tanh().matrix();

  Eigen::VectorXd u(cfg.gru_in());
  u << embedding, m;

  Eigen::VectorXd z_pre = (p.matrix("gru_Wz") * u) + (p.matrix("gru_Uz") * hidden) + p.vector("gru_bz");
  Eigen::VectorXd z = (1.0 / (1.0 + (-z_pre.array()).exp())).matrix();
  Eigen::VectorXd r_pre = (p.matrix("gru_Wr") * u) + (p.matrix("gru_Ur") * hidden) + p.vector("gru_br");
  Eigen::VectorXd r = (1.0 / (1.0 + (-r_pre.array()).exp())).matrix();
  Eigen::VectorXd rh = r.cwiseProduct(hidden);
  Eigen::VectorXd h_pre = (p.matrix("gru_Wh") * u) + (p.matrix("gru_Uh") * rh) + p.vector("gru_bh");
  Eigen::VectorXd hc = h_pre.array().tanh().matrix();
  Eigen::VectorXd one_minus_z = (1.0 - z.array()).matrix();
  Eigen::VectorXd h_new = one_minus_z.cwiseProduct(hidden) + z.cwiseProduct(hc);

  PolicyOutput out;
  out.new_hidden = h_new;
  Eigen::VectorXd mean = p.matrix("act_W") * h_new;
  out.mean = mean + p.vector("act_b");
  out.log_std = p.vector("log_std").array().max(kLogStdLo).min(kLogStdHi).matrix();
  Eigen::VectorXd val = p.matrix("val_W") * h_new;
  out.value = (val + p.vector("val_b"))[0];

  if (!out.mean.allFinite() || !std::isfinite(out.value)) {
    throw std::runtime_error("non-finite policy output (diverged parameters?)");
  }

  if (mode == ActMode::sample) {
    if (rng == nullptr) throw std::invalid_argument("sample mode needs an rng");
    out.presquash.resize(cfg.action_dim);
    for (int i = 0; i < cfg.action_dim; ++i) {
      out.presquash[i] = out.mean[i] + std::exp(out.log_std[i]) * rng->normal();
    }
  } else {
    out.presquash = out.mean;
  }
  out.action.v = std::tanh(out.presquash[0]);
  out.action.w = std::tanh(out.presquash[1]);
  out.log_prob = gaussian_tanh_log_prob(out.mean, out.log_std, out.presquash);
  return out;
}

double tanh_log_det(const Eigen::VectorXd& presquash) {
  double s = 0.0;
  for (int i = 0; i < presquash.size(); ++i) {
    // log(1 - tanh(z)^2) = 2 (log 2 - z - softplus(-2z))
    s += 2.0 * (std::log(2.0) - presquash[i] - softplus(-2.0 * presquash[i]));
  }
  return s;
}

double gaussian_tanh_log_prob(const Eigen::VectorXd& mean,
                              const Eigen::VectorXd& log_std,
                              const Eigen::VectorXd& presquash) {
  Eigen::VectorXd diff = presquash - mean;
  Eigen::VectorXd inv_sigma = (-log_std.array()).exp().matrix();
  Eigen::VectorXd normed = diff.cwiseProduct(inv_sigma);
  const double sq_sum = normed.cwiseProduct(normed).sum();
  const double n = static_cast<double>(mean.size());
  return -0.5 * sq_sum - log_std.sum() - n * kHalfLog2Pi - tanh_log_det(presquash);
}

int tape_embed(ad::Tape& t, const ParamSet& p, const Eigen::VectorXd& enc_input) {
  const TensorInfo& w = p.tensor("enc_W");
  const TensorInfo& b = p.tensor("enc_b");
  const int x = t.constant(enc_input);
  return t.tanh_(t.add(t.param_matvec(w.offset, w.rows, w.cols, x),
                       t.param_vector(b.offset, b.rows)));
}

TapeCore tape_core(ad::Tape& t, const ParamSet& p, int embedding_node,
                   int omega_node, const Eigen::VectorXd& hidden) {
  const auto mv = [&](const char* name, int x) {
    const TensorInfo& ti = p.tensor(name);
    return t.param_matvec(ti.offset, ti.rows, ti.cols, x);
  };
  const auto pv = [&](const char* name) {
    const TensorInfo& ti = p.tensor(name);
    return t.param_vector(ti.offset, ti.rows);
  };

  TapeCore core;
  core.embedding = embedding_node;

  const int m = t.tanh_(t.add(mv("msg_W", omega_node), pv("msg_b")));
  const int u = t.concat(core.embedding, m);
  const int h = t.constant(hidden);

  const int z = t.sigmoid_(t.add3(mv("gru_Wz", u), mv("gru_Uz", h), pv("gru_bz")));
  const int r = t.sigmoid_(t.add3(mv("gru_Wr", u), mv("gru_Ur", h), pv("gru_br")));
  const int rh = t.hadamard(r, h);
  const int hc = t.tanh_(t.add3(mv("gru_Wh", u), mv("gru_Uh", rh), pv("gru_bh")));
  const int h_new = t.add(t.hadamard(t.one_minus(z), h), t.hadamard(z, hc));
  core.new_hidden = h_new;

  core.mean = t.add(mv("act_W", h_new), pv("act_b"));
  core.log_std = t.clamp_(pv("log_std"), kLogStdLo, kLogStdHi);
  core.value = t.add(mv("val_W", h_new), pv("val_b"));
  return core;
}

TapeQkv tape_qkv(ad::Tape& t, const ParamSet& p, int embedding_node,
                 const Eigen::VectorXd& digest, const Eigen::VectorXd& pooled) {
  const auto mv = [&](const char* name, int x) {
    const TensorInfo& ti = p.tensor(name);
    return t.param_matvec(ti.offset, ti.rows, ti.cols, x);
  };
  const auto pv = [&](const char* name) {
    const TensorInfo& ti = p.tensor(name);
    return t.param_vector(ti.offset, ti.rows);
  };
  const int digest_c = t.constant(digest);
  const int pooled_c = t.constant(pooled);
  const int kv_in = t.concat(embedding_node, digest_c);
  const int q_in = t.concat(kv_in, pooled_c);

  TapeQkv q;
  q.query = t.add(mv("q_W", q_in), pv("q_b"));
  q.key = t.add(mv("k_W", kv_in), pv("k_b"));
  q.value = t.add(mv("v_W", kv_in), pv("v_b"));
  return q;
}

int tape_log_prob(ad::Tape& t, const TapeCore& core, const Eigen::VectorXd& presquash) {
  const int z = t.constant(presquash);
  const int diff = t.sub(z, core.mean);
  const int inv_sigma = t.exp_(t.scale(core.log_std, -1.0));
  const int normed = t.hadamard(diff, inv_sigma);
  const int sq_sum = t.sum(t.hadamard(normed, normed));
  const double n = static_cast<double>(presquash.size());
  const int tail = t.scalar(-n * kHalfLog2Pi - tanh_log_det(presquash));
  return t.add3(t.scale(sq_sum, -0.5), t.scale(t.sum(core.log_std), -1.0), tail);
}

int tape_entropy(ad::Tape& t, const TapeCore& core, int action_dim) {
  // diagonal Gaussian entropy: sum(log_std) + dim/2 * log(2*pi*e)
  const double c = 0.5 * static_cast<double>(action_dim) * std::log(2.0 * M_PI * M_E);
  return t.add(t.sum(core.log_std), t.scalar(c));
}

Eigen::VectorXd gradients(const ParamSet& params, const LossBuilder& builder) {
  ad::Tape tape(params.values());
  const int loss = builder(tape, params);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.count());
  tape.backward(loss, 1.0, &grad);
  return grad;
}

}  // namespace covnav::policy
