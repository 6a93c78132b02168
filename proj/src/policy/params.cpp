#include "covnav/policy/params.hpp"

#include <json.hpp>

#include <stdexcept>

#include "covnav/core/rng.hpp"

namespace covnav::policy {

std::string ArchConfig::to_json() const {
  nlohmann::json j;
  j["k_rays"] = k_rays;
  j["digest_dim"] = digest_dim;
  j["goal_dim"] = goal_dim;
  j["embed_dim"] = embed_dim;
  j["msg_embed_dim"] = msg_embed_dim;
  j["hidden_dim"] = hidden_dim;
  j["action_dim"] = action_dim;
  j["d_q"] = comm.d_q;
  j["d_k"] = comm.d_k;
  j["d_v"] = comm.d_v;
  j["with_comm_heads"] = with_comm_heads;
  return j.dump();
}

ArchConfig ArchConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ArchConfig c;
  c.k_rays = j.at("k_rays").get<int>();
  c.digest_dim = j.at("digest_dim").get<int>();
  c.goal_dim = j.at("goal_dim").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.msg_embed_dim = j.at("msg_embed_dim").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.action_dim = j.at("action_dim").get<int>();
  c.comm.d_q = j.at("d_q").get<int>();
  c.comm.d_k = j.at("d_k").get<int>();
  c.comm.d_v = j.at("d_v").get<int>();
  c.with_comm_heads = j.at("with_comm_heads").get<bool>();
  return c;
}

ParamSet::ParamSet(ArchConfig cfg) : cfg_(cfg) {
  add_matrix("enc_W", cfg_.embed_dim, cfg_.enc_in());
  add_vector("enc_b", cfg_.embed_dim);
  add_matrix("msg_W", cfg_.msg_embed_dim, cfg_.comm.d_v);
  add_vector("msg_b", cfg_.msg_embed_dim);
  add_matrix("gru_Wz", cfg_.hidden_dim, cfg_.gru_in());
  add_matrix("gru_Uz", cfg_.hidden_dim, cfg_.hidden_dim);
  add_vector("gru_bz", cfg_.hidden_dim);
  add_matrix("gru_Wr", cfg_.hidden_dim, cfg_.gru_in());
  add_matrix("gru_Ur", cfg_.hidden_dim, cfg_.hidden_dim);
  add_vector("gru_br", cfg_.hidden_dim);
  add_matrix("gru_Wh", cfg_.hidden_dim, cfg_.gru_in());
  add_matrix("gru_Uh", cfg_.hidden_dim, cfg_.hidden_dim);
  add_vector("gru_bh", cfg_.hidden_dim);
  add_matrix("act_W", cfg_.action_dim, cfg_.hidden_dim);
  add_vector("act_b", cfg_.action_dim);
  add_vector("log_std", cfg_.action_dim);
  add_matrix("val_W", 1, cfg_.hidden_dim);
  add_vector("val_b", 1);
  if (cfg_.with_comm_heads) {
    add_matrix("q_W", cfg_.comm.d_q, cfg_.q_in());
    add_vector("q_b", cfg_.comm.d_q);
    add_matrix("k_W", cfg_.comm.d_k, cfg_.kv_in());
    add_vector("k_b", cfg_.comm.d_k);
    add_matrix("v_W", cfg_.comm.d_v, cfg_.kv_in());
    add_vector("v_b", cfg_.comm.d_v);
  }
  int total = 0;
  for (const auto& t : layout_) total += t.size();
  flat_ = Eigen::VectorXd::Zero(total);
}

void ParamSet::add_matrix(const std::string& name, int rows, int cols) {
  int off = layout_.empty() ? 0 : layout_.back().offset + layout_.back().size();
  layout_.push_back({name, off, rows, cols});
}

void ParamSet::add_vector(const std::string& name, int n) {
  int off = layout_.empty() ? 0 : layout_.back().offset + layout_.back().size();
  layout_.push_back({name, off, n, 0});
}

void ParamSet::init(uint64_t seed) {
  Rng rng(Rng::derive(seed, 0x9A7A));
  for (const auto& t : layout_) {
    if (t.name == "log_std") {
      flat_.segment(t.offset, t.size()).setConstant(-0.5);
    } else if (t.cols > 0) {
      const double scale = 1.0 / std::sqrt(static_cast<double>(t.cols));
      for (int i = 0; i < t.size(); ++i) flat_[t.offset + i] = rng.normal() * scale;
    } else {
      flat_.segment(t.offset, t.size()).setZero();
    }
  }
  version_ = 0;
}

const TensorInfo& ParamSet::tensor(const std::string& name) const {
  for (const auto& t : layout_) {
    if (t.name == name) return t;
  }
  throw std::invalid_argument("unknown tensor: " + name);
}

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
ParamSet::matrix(const std::string& name) const {
  const TensorInfo& t = tensor(name);
  if (t.cols == 0) throw std::invalid_argument(name + " is not a matrix");
  return {flat_.data() + t.offset, t.rows, t.cols};
}

Eigen::Map<const Eigen::VectorXd> ParamSet::vector(const std::string& name) const {
  const TensorInfo& t = tensor(name);
  return {flat_.data() + t.offset, t.rows};
}

comm::QkvHeads ParamSet::qkv_heads() const {
  if (!cfg_.with_comm_heads) throw std::logic_error("architecture has no comm heads");
  comm::QkvHeads h;
  h.dims = cfg_.comm;
  const auto& qw = tensor("q_W");
  const auto& qb = tensor("q_b");
  h.query = {flat_.data() + qw.offset, flat_.data() + qb.offset, qw.rows, qw.cols};
  const auto& kw = tensor("k_W");
  const auto& kb = tensor("k_b");
  h.key = {flat_.data() + kw.offset, flat_.data() + kb.offset, kw.rows, kw.cols};
  const auto& vw = tensor("v_W");
  const auto& vb = tensor("v_b");
  h.value = {flat_.data() + vw.offset, flat_.data() + vb.offset, vw.rows, vw.cols};
  return h;
}

}  // namespace covnav::policy
