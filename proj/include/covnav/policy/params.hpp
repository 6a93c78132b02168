#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "covnav/comm/protocol.hpp"

namespace covnav::policy {

// Network widths. The layout of ParamSet is a pure function of this config.
struct ArchConfig {
  int k_rays = 72;
  int digest_dim = 204;   // mapping digest width (25 * C + 4)
  int goal_dim = 72;      // goal signature length
  int embed_dim = 64;
  int msg_embed_dim = 64; // compressed message width fed to the core
  int hidden_dim = 64;    // recurrent core width
  int action_dim = 2;
  comm::CommDims comm;
  bool with_comm_heads = true;

  int obs_dim() const { return 4 * k_rays + 2; }
  int enc_in() const { return obs_dim() + digest_dim + goal_dim; }
  int gru_in() const { return embed_dim + msg_embed_dim; }
  int kv_in() const { return embed_dim + digest_dim; }
  int q_in() const { return kv_in() + comm.d_v; }

  std::string to_json() const;
  static ArchConfig from_json(const std::string& text);
  bool operator==(const ArchConfig&) const = default;
};

struct TensorInfo {
  std::string name;
  int offset = 0;
  int rows = 0;
  int cols = 0;  // 0 for vectors
  int size() const { return cols > 0 ? rows * cols : rows; }
};

// All trainable parameters in one flat vector with a named layout.
// Matrices are stored row-major. Shared across agents in a team; rollout
// workers read a fixed version while the learner publishes new ones.
class ParamSet {
 public:
  explicit ParamSet(ArchConfig cfg);

  // Deterministic initialization: weights ~ N(0, 1/sqrt(fan_in)), biases 0,
  // log_std entries -0.5.
  void init(uint64_t seed);

  const ArchConfig& config() const { return cfg_; }
  Eigen::VectorXd& values() { return flat_; }
  const Eigen::VectorXd& values() const { return flat_; }
  int count() const { return static_cast<int>(flat_.size()); }
  int version() const { return version_; }
  void bump_version() { version_++; }
  void set_version(int v) { version_ = v; }

  const std::vector<TensorInfo>& layout() const { return layout_; }
  const TensorInfo& tensor(const std::string& name) const;

  // Row-major weight view (rows x cols) starting at the tensor offset.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
  matrix(const std::string& name) const;
  Eigen::Map<const Eigen::VectorXd> vector(const std::string& name) const;

  comm::QkvHeads qkv_heads() const;  // requires with_comm_heads

 private:
  void add_matrix(const std::string& name, int rows, int cols);
  void add_vector(const std::string& name, int n);

  ArchConfig cfg_;
  std::vector<TensorInfo> layout_;
  Eigen::VectorXd flat_;
  int version_ = 0;
};

}  // namespace covnav::policy
