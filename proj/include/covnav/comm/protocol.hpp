#pragma once

#include <Eigen/Dense>

#include <vector>

namespace covnav::comm {

// Wire-payload dimensions. The value/query ratio of 8 is preserved so
// bandwidth accounting stays meaningful.
struct CommDims {
  int d_q = 32;
  int d_k = 32;
  int d_v = 256;

  bool operator==(const CommDims&) const = default;
};

struct Query {
  Eigen::VectorXd vector;
  int sender = 0;
  int step = 0;
};

struct Key {
  Eigen::VectorXd vector;
  int owner = 0;
  int step = 0;
};

struct ValueMsg {
  Eigen::VectorXd vector;
  int owner = 0;
  int step = 0;
};

struct MemoryEntry {
  int step = 0;
  Eigen::VectorXd key;
  Eigen::VectorXd value;
};

// Per-agent private store of past (key, value) pairs. Append-only within an
// episode, cleared between episodes, never shared mutably.
class CommMemory {
 public:
  explicit CommMemory(int owner = 0) : owner_(owner) {}

  // Requires key.step == value.step and a step greater than the last stored
  // one; throws std::invalid_argument otherwise.
  void store(const Key& key, const ValueMsg& value);

  const std::vector<MemoryEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int owner() const { return owner_; }
  void clear() { entries_.clear(); }

  // Average of all stored values; the zero vector when empty.
  Eigen::VectorXd pooled_values(int d_v) const;

 private:
  int owner_ = 0;
  std::vector<MemoryEntry> entries_;
};

struct AggregatedMessage {
  Eigen::VectorXd vector;  // d_v; zero when communicated == false
  std::vector<std::pair<int, double>> contributing;  // (agent, gated score)
  bool communicated = false;
};

// Read-only view of one affine head (rows x cols weights stored row-major
// plus bias) living inside a flat parameter vector.
struct AffineView {
  const double* w = nullptr;
  const double* b = nullptr;
  int rows = 0;
  int cols = 0;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

struct QkvHeads {
  AffineView query;  // in: [encoding | digest | pooled past values]
  AffineView key;    // in: [encoding | digest]
  AffineView value;  // in: [encoding | digest]
  CommDims dims;
};

// request stage
void make_qkv(const Eigen::VectorXd& obs_encoding, const Eigen::VectorXd& map_digest,
              const CommMemory& memory, const QkvHeads& heads, int sender, int step,
              Query* q, Key* k, ValueMsg* v);

// match stage: scaled-dot-product logits over one agent's key history
// (oldest first, current key last), a temporal softmax over them, and the
// agent-level logit (mean of the per-time logits).
struct MatchResult {
  Eigen::VectorXd logits;            // one per key
  Eigen::VectorXd temporal_weights;  // softmax of logits
  double agent_logit = 0.0;          // mean of logits
};
MatchResult match_scores(const Query& query,
                         const std::vector<const Eigen::VectorXd*>& keys, int d_k);

// cross-agent normalization of the per-agent logits (self included)
Eigen::VectorXd apply_cross_agent_softmax(const Eigen::VectorXd& agent_logits,
                                          int self_index);

// select stage threshold; the boundary is inclusive (s <= eta cuts the link)
double gate(double s, double eta);

// Weighted mixture of temporal value mixtures. When the self link is gated
// out the requester opts out of communication entirely this step.
AggregatedMessage aggregate(double self_score, const Eigen::VectorXd& self_mixture,
                            const std::vector<std::pair<double, const Eigen::VectorXd*>>& supporters,
                            const std::vector<int>& supporter_ids, int self_id,
                            double eta);

enum class Mode { vanilla, memory };

struct RequesterLog {
  long query_scalars = 0;
  long value_scalars = 0;
  bool communicated = false;
  int supporters = 0;
  double self_score = 0.0;
};

struct RoundLog {
  int queries_sent = 0;  // (query, receiver) deliveries
  int values_sent = 0;   // value-message transmissions
  long scalars_transmitted = 0;
  std::vector<RequesterLog> per_requester;
};

struct RoundResult {
  std::vector<AggregatedMessage> messages;
  RoundLog log;
  // current-step products and intermediates, recorded for training
  std::vector<Query> queries;
  std::vector<Key> keys;
  std::vector<ValueMsg> values;
  std::vector<Eigen::VectorXd> pooled;         // query-stage pooled past values
  std::vector<Eigen::VectorXd> agent_logits;   // per requester, over agents
  std::vector<Eigen::VectorXd> scores;         // per requester, post softmax
  std::vector<Eigen::VectorXd> self_mixture;   // per requester, v-hat_{n,n}
  std::vector<Eigen::VectorXd> supporter_sum;  // per requester, gated sum over m != n
};

// One synchronous protocol round: all queries exchanged, then all matches,
// then value returns, then (memory mode) the store stage. eta is 1/N of the
// live team size.
RoundResult run_round(Mode mode, const std::vector<Eigen::VectorXd>& encodings,
                      const std::vector<Eigen::VectorXd>& digests,
                      std::vector<CommMemory*>& memories, const QkvHeads& heads,
                      int step, double eta);

}  // namespace covnav::comm
