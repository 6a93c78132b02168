#include "covnav/comm/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace covnav::comm {

void CommMemory::store(const Key& key, const ValueMsg& value) {
  if (key.step != value.step) {
    throw std::invalid_argument("key/value step mismatch");
  }
  if (!entries_.empty() && key.step <= entries_.back().step) {
    throw std::invalid_argument("store steps must be strictly increasing");
  }
  entries_.push_back({key.step, key.vector, value.vector});
}

Eigen::VectorXd CommMemory::pooled_values(int d_v) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d_v);
  if (entries_.empty()) return out;
  for (const auto& e : entries_) out += e.value;
  out /= static_cast<double>(entries_.size());
  return out;
}

Eigen::VectorXd AffineView::apply(const Eigen::VectorXd& x) const {
  if (x.size() != cols) throw std::invalid_argument("affine head input dimension mismatch");
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> W(w, rows, cols);
  Eigen::Map<const Eigen::VectorXd> bias(b, rows);
  return W * x + bias;
}

void make_qkv(const Eigen::VectorXd& obs_encoding, const Eigen::VectorXd& map_digest,
              const CommMemory& memory, const QkvHeads& heads, int sender, int step,
              Query* q, Key* k, ValueMsg* v) {
  Eigen::VectorXd kv_in(obs_encoding.size() + map_digest.size());
  kv_in << obs_encoding, map_digest;
  Eigen::VectorXd q_in(kv_in.size() + heads.dims.d_v);
  q_in << kv_in, memory.pooled_values(heads.dims.d_v);

  q->vector = heads.query.apply(q_in);
  q->sender = sender;
  q->step = step;
  k->vector = heads.key.apply(kv_in);
  k->owner = sender;
  k->step = step;
  v->vector = heads.value.apply(kv_in);
  v->owner = sender;
  v->step = step;
}

MatchResult match_scores(const Query& query,
                         const std::vector<const Eigen::VectorXd*>& keys, int d_k) {
  if (keys.empty()) throw std::invalid_argument("match requires at least one key");
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
  MatchResult r;
  r.logits.resize(keys.size());
  for (size_t i = 0; i < keys.size(); ++i) {
    r.logits[i] = query.vector.dot(*keys[i]) * scale;
  }
  const double mx = r.logits.maxCoeff();
  Eigen::VectorXd e = (r.logits.array() - mx).exp();
  r.temporal_weights = e / e.sum();
  r.agent_logit = r.logits.mean();
  return r;
}

Eigen::VectorXd apply_cross_agent_softmax(const Eigen::VectorXd& agent_logits,
                                          int self_index) {
  if (agent_logits.size() < 1) throw std::invalid_argument("need at least one agent");
  if (self_index < 0 || self_index >= agent_logits.size()) {
    throw std::invalid_argument("self index out of range");
  }
  const double mx = agent_logits.maxCoeff();
  Eigen::VectorXd e = (agent_logits.array() - mx).exp();
  return e / e.sum();
}

double gate(double s, double eta) { return s <= eta ? 0.0 : s; }

AggregatedMessage aggregate(double self_score, const Eigen::VectorXd& self_mixture,
                            const std::vector<std::pair<double, const Eigen::VectorXd*>>& supporters,
                            const std::vector<int>& supporter_ids, int self_id,
                            double eta) {
  AggregatedMessage msg;
  const int d_v = static_cast<int>(self_mixture.size());
  msg.vector = Eigen::VectorXd::Zero(d_v);
  const double g_self = gate(self_score, eta);
  if (g_self == 0.0) return msg;  // requester opts out this step

  msg.communicated = true;
  msg.vector = g_self * self_mixture;
  msg.contributing.emplace_back(self_id, g_self);
  for (size_t i = 0; i < supporters.size(); ++i) {
    const double g = gate(supporters[i].first, eta);
    if (g == 0.0) continue;
    if (supporters[i].second->size() != d_v) {
      throw std::invalid_argument("value message dimension mismatch");
    }
    msg.vector += g * (*supporters[i].second);
    msg.contributing.emplace_back(supporter_ids[i], g);
  }
  return msg;
}

RoundResult run_round(Mode mode, const std::vector<Eigen::VectorXd>& encodings,
                      const std::vector<Eigen::VectorXd>& digests,
                      std::vector<CommMemory*>& memories, const QkvHeads& heads,
                      int step, double eta) {
  const int n = static_cast<int>(encodings.size());
  if (static_cast<int>(digests.size()) != n || static_cast<int>(memories.size()) != n) {
    throw std::invalid_argument("per-agent inputs must agree on team size");
  }
  RoundResult r;
  r.queries.resize(n);
  r.keys.resize(n);
  r.values.resize(n);
  r.pooled.resize(n);
  r.messages.resize(n);
  r.agent_logits.resize(n);
  r.scores.resize(n);
  r.self_mixture.resize(n);
  r.supporter_sum.resize(n);
  r.log.per_requester.resize(n);

  // request: every agent compresses its state; vanilla mode never stores,
  // so its memory (and therefore the pooled term) stays empty/zero
  for (int i = 0; i < n; ++i) {
    r.pooled[i] = memories[i]->pooled_values(heads.dims.d_v);
    make_qkv(encodings[i], digests[i], *memories[i], heads, i, step,
             &r.queries[i], &r.keys[i], &r.values[i]);
  }

  // match: supporter m scores requester n's query against its key history
  std::vector<std::vector<MatchResult>> match(n, std::vector<MatchResult>(n));
  for (int req = 0; req < n; ++req) {
    Eigen::VectorXd logits(n);
    for (int own = 0; own < n; ++own) {
      std::vector<const Eigen::VectorXd*> keys;
      if (mode == Mode::memory) {
        for (const auto& e : memories[own]->entries()) keys.push_back(&e.key);
      }
      keys.push_back(&r.keys[own].vector);
      match[req][own] = match_scores(r.queries[req], keys, heads.dims.d_k);
      logits[own] = match[req][own].agent_logit;
    }
    r.agent_logits[req] = logits;
    r.scores[req] = apply_cross_agent_softmax(logits, req);
  }

  // select + value return
  for (int req = 0; req < n; ++req) {
    // temporal mixtures v-hat for every owner
    std::vector<Eigen::VectorXd> mixtures(n);
    for (int own = 0; own < n; ++own) {
      const auto& m = match[req][own];
      Eigen::VectorXd mix = Eigen::VectorXd::Zero(heads.dims.d_v);
      int idx = 0;
      if (mode == Mode::memory) {
        for (const auto& e : memories[own]->entries()) {
          mix += m.temporal_weights[idx++] * e.value;
        }
      }
      mix += m.temporal_weights[idx] * r.values[own].vector;
      mixtures[own] = std::move(mix);
    }
    r.self_mixture[req] = mixtures[req];

    std::vector<std::pair<double, const Eigen::VectorXd*>> supporters;
    std::vector<int> ids;
    for (int own = 0; own < n; ++own) {
      if (own == req) continue;
      supporters.emplace_back(r.scores[req][own], &mixtures[own]);
      ids.push_back(own);
    }
    r.messages[req] = aggregate(r.scores[req][req], mixtures[req], supporters, ids,
                                req, eta);

    Eigen::VectorXd sup_sum = Eigen::VectorXd::Zero(heads.dims.d_v);
    int passing = 0;
    if (r.messages[req].communicated) {
      for (size_t i = 0; i < supporters.size(); ++i) {
        const double g = gate(supporters[i].first, eta);
        if (g == 0.0) continue;
        sup_sum += g * (*supporters[i].second);
        passing++;
      }
    }
    r.supporter_sum[req] = std::move(sup_sum);

    RequesterLog& lg = r.log.per_requester[req];
    lg.query_scalars = static_cast<long>(n - 1) * heads.dims.d_q;
    lg.value_scalars = static_cast<long>(passing) * heads.dims.d_v;
    lg.communicated = r.messages[req].communicated;
    lg.supporters = passing;
    lg.self_score = r.scores[req][req];
    r.log.queries_sent += n - 1;
    r.log.values_sent += passing;
    r.log.scalars_transmitted += lg.query_scalars + lg.value_scalars;
  }

  // store: only the memory-augmented protocol keeps its products
  if (mode == Mode::memory) {
    for (int i = 0; i < n; ++i) memories[i]->store(r.keys[i], r.values[i]);
  }
  return r;
}

}  // namespace covnav::comm
