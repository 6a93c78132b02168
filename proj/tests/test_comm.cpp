#include <doctest.h>

#include <cmath>

#include "covnav/comm/protocol.hpp"
#include "covnav/core/rng.hpp"
#include "covnav/policy/params.hpp"

using namespace covnav;
using namespace covnav::comm;

namespace {

Eigen::VectorXd random_vec(Rng& rng, int n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal() * scale;
  return v;
}

// Small test architecture whose heads live in a real ParamSet.
policy::ArchConfig tiny_arch() {
  policy::ArchConfig cfg;
  cfg.k_rays = 4;
  cfg.digest_dim = 6;
  cfg.goal_dim = 4;
  cfg.embed_dim = 5;
  cfg.msg_embed_dim = 4;
  cfg.hidden_dim = 4;
  cfg.comm = CommDims{3, 3, 8};
  return cfg;
}

struct Team {
  policy::ParamSet params;
  std::vector<CommMemory> memories;
  std::vector<Eigen::VectorXd> encodings;
  std::vector<Eigen::VectorXd> digests;

  Team(int n, uint64_t seed) : params(tiny_arch()) {
    params.init(seed);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
      memories.emplace_back(i);
      encodings.push_back(random_vec(rng, params.config().embed_dim));
      digests.push_back(random_vec(rng, params.config().digest_dim));
    }
  }

  std::vector<CommMemory*> memory_ptrs() {
    std::vector<CommMemory*> out;
    for (auto& m : memories) out.push_back(&m);
    return out;
  }
};

}  // namespace

TEST_CASE("make_qkv matches a hand-rolled affine oracle") {
  Team team(1, 11);
  const auto heads = team.params.qkv_heads();
  Query q;
  Key k;
  ValueMsg v;
  make_qkv(team.encodings[0], team.digests[0], team.memories[0], heads, 0, 0, &q, &k, &v);

  const auto& cfg = team.params.config();
  Eigen::VectorXd kv_in(cfg.kv_in());
  kv_in << team.encodings[0], team.digests[0];
  Eigen::VectorXd q_in(cfg.q_in());
  q_in << kv_in, Eigen::VectorXd::Zero(cfg.comm.d_v);

  const auto manual = [&](const char* wn, const char* bn, const Eigen::VectorXd& x) {
    const auto W = team.params.matrix(wn);
    const auto b = team.params.vector(bn);
    Eigen::VectorXd out(W.rows());
    for (int r = 0; r < W.rows(); ++r) {
      double acc = b[r];
      for (int c = 0; c < W.cols(); ++c) acc += W(r, c) * x[c];
      out[r] = acc;
    }
    return out;
  };
  CHECK((q.vector - manual("q_W", "q_b", q_in)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((k.vector - manual("k_W", "k_b", kv_in)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((v.vector - manual("v_W", "v_b", kv_in)).cwiseAbs().maxCoeff() < 1e-12);

  SUBCASE("zero inputs and zero params give zero outputs") {
    policy::ParamSet zero(tiny_arch());  // init() not called: all zeros
    Query q0;
    Key k0;
    ValueMsg v0;
    CommMemory empty(0);
    make_qkv(Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(6), empty,
             zero.qkv_heads(), 0, 0, &q0, &k0, &v0);
    CHECK(q0.vector.isZero(0.0));
    CHECK(k0.vector.isZero(0.0));
    CHECK(v0.vector.isZero(0.0));
  }
}

TEST_CASE("memory pooling averages stored values, zero when empty") {
  CommMemory mem(0);
  CHECK(mem.pooled_values(4).isZero(0.0));
  Rng rng(5);
  const Eigen::VectorXd v1 = random_vec(rng, 4);
  mem.store(Key{random_vec(rng, 3), 0, 0}, ValueMsg{v1, 0, 0});
  CHECK((mem.pooled_values(4) - v1).cwiseAbs().maxCoeff() < 1e-15);
  const Eigen::VectorXd v2 = random_vec(rng, 4);
  mem.store(Key{random_vec(rng, 3), 0, 1}, ValueMsg{v2, 0, 1});
  CHECK((mem.pooled_values(4) - 0.5 * (v1 + v2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("store enforces strictly increasing steps") {
  CommMemory mem(0);
  Rng rng(5);
  mem.store(Key{random_vec(rng, 3), 0, 1}, ValueMsg{random_vec(rng, 8), 0, 1});
  CHECK(mem.size() == 1);
  CHECK_THROWS_AS(mem.store(Key{random_vec(rng, 3), 0, 1},
                            ValueMsg{random_vec(rng, 8), 0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mem.store(Key{random_vec(rng, 3), 0, 2},
                            ValueMsg{random_vec(rng, 8), 0, 3}),
                  std::invalid_argument);
  for (int t = 2; t <= 80; ++t) {
    mem.store(Key{random_vec(rng, 3), 0, t}, ValueMsg{random_vec(rng, 8), 0, t});
  }
  CHECK(mem.size() == 80);
  CHECK(mem.entries()[41].step == 42);
}

TEST_CASE("match_scores equals a brute-force softmax oracle") {
  Rng rng(21);
  Query q{random_vec(rng, 3), 0, 3};
  std::vector<Eigen::VectorXd> keys;
  for (int i = 0; i < 3; ++i) keys.push_back(random_vec(rng, 3));
  std::vector<const Eigen::VectorXd*> key_ptrs;
  for (const auto& k : keys) key_ptrs.push_back(&k);

  const MatchResult res = match_scores(q, key_ptrs, 3);
  REQUIRE(res.temporal_weights.size() == 3);

  double acc = 0.0;
  std::vector<double> logits;
  for (const auto& k : keys) logits.push_back(q.vector.dot(k) / std::sqrt(3.0));
  for (double l : logits) acc += std::exp(l);
  for (int i = 0; i < 3; ++i) {
    CHECK(res.logits[i] == doctest::Approx(logits[i]).epsilon(1e-12));
    CHECK(res.temporal_weights[i] ==
          doctest::Approx(std::exp(logits[i]) / acc).epsilon(1e-12));
  }
  CHECK(res.agent_logit ==
        doctest::Approx((logits[0] + logits[1] + logits[2]) / 3.0).epsilon(1e-12));

  SUBCASE("single key degenerates to weight one") {
    const MatchResult one = match_scores(q, {&keys[0]}, 3);
    CHECK(one.temporal_weights[0] == 1.0);
    CHECK(one.agent_logit == one.logits[0]);
  }
  SUBCASE("equal logits split evenly") {
    const MatchResult two = match_scores(q, {&keys[0], &keys[0]}, 3);
    CHECK(two.temporal_weights[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(two.temporal_weights[1] == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("empty key history is an error") {
    CHECK_THROWS_AS(match_scores(q, {}, 3), std::invalid_argument);
  }
}

TEST_CASE("cross-agent softmax: exactness and oracle equality") {
  SUBCASE("uniform logits give exactly 1/N") {
    for (int n : {2, 3, 4}) {
      const Eigen::VectorXd s =
          apply_cross_agent_softmax(Eigen::VectorXd::Constant(n, 0.37), 0);
      for (int i = 0; i < n; ++i) REQUIRE(s[i] == 1.0 / n);
    }
  }
  SUBCASE("solo agent scores one") {
    const Eigen::VectorXd s = apply_cross_agent_softmax(Eigen::VectorXd::Zero(1), 0);
    CHECK(s[0] == 1.0);
  }
  SUBCASE("matches the direct exp/normalize oracle") {
    Eigen::VectorXd logits(3);
    logits << 2.0, 1.0, 0.0;
    const Eigen::VectorXd s = apply_cross_agent_softmax(logits, 1);
    const double z = std::exp(2.0) + std::exp(1.0) + std::exp(0.0);
    CHECK(s[0] == doctest::Approx(std::exp(2.0) / z).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(std::exp(1.0) / z).epsilon(1e-12));
    CHECK(s[2] == doctest::Approx(std::exp(0.0) / z).epsilon(1e-12));
    CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("gate threshold is inclusive") {
  CHECK(gate(0.40, 0.25) == 0.40);
  CHECK(gate(0.25, 0.25) == 0.0);
  CHECK(gate(0.10, 0.25) == 0.0);
  // uniform scores with N agents all die at eta = 1/N
  for (int n : {2, 3, 4}) {
    CHECK(gate(1.0 / n, 1.0 / n) == 0.0);
  }
}

TEST_CASE("aggregate mixes gated contributions") {
  Rng rng(31);
  const Eigen::VectorXd self_mix = random_vec(rng, 8);
  const Eigen::VectorXd sup1 = random_vec(rng, 8);
  const Eigen::VectorXd sup2 = random_vec(rng, 8);

  SUBCASE("self gated out kills the whole message") {
    const AggregatedMessage m =
        aggregate(0.2, self_mix, {{0.9, &sup1}}, {1}, 0, 0.25);
    CHECK_FALSE(m.communicated);
    CHECK(m.vector.isZero(0.0));
    CHECK(m.contributing.empty());
  }
  SUBCASE("only self above threshold") {
    const AggregatedMessage m =
        aggregate(0.6, self_mix, {{0.2, &sup1}, {0.2, &sup2}}, {1, 2}, 0, 0.25);
    CHECK(m.communicated);
    CHECK((m.vector - 0.6 * self_mix).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.contributing.size() == 1);
  }
  SUBCASE("weighted-sum oracle with two supporters") {
    const AggregatedMessage m =
        aggregate(0.4, self_mix, {{0.35, &sup1}, {0.30, &sup2}}, {1, 2}, 0, 0.25);
    const Eigen::VectorXd expect = 0.4 * self_mix + 0.35 * sup1 + 0.30 * sup2;
    CHECK((m.vector - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.contributing.size() == 3);
  }
}

TEST_CASE("memory mode at t = 1 degenerates to vanilla mode") {
  Rng seeder(71);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(seeder.uniform_int(3));
    Team a(n, 1000 + trial);
    Team b(n, 1000 + trial);
    auto mems_a = a.memory_ptrs();
    auto mems_b = b.memory_ptrs();
    const RoundResult ra = run_round(Mode::memory, a.encodings, a.digests, mems_a,
                                     a.params.qkv_heads(), 0, 1.0 / n);
    const RoundResult rb = run_round(Mode::vanilla, b.encodings, b.digests, mems_b,
                                     b.params.qkv_heads(), 0, 1.0 / n);
    for (int i = 0; i < n; ++i) {
      REQUIRE(ra.messages[i].communicated == rb.messages[i].communicated);
      REQUIRE((ra.messages[i].vector - rb.messages[i].vector).cwiseAbs().maxCoeff() <
              1e-12);
    }
    // memory mode stored the round, vanilla did not
    REQUIRE(a.memories[0].size() == 1);
    REQUIRE(b.memories[0].empty());
  }
}

TEST_CASE("score normalization holds across steps") {
  Team team(3, 77);
  auto mems = team.memory_ptrs();
  Rng rng(78);
  for (int t = 0; t < 10; ++t) {
    for (int i = 0; i < 3; ++i) {
      team.encodings[i] = random_vec(rng, team.params.config().embed_dim);
    }
    const RoundResult r = run_round(Mode::memory, team.encodings, team.digests, mems,
                                    team.params.qkv_heads(), t, 1.0 / 3);
    for (int i = 0; i < 3; ++i) {
      REQUIRE(r.scores[i].sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("bandwidth accounting") {
  const int n = 3;
  Team team(n, 91);
  auto mems = team.memory_ptrs();
  const auto dims = team.params.config().comm;
  const RoundResult r = run_round(Mode::memory, team.encodings, team.digests, mems,
                                  team.params.qkv_heads(), 0, 1.0 / n);
  long expected_scalars = 0;
  for (int i = 0; i < n; ++i) {
    const auto& lg = r.log.per_requester[i];
    REQUIRE(lg.query_scalars == (n - 1) * dims.d_q);
    if (!lg.communicated) {
      REQUIRE(lg.value_scalars == 0);  // fully gated: queries only
    }
    REQUIRE(lg.value_scalars <= n * dims.d_v);
    expected_scalars += lg.query_scalars + lg.value_scalars;
  }
  CHECK(r.log.scalars_transmitted == expected_scalars);
  CHECK(r.log.queries_sent == n * (n - 1));
}

TEST_CASE("value/query dimension ratio is eight by default") {
  const CommDims dims;
  CHECK(dims.d_q == 32);
  CHECK(dims.d_k == 32);
  CHECK(dims.d_v == 256);
  CHECK(dims.d_v % dims.d_q == 0);
  CHECK(dims.d_v / dims.d_q == 8);
}

TEST_CASE("solo agents never communicate") {
  Team team(1, 13);
  auto mems = team.memory_ptrs();
  const RoundResult r = run_round(Mode::memory, team.encodings, team.digests, mems,
                                  team.params.qkv_heads(), 0, 1.0);
  CHECK_FALSE(r.messages[0].communicated);  // s = 1 <= eta = 1
  CHECK(r.messages[0].vector.isZero(0.0));
  CHECK(r.log.scalars_transmitted == 0);
}

TEST_CASE("relabeling agents permutes the round outputs") {
  const int n = 3;
  Team team(n, 55);
  // permutation (1, 2, 0)
  std::vector<int> perm{1, 2, 0};
  Team shuffled(n, 55);
  for (int i = 0; i < n; ++i) {
    shuffled.encodings[i] = team.encodings[perm[i]];
    shuffled.digests[i] = team.digests[perm[i]];
  }
  auto mems_a = team.memory_ptrs();
  auto mems_b = shuffled.memory_ptrs();
  const RoundResult ra = run_round(Mode::memory, team.encodings, team.digests, mems_a,
                                   team.params.qkv_heads(), 0, 1.0 / n);
  const RoundResult rb = run_round(Mode::memory, shuffled.encodings, shuffled.digests,
                                   mems_b, shuffled.params.qkv_heads(), 0, 1.0 / n);
  for (int i = 0; i < n; ++i) {
    REQUIRE(ra.messages[perm[i]].communicated == rb.messages[i].communicated);
    REQUIRE((ra.messages[perm[i]].vector - rb.messages[i].vector)
                .cwiseAbs()
                .maxCoeff() < 1e-12);
  }
}

TEST_CASE("raising a logit never lowers its gated score") {
  Eigen::VectorXd logits(3);
  logits << 0.4, 0.1, -0.2;
  const double eta = 1.0 / 3;
  double prev_gated = -1.0;
  for (double bump = 0.0; bump < 3.0; bump += 0.05) {
    Eigen::VectorXd l = logits;
    l[1] += bump;
    const Eigen::VectorXd s = apply_cross_agent_softmax(l, 0);
    const double g = gate(s[1], eta);
    REQUIRE(g >= prev_gated - 1e-12);
    prev_gated = g;
  }
}
