#pragma once

#include <optional>
#include <string>

#include "covnav/bench/metrics.hpp"
#include "covnav/bench/trajlog.hpp"
#include "covnav/learn/trainer.hpp"

namespace covnav::bench {

enum class Baseline { none, random, oracle };

struct EvalJob {
  // checkpoint-driven policy (baseline == none)
  const policy::ParamSet* params = nullptr;
  learn::Method method = learn::Method::ippo_no_com;
  mapping::MapConfig map_cfg;
  // or a builtin baseline
  Baseline baseline = Baseline::none;
  uint64_t seed = 0;  // random-baseline stream
};

struct EvalOutput {
  MetricsReport report;
  std::vector<TrajectoryLog> logs;
};

// Deterministic evaluation over a pool: full logs per episode, metric
// report per bin and overall. Policy checkpoints run with deterministic
// actions; eta is recomputed live from each episode's team size.
EvalOutput eval_policy(const EvalJob& job, const learn::EpisodePool& pool);

}  // namespace covnav::bench
