#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covnav/bench/trajlog.hpp"

namespace covnav::bench {

struct MetricsRow {
  double sr = 0.0;
  double dts = 0.0;
  double spl = 0.0;
  double ssr = 0.0;
  long episodes = 0;
  long agent_episodes = 0;  // K * N contributions in this row
};

// Report layout mirrors the benchmark tables: one row per difficulty bin
// plus an episode-weighted overall row.
struct MetricsReport {
  MetricsRow easy;
  MetricsRow medium;
  MetricsRow hard;
  MetricsRow overall;
  int team_size = 0;
  int max_steps = 0;

  std::string to_json() const;
  std::string to_csv() const;  // rows = bins, columns = SR, DTS, SSR, SPL
};

// SR  = mean of tau
// DTS = mean of max(0, d^g - 1)        (clamped at zero)
// SPL = mean of tau * l^g / max(l^g, l)
// SSR = mean of tau * T / min(T, T_used)
MetricsReport compute_metrics(const std::vector<TrajectoryLog>& logs, int max_steps);

}  // namespace covnav::bench
