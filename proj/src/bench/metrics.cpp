#include "covnav/bench/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "covnav/core/robot.hpp"

namespace covnav::bench {

namespace {

struct Accum {
  double sr = 0.0, dts = 0.0, spl = 0.0, ssr = 0.0;
  long episodes = 0;
  long agents = 0;

  void add(const AgentTrajectory& a, int max_steps) {
    agents++;
    const double tau = a.success ? 1.0 : 0.0;
    sr += tau;
    dts += std::max(0.0, a.final_geodesic - kSuccessRadius);
    const double lg = a.initial_geodesic;
    spl += tau * lg / std::max(lg, a.path_length);
    ssr += tau * static_cast<double>(max_steps) /
           static_cast<double>(std::min(max_steps, a.steps_used));
  }

  MetricsRow row() const {
    MetricsRow r;
    if (agents > 0) {
      r.sr = sr / agents;
      r.dts = dts / agents;
      r.spl = spl / agents;
      r.ssr = ssr / agents;
    }
    r.episodes = episodes;
    r.agent_episodes = agents;
    return r;
  }
};

nlohmann::json row_json(const MetricsRow& r) {
  return nlohmann::json{{"SR", r.sr},       {"DTS", r.dts},
                        {"SSR", r.ssr},     {"SPL", r.spl},
                        {"episodes", r.episodes}, {"agent_episodes", r.agent_episodes}};
}

void row_csv(std::ostream& out, const char* name, const MetricsRow& r) {
  out << name << ',' << r.sr << ',' << r.dts << ',' << r.ssr << ',' << r.spl << ','
      << r.episodes << '\n';
}

}  // namespace

MetricsReport compute_metrics(const std::vector<TrajectoryLog>& logs, int max_steps) {
  if (logs.empty()) throw std::invalid_argument("no trajectory logs to score");
  Accum bins[3];
  Accum overall;
  int team = 0;
  for (const auto& log : logs) {
    Accum& bin = bins[static_cast<int>(log.difficulty)];
    bin.episodes++;
    overall.episodes++;
    team = std::max(team, log.n_agents);
    for (const auto& a : log.agents) {
      bin.add(a, max_steps);
      overall.add(a, max_steps);
    }
  }
  MetricsReport rep;
  rep.easy = bins[0].row();
  rep.medium = bins[1].row();
  rep.hard = bins[2].row();
  rep.overall = overall.row();
  rep.team_size = team;
  rep.max_steps = max_steps;
  return rep;
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["team_size"] = team_size;
  j["max_steps"] = max_steps;
  j["easy"] = row_json(easy);
  j["medium"] = row_json(medium);
  j["hard"] = row_json(hard);
  j["overall"] = row_json(overall);
  return j.dump(2);
}

std::string MetricsReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "bin,SR,DTS,SSR,SPL,episodes\n";
  row_csv(out, "easy", easy);
  row_csv(out, "medium", medium);
  row_csv(out, "hard", hard);
  row_csv(out, "overall", overall);
  return out.str();
}

}  // namespace covnav::bench
