#include "covnav/bench/trajlog.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace covnav::bench {

namespace {

nlohmann::json pose_json(const Pose& p) { return nlohmann::json::array({p.x, p.y, p.o}); }
Pose pose_from(const nlohmann::json& j) {
  return Pose(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

}  // namespace

std::string TrajectoryLog::to_json() const {
  nlohmann::json j;
  j["arena_id"] = arena_id;
  j["episode_index"] = episode_index;
  j["difficulty"] = scene::to_string(difficulty);
  j["task"] = scene::to_string(task);
  j["n_agents"] = n_agents;
  j["seed"] = seed;
  j["t_final"] = t_final;
  auto starts_j = nlohmann::json::array();
  for (const auto& p : starts) starts_j.push_back(pose_json(p));
  j["starts"] = starts_j;
  auto goals_j = nlohmann::json::array();
  for (const auto& p : goals) goals_j.push_back(pose_json(p));
  j["goals"] = goals_j;

  auto agents_j = nlohmann::json::array();
  for (const auto& a : agents) {
    nlohmann::json aj;
    auto poses_j = nlohmann::json::array();
    for (const auto& p : a.poses) poses_j.push_back(pose_json(p));
    aj["poses"] = poses_j;
    auto act_j = nlohmann::json::array();
    for (const auto& act : a.actions) act_j.push_back(nlohmann::json::array({act.v, act.w}));
    aj["actions"] = act_j;
    aj["collided"] = std::vector<int>(a.collided.begin(), a.collided.end());
    aj["succeeded"] = std::vector<int>(a.succeeded.begin(), a.succeeded.end());
    aj["success"] = a.success;
    aj["steps_used"] = a.steps_used;
    aj["path_length"] = a.path_length;
    aj["final_geodesic"] = a.final_geodesic;
    aj["initial_geodesic"] = a.initial_geodesic;
    agents_j.push_back(std::move(aj));
  }
  j["agents"] = agents_j;

  auto comm_j = nlohmann::json::array();
  for (const auto& c : comm) {
    comm_j.push_back(nlohmann::json{{"queries", c.queries_sent},
                                    {"values", c.values_sent},
                                    {"scalars", c.scalars},
                                    {"communicated", c.communicated}});
  }
  j["comm"] = comm_j;
  return j.dump();
}

TrajectoryLog TrajectoryLog::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  TrajectoryLog log;
  log.arena_id = j.at("arena_id").get<std::string>();
  log.episode_index = j.at("episode_index").get<int>();
  log.difficulty = scene::difficulty_from_string(j.at("difficulty").get<std::string>());
  log.task = scene::task_from_string(j.at("task").get<std::string>());
  log.n_agents = j.at("n_agents").get<int>();
  log.seed = j.at("seed").get<uint64_t>();
  log.t_final = j.at("t_final").get<int>();
  for (const auto& p : j.at("starts")) log.starts.push_back(pose_from(p));
  for (const auto& p : j.at("goals")) log.goals.push_back(pose_from(p));
  for (const auto& aj : j.at("agents")) {
    AgentTrajectory a;
    for (const auto& p : aj.at("poses")) a.poses.push_back(pose_from(p));
    for (const auto& act : aj.at("actions")) {
      a.actions.push_back({act.at(0).get<double>(), act.at(1).get<double>()});
    }
    for (const auto& v : aj.at("collided")) a.collided.push_back(v.get<int>() ? 1 : 0);
    for (const auto& v : aj.at("succeeded")) a.succeeded.push_back(v.get<int>() ? 1 : 0);
    a.success = aj.at("success").get<bool>();
    a.steps_used = aj.at("steps_used").get<int>();
    a.path_length = aj.at("path_length").get<double>();
    a.final_geodesic = aj.at("final_geodesic").get<double>();
    a.initial_geodesic = aj.at("initial_geodesic").get<double>();
    log.agents.push_back(std::move(a));
  }
  for (const auto& c : j.at("comm")) {
    CommStepCounts cc;
    cc.queries_sent = c.at("queries").get<int>();
    cc.values_sent = c.at("values").get<int>();
    cc.scalars = c.at("scalars").get<long>();
    cc.communicated = c.at("communicated").get<int>();
    log.comm.push_back(cc);
  }
  return log;
}

void write_jsonl(const std::vector<TrajectoryLog>& logs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& log : logs) out << log.to_json() << '\n';
}

std::vector<TrajectoryLog> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<TrajectoryLog> logs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) logs.push_back(TrajectoryLog::from_json(line));
  }
  return logs;
}

}  // namespace covnav::bench
