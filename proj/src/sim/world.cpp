#include "covnav/sim/world.hpp"

#include <cmath>
#include <stdexcept>

#include "covnav/core/raycast.hpp"

namespace covnav::sim {

Eigen::VectorXd Observation::features() const {
  const int k = static_cast<int>(depths.size());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(feature_dim(k));
  for (int i = 0; i < k; ++i) {
    f[i] = depths[i];
    f[k + i] = hit_types[i] == HitType::wall ? 1.0 : 0.0;
    f[2 * k + i] = hit_types[i] == HitType::agent ? 1.0 : 0.0;
    f[3 * k + i] = hit_types[i] == HitType::max_range ? 1.0 : 0.0;
  }
  f[4 * k] = ego_v;
  f[4 * k + 1] = ego_w;
  return f;
}

Observation raycast_panorama(const scene::Arena& arena,
                             const std::vector<AgentBody>& agents,
                             int self_index, const SimConfig& cfg) {
  const AgentBody& self = agents[self_index];
  Observation obs;
  obs.depths.resize(cfg.k_rays);
  obs.hit_types.resize(cfg.k_rays);
  obs.ego_v = self.prev_action.v;
  obs.ego_w = self.prev_action.w;
  const GridView g{arena.nx, arena.ny, arena.cell_size, arena.occupancy.data()};
  for (int k = 0; k < cfg.k_rays; ++k) {
    const double ang = self.pose.o + 2.0 * M_PI * k / cfg.k_rays;
    const double dx = std::cos(ang), dy = std::sin(ang);
    double best = raycast_grid(g, self.pose.x, self.pose.y, dx, dy, cfg.max_range);
    HitType type = best < cfg.max_range ? HitType::wall : HitType::max_range;
    for (size_t j = 0; j < agents.size(); ++j) {
      if (static_cast<int>(j) == self_index) continue;
      const double t = ray_disc(self.pose.x, self.pose.y, dx, dy,
                                agents[j].pose.x, agents[j].pose.y,
                                agents[j].radius, cfg.max_range);
      if (t < best) {
        best = t;
        type = HitType::agent;
      }
    }
    obs.depths[k] = std::min(best, cfg.max_range) / cfg.max_range;
    obs.hit_types[k] = type;
  }
  return obs;
}

bool check_success(const scene::GeodesicField& field, const Pose& pose) {
  return field.at(pose) <= kSuccessRadius;
}

World::World(std::shared_ptr<const scene::Arena> arena,
             std::shared_ptr<const scene::EpisodeSpec> episode,
             std::vector<std::shared_ptr<const scene::GeodesicField>> fields,
             SimConfig cfg)
    : arena_(std::move(arena)),
      episode_(std::move(episode)),
      fields_(std::move(fields)),
      cfg_(cfg) {
  const int n = episode_->n_agents;
  if (static_cast<int>(fields_.size()) != n) {
    throw std::invalid_argument("one geodesic field per agent required");
  }
  agents_.resize(n);
  for (int i = 0; i < n; ++i) {
    agents_[i].pose = episode_->starts[i];
    if (arena_->disc_collides(agents_[i].pose.x, agents_[i].pose.y, agents_[i].radius)) {
      throw std::runtime_error("episode start collides with arena");
    }
    for (int j = 0; j < i; ++j) {
      const double d = euclidean(agents_[i].pose, agents_[j].pose);
      if (d < agents_[i].radius + agents_[j].radius) {
        throw std::runtime_error("episode starts overlap");
      }
    }
  }
  initial_geo_.resize(n);
  path_len_.assign(n, 0.0);
  steps_used_.assign(n, cfg_.max_steps);
  succeeded_.assign(n, false);
  for (int i = 0; i < n; ++i) initial_geo_[i] = fields_[i]->at(agents_[i].pose);
}

World World::make(std::shared_ptr<const scene::Arena> arena,
                  std::shared_ptr<const scene::EpisodeSpec> episode,
                  SimConfig cfg) {
  // Agents sharing a goal cell share one field (CommonGoal computes one).
  std::vector<std::shared_ptr<const scene::GeodesicField>> fields;
  for (int i = 0; i < episode->n_agents; ++i) {
    const Pose& goal = episode->goals[i];
    std::shared_ptr<const scene::GeodesicField> reuse;
    for (int j = 0; j < i; ++j) {
      if (arena->cell_x(episode->goals[j].x) == arena->cell_x(goal.x) &&
          arena->cell_y(episode->goals[j].y) == arena->cell_y(goal.y)) {
        reuse = fields[j];
        break;
      }
    }
    if (!reuse) {
      reuse = std::make_shared<scene::GeodesicField>(
          scene::compute_geodesic_field(*arena, goal, kAgentRadius));
    }
    fields.push_back(std::move(reuse));
  }
  return World(std::move(arena), std::move(episode), std::move(fields), cfg);
}

std::vector<StepOutcome> World::step(const std::vector<Action>& actions) {
  const int n = n_agents();
  if (static_cast<int>(actions.size()) != n) {
    throw std::invalid_argument("one action per agent required");
  }
  if (t_ >= cfg_.max_steps) throw std::logic_error("episode already over");

  std::vector<double> d_before(n);
  std::vector<Pose> pose_before(n);
  for (int i = 0; i < n; ++i) {
    d_before[i] = geodesic(i);
    pose_before[i] = agents_[i].pose;
    agents_[i].collided_last_step = false;
  }

  const double dt = kStepSeconds / kSubsteps;
  std::vector<bool> halted(n, false);
  std::vector<double> vel(n), omg(n);
  for (int i = 0; i < n; ++i) {
    const double av = covnav::clamp(actions[i].v, -1.0, 1.0);
    const double aw = covnav::clamp(actions[i].w, -1.0, 1.0);
    vel[i] = av * kVMax;
    omg[i] = aw * kWMax;
    agents_[i].prev_action = agents_[i].frozen ? Action{0.0, 0.0} : Action{av, aw};
  }

  for (int s = 0; s < kSubsteps; ++s) {
    for (int i = 0; i < n; ++i) {
      AgentBody& a = agents_[i];
      if (a.frozen) continue;
      const double theta0 = a.pose.o;
      const double theta1 = theta0 + omg[i] * dt;
      double nx = a.pose.x, ny = a.pose.y;
      if (!halted[i]) {
        if (std::abs(omg[i]) > 1e-12) {
          // exact constant-twist arc; composing substeps stays exact
          nx += vel[i] / omg[i] * (std::sin(theta1) - std::sin(theta0));
          ny += vel[i] / omg[i] * (std::cos(theta0) - std::cos(theta1));
        } else {
          nx += vel[i] * dt * std::cos(theta0);
          ny += vel[i] * dt * std::sin(theta0);
        }
        bool contact = arena_->disc_collides(nx, ny, a.radius);
        int hit_agent = -1;
        if (!contact) {
          for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dx = nx - agents_[j].pose.x;
            const double dy = ny - agents_[j].pose.y;
            const double rr = a.radius + agents_[j].radius;
            if (dx * dx + dy * dy < rr * rr) {
              contact = true;
              hit_agent = j;
              break;
            }
          }
        }
        if (contact) {
          halted[i] = true;
          a.collided_last_step = true;
          if (hit_agent >= 0 && !agents_[hit_agent].frozen) {
            agents_[hit_agent].collided_last_step = true;
          }
          nx = a.pose.x;
          ny = a.pose.y;
        }
      }
      a.pose.x = nx;
      a.pose.y = ny;
      a.pose.o = theta1;
    }
  }
  for (int i = 0; i < n; ++i) agents_[i].pose.set_heading(agents_[i].pose.o);

  t_++;
  std::vector<StepOutcome> out(n);
  bool all_succeeded = true;
  for (int i = 0; i < n; ++i) {
    AgentBody& a = agents_[i];
    path_len_[i] += euclidean(pose_before[i], a.pose);
    const double d_after = geodesic(i);
    out[i].delta_geodesic = a.frozen ? 0.0 : d_before[i] - d_after;
    out[i].collided = a.collided_last_step;
    if (!succeeded_[i] && d_after <= kSuccessRadius) {
      succeeded_[i] = true;
      steps_used_[i] = t_;
      if (cfg_.freeze_on_success) a.frozen = true;
    }
    out[i].succeeded = succeeded_[i];
    all_succeeded = all_succeeded && succeeded_[i];
  }
  // without freezing (reward-audit mode) the horizon alone ends the episode
  done_ = (cfg_.freeze_on_success && all_succeeded) || t_ >= cfg_.max_steps;
  for (int i = 0; i < n; ++i) out[i].done = done_;
  return out;
}

Observation World::observe(int agent_index) const {
  Observation obs = raycast_panorama(*arena_, agents_, agent_index, cfg_);
  obs.step_index = t_;
  obs.goal_signature = &episode_->goal_signatures[agent_index];
  return obs;
}

}  // namespace covnav::sim
