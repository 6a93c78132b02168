#include "covnav/bench/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "covnav/core/robot.hpp"

namespace covnav::bench {

Action random_policy(Rng& rng) {
  return Action{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
}

namespace {

constexpr double kOracleMargin = 0.08;

// Straight segment stays on navigable cells of the field. The pose's own
// cell is exempt (the disc may straddle inflated cells legally).
bool chord_navigable(const scene::GeodesicField& f, const Pose& pose, double x1,
                     double y1) {
  const int pose_cx = static_cast<int>(std::floor(pose.x / f.cell_size));
  const int pose_cy = static_cast<int>(std::floor(pose.y / f.cell_size));
  const double dist = std::hypot(x1 - pose.x, y1 - pose.y);
  const int samples = std::max(2, static_cast<int>(dist / (0.5 * f.cell_size)));
  for (int s = 1; s <= samples; ++s) {
    const double x = pose.x + (x1 - pose.x) * s / samples;
    const double y = pose.y + (y1 - pose.y) * s / samples;
    const int ix = static_cast<int>(std::floor(x / f.cell_size));
    const int iy = static_cast<int>(std::floor(y / f.cell_size));
    if (ix == pose_cx && iy == pose_cy) continue;
    if (!std::isfinite(f.at_cell(ix, iy))) return false;
  }
  return true;
}

// Walk the descent chain from the pose's cell (seeded from the best nearby
// cell when the pose straddles inflation); the farthest chain cell whose
// chord from the pose validates becomes the steering target.
bool descent_target(const scene::GeodesicField& f, const Pose& pose, double* tx,
                    double* ty, bool straight_extend = false) {
  int cx = static_cast<int>(std::floor(pose.x / f.cell_size));
  int cy = static_cast<int>(std::floor(pose.y / f.cell_size));
  double best = f.at_cell(cx, cy);
  if (!std::isfinite(best)) {
    const int ox = cx, oy = cy;
    for (int dy = -2; dy <= 2; ++dy) {
      for (int dx = -2; dx <= 2; ++dx) {
        const double d = f.at_cell(ox + dx, oy + dy);
        if (d < best) {
          best = d;
          cx = ox + dx;
          cy = oy + dy;
        }
      }
    }
    if (!std::isfinite(best)) return false;
  }
  if (best == 0.0) return false;  // already on the goal cell

  // follow the chain cells themselves (no-corner-cut by construction); the
  // extended mode rides straight corridors only, for overshoot-capped use
  bool found = false;
  double target_x = 0.0, target_y = 0.0;
  double first_bearing = 0.0;
  const int lookahead = straight_extend ? 10 : 3;
  for (int hop = 0; hop < lookahead; ++hop) {
    int nx = cx, ny = cy;
    double nd = best;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const double d = f.at_cell(cx + dx, cy + dy);
        if (d < nd) {
          nd = d;
          nx = cx + dx;
          ny = cy + dy;
        }
      }
    }
    if (nx == cx && ny == cy) break;  // local minimum (goal cell)
    const double wx = (nx + 0.5) * f.cell_size;
    const double wy = (ny + 0.5) * f.cell_size;
    if (straight_extend) {
      const double bearing = std::atan2(wy - pose.y, wx - pose.x);
      if (hop == 0) {
        first_bearing = bearing;
      } else if (std::abs(normalize_angle(bearing - first_bearing)) > 0.45) {
        break;  // corridor bends: stop extending
      }
    }
    cx = nx;
    cy = ny;
    best = nd;
    target_x = wx;
    target_y = wy;
    found = true;
    if (best == 0.0) break;
  }
  if (!found) return false;
  *tx = target_x;
  *ty = target_y;
  return true;
}

Action steer_to(const Pose& pose, double tx, double ty, double remaining,
                double speed_cap, bool overshoot_ok = true,
                double align_threshold = 0.5) {
  const double bearing = std::atan2(ty - pose.y, tx - pose.x);
  const double err = normalize_angle(bearing - pose.o);
  Action a;
  a.w = covnav::clamp(err / M_PI, -1.0, 1.0);  // w_max * 1 s = pi rad
  if (std::abs(err) > align_threshold) {
    a.v = 0.0;  // rotate in place first
    return a;
  }
  // Success freezes the body at the first step-end with d <= 1, so bank at
  // ~1.2 m and cross the ring in one full-speed hop. Parked bodies then sit
  // deep and leave the ring passable for teammates.
  double travel = remaining;
  if (remaining > 1.25 && remaining <= 1.75) {
    travel = std::max(remaining - 1.2, 0.06);
  }
  if (!overshoot_ok) {
    // never sail past the steering target: corners are only safe up to it
    travel = std::min(travel, std::hypot(tx - pose.x, ty - pose.y));
  }
  a.v = covnav::clamp(travel / (kVMax * kStepSeconds), 0.0, speed_cap);
  return a;
}

std::pair<std::shared_ptr<const scene::GeodesicField>,
          std::shared_ptr<const scene::GeodesicField>>
plan_fields(const scene::Arena& arena, const Pose& goal, double margin_m) {
  auto plain = std::make_shared<scene::GeodesicField>(
      scene::compute_geodesic_field(arena, goal, kAgentRadius));
  std::shared_ptr<const scene::GeodesicField> margin;
  try {
    margin = std::make_shared<scene::GeodesicField>(
        scene::compute_geodesic_field(arena, goal, kAgentRadius + margin_m));
  } catch (const std::runtime_error&) {
    margin = plain;  // goal too tight for the margin inflation
  }
  return {margin, plain};
}

}  // namespace

Action oracle_policy(const scene::GeodesicField& field, const Pose& pose) {
  const double d = field.at_nearest(pose, 2);
  if (!std::isfinite(d)) throw std::runtime_error("oracle pose is unreachable in the field");
  if (d == 0.0) return Action{0.0, 0.0};

  double tx = 0.0, ty = 0.0;
  if (!descent_target(field, pose, &tx, &ty, /*careful=*/true)) {
    // within the final cells: close the gap to the goal pose directly
    tx = field.goal.x;
    ty = field.goal.y;
  }
  return steer_to(pose, tx, ty, d, 1.0, /*overshoot_ok=*/false, 0.35);
}

OracleContext::OracleContext(const scene::Arena& arena,
                             const scene::EpisodeSpec& episode)
    : arena_(&arena), goals_(episode.goals) {
  planned_mask_.assign(episode.n_agents, 0);
  stamped_mask_.assign(episode.n_agents, 0);
  prev_pose_.assign(episode.n_agents, Pose(-100.0, -100.0, 0.0));
  prev_v_.assign(episode.n_agents, 0.0);
  stuck_steps_.assign(episode.n_agents, 0);
  commit_x_.assign(episode.n_agents, 0.0);
  commit_y_.assign(episode.n_agents, 0.0);
  commit_steps_.assign(episode.n_agents, 0);
  for (int i = 0; i < episode.n_agents; ++i) {
    std::shared_ptr<const scene::GeodesicField> margin, plain;
    for (int j = 0; j < i; ++j) {
      if (arena.cell_x(goals_[j].x) == arena.cell_x(goals_[i].x) &&
          arena.cell_y(goals_[j].y) == arena.cell_y(goals_[i].y)) {
        margin = margin_fields_[j];
        plain = plain_fields_[j];
        break;
      }
    }
    if (!plain) {
      auto planned = plan_fields(arena, goals_[i], kOracleMargin);
      margin = planned.first;
      plain = planned.second;
    }
    base_plain_fields_.push_back(plain);
    margin_fields_.push_back(std::move(margin));
    plain_fields_.push_back(std::move(plain));
  }
}

void OracleContext::replan(const sim::World& world, int agent, uint64_t mask) {
  // parked teammates become part of the map; routes bend around blockades
  scene::Arena stamped = *arena_;
  for (int j = 0; j < world.n_agents(); ++j) {
    if (j == agent || !world.agents()[j].frozen) continue;
    const Pose& q = world.agents()[j].pose;
    // shrink by the cell quantization so near-passable gaps stay open
    const double r = world.agents()[j].radius - 0.5 * stamped.cell_size;
    const int x0 = stamped.cell_x(q.x - r), x1 = stamped.cell_x(q.x + r);
    const int y0 = stamped.cell_y(q.y - r), y1 = stamped.cell_y(q.y + r);
    for (int iy = y0; iy <= y1; ++iy) {
      for (int ix = x0; ix <= x1; ++ix) {
        if (!stamped.in_bounds(ix, iy)) continue;
        const double cx0 = ix * stamped.cell_size, cy0 = iy * stamped.cell_size;
        const double dx = q.x < cx0 ? cx0 - q.x
                                    : (q.x > cx0 + stamped.cell_size
                                           ? q.x - cx0 - stamped.cell_size : 0.0);
        const double dy = q.y < cy0 ? cy0 - q.y
                                    : (q.y > cy0 + stamped.cell_size
                                           ? q.y - cy0 - stamped.cell_size : 0.0);
        if (dx * dx + dy * dy < r * r) {
          stamped.occupancy[static_cast<size_t>(iy) * stamped.nx + ix] = 1;
        }
      }
    }
  }
  try {
    auto planned = plan_fields(stamped, goals_[agent], kOracleMargin);
    // keep the blockade-aware plan only if it still reaches the agent
    if (std::isfinite(planned.second->at_nearest(world.agents()[agent].pose, 4))) {
      margin_fields_[agent] = planned.first;
      plain_fields_[agent] = planned.second;
      stamped_mask_[agent] = mask;
    }
  } catch (const std::runtime_error&) {
    // goal cell swallowed by a parked body: keep the previous plan
  }
  planned_mask_[agent] = mask;
}

Action OracleContext::act(const sim::World& world, int agent) {
  uint64_t mask = 0;
  for (int j = 0; j < world.n_agents(); ++j) {
    if (j != agent && world.agents()[j].frozen) mask |= (1ull << j);
  }
  if (mask != planned_mask_[agent]) replan(world, agent, mask);

  const Pose& pose = world.agents()[agent].pose;

  // static-deadlock escape: a repeated drive command that moves nothing
  // gets broken by backing off, then by turning away
  const double moved = std::hypot(pose.x - prev_pose_[agent].x,
                                  pose.y - prev_pose_[agent].y);
  if (moved < 0.02 && prev_v_[agent] > 0.05) {
    stuck_steps_[agent]++;
  } else if (moved >= 0.02) {
    stuck_steps_[agent] = 0;
  }
  prev_pose_[agent] = pose;
  const auto commit = [&](Action a) {
    prev_v_[agent] = std::abs(a.v);
    return a;
  };
  if (stuck_steps_[agent] >= 2) {
    if (stuck_steps_[agent] >= 4) stuck_steps_[agent] = 0;
    commit_steps_[agent] = 0;
    return commit(Action{-0.6, 0.3});
  }

  const int pcx = static_cast<int>(std::floor(pose.x / arena_->cell_size));
  const int pcy = static_cast<int>(std::floor(pose.y / arena_->cell_size));
  // with a blockade replan active the margin/plain pair may route opposite
  // ways around the stamped body; stick to the exact field then
  const bool use_margin = stamped_mask_[agent] == 0 &&
                          std::isfinite(margin_fields_[agent]->at_cell(pcx, pcy));
  const scene::GeodesicField& field =
      use_margin ? *margin_fields_[agent] : *plain_fields_[agent];
  // a squeeze past a stamped body can leave the replanned field unreachable
  // at the live pose; the original map is the authority then
  const scene::GeodesicField& fine =
      std::isfinite(plain_fields_[agent]->at_nearest(pose, 3))
          ? *plain_fields_[agent]
          : *base_plain_fields_[agent];
  const double d = fine.at_nearest(pose, 3);
  if (!std::isfinite(d)) return commit(oracle_policy(fine, pose));  // raises
  if (d == 0.0) return commit(Action{0.0, 0.0});

  double tx = 0.0, ty = 0.0;
  bool have_target = descent_target(field, pose, &tx, &ty);
  if (!have_target && &field != &fine) {
    have_target = descent_target(fine, pose, &tx, &ty);
  }
  if (!have_target) {
    // inside the goal cell's surroundings: close the gap directly
    if (d < 1.0 && chord_navigable(fine, pose, fine.goal.x, fine.goal.y)) {
      tx = fine.goal.x;
      ty = fine.goal.y;
      have_target = true;
    } else {
      return commit(Action{0.0, 0.5});  // nothing sensible: scan around
    }
  }

  // teammate bodies on the chord: only obstruction ahead counts, so a
  // touching blocker never vetoes a move directed away from it. Frozen
  // bodies already stamped into the plan are part of the map, not movers,
  // and re-vetoing them would fight the planned corridor.
  const auto chord_blocker = [&](double x1, double y1, double extra) {
    int blocker = -1;
    double best_d = 1e18;
    for (int j = 0; j < world.n_agents(); ++j) {
      if (j == agent) continue;
      if ((stamped_mask_[agent] >> j) & 1ull) continue;
      const Pose& q = world.agents()[j].pose;
      const double ux = x1 - pose.x, uy = y1 - pose.y;
      const double len = std::hypot(ux, uy);
      if (len < 1e-9) continue;
      const double proj = ((q.x - pose.x) * ux + (q.y - pose.y) * uy) / len;
      if (proj <= 0.05) continue;  // beside or behind: not in the way
      const double s = std::min(proj, len);
      const double px = pose.x + s * ux / len, py = pose.y + s * uy / len;
      const double dist = std::hypot(q.x - px, q.y - py);
      const double rr = world.agents()[agent].radius + world.agents()[j].radius + extra;
      const double to_q = std::hypot(q.x - pose.x, q.y - pose.y);
      if (dist < rr && to_q < best_d) {
        best_d = to_q;
        blocker = j;
      }
    }
    return blocker;
  };

  const int blocker = chord_blocker(tx, ty, 0.05);
  if (blocker < 0) return commit(steer_to(pose, tx, ty, d, 1.0));

  // endgame: the success disc is close but the descent chord is blocked by
  // a parked teammate. Aim at any reachable cell inside the success radius,
  // accepting squeeze-through gaps the coarse margin would veto.
  if (d < 1.8) {
    const double cell = fine.cell_size;
    const int reach = static_cast<int>(std::ceil(1.6 / cell));
    double best_cost = 1e18;
    double bx = 0.0, by = 0.0;
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        const double dv = fine.at_cell(pcx + dx, pcy + dy);
        if (!(dv <= 0.95)) continue;
        const double wx = (pcx + dx + 0.5) * cell;
        const double wy = (pcy + dy + 0.5) * cell;
        const double hop_len = std::hypot(wx - pose.x, wy - pose.y);
        if (hop_len < 1e-6 || hop_len > 1.6) continue;
        if (!chord_navigable(fine, pose, wx, wy)) continue;
        if (chord_blocker(wx, wy, 0.015) >= 0) continue;
        const double cost = hop_len + dv;
        if (cost < best_cost) {
          best_cost = cost;
          bx = wx;
          by = wy;
        }
      }
    }
    if (best_cost < 1e17) {
      const double bearing = std::atan2(by - pose.y, bx - pose.x);
      const double err = normalize_angle(bearing - pose.o);
      Action a;
      a.w = covnav::clamp(err / M_PI, -1.0, 1.0);
      // tight alignment before creeping through the gap
      a.v = std::abs(err) > 0.15
                ? 0.0
                : covnav::clamp(std::hypot(bx - pose.x, by - pose.y) / kVMax, 0.0, 0.4);
      return commit(a);
    }
  }

  // an active sidestep commitment keeps the agent from flip-flopping
  // between symmetric detours on successive replans
  if (commit_steps_[agent] > 0) {
    commit_steps_[agent]--;
    const double cdist = std::hypot(commit_x_[agent] - pose.x, commit_y_[agent] - pose.y);
    if (cdist > 0.12 && chord_navigable(fine, pose, commit_x_[agent], commit_y_[agent])) {
      return commit(steer_to(pose, commit_x_[agent], commit_y_[agent], cdist, 0.6));
    }
    commit_steps_[agent] = 0;
  }

  // sidestep fan around the blocker
  const Pose& q = world.agents()[blocker].pose;
  const double base = std::atan2(ty - pose.y, tx - pose.x);
  const double to_blocker = std::atan2(q.y - pose.y, q.x - pose.x);
  const double side = normalize_angle(to_blocker - base) >= 0.0 ? -1.0 : 1.0;
  for (const double hop : {0.6, 1.0}) {
    for (const double ang : {side * 0.7, side * 1.2, side * 1.6, -side * 0.7,
                             -side * 1.2, -side * 1.6}) {
      const double cx = pose.x + hop * std::cos(base + ang);
      const double cy = pose.y + hop * std::sin(base + ang);
      const Pose cand(cx, cy, 0.0);
      if (!fine.inside(cand)) continue;
      if (!chord_navigable(fine, pose, cx, cy)) continue;
      if (chord_blocker(cx, cy, 0.05) >= 0) continue;
      commit_x_[agent] = cx;
      commit_y_[agent] = cy;
      commit_steps_[agent] = 3;
      return commit(steer_to(pose, cx, cy, hop, 0.6));
    }
  }

  // boxed in: back straight out when the blocker sits ahead, opening room
  // for a sidestep on a later step; otherwise turn in place
  const double blocker_err = normalize_angle(to_blocker - pose.o);
  if (std::abs(blocker_err) < M_PI / 2 &&
      std::hypot(q.x - pose.x, q.y - pose.y) < 0.6) {
    return commit(Action{-0.5, 0.0});
  }
  return commit(Action{0.0, 0.5});
}

}  // namespace covnav::bench
