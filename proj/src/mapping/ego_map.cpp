#include "covnav/mapping/ego_map.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace covnav::mapping {

std::string MapConfig::to_json() const {
  nlohmann::json j;
  j["extent_m"] = extent_m;
  j["fine_cell_m"] = fine_cell_m;
  j["coarse_cell_m"] = coarse_cell_m;
  j["feature_channels"] = feature_channels;
  j["sensor_range_m"] = sensor_range_m;
  j["obstacle_alpha"] = obstacle_alpha;
  return j.dump();
}

MapConfig MapConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  MapConfig c;
  c.extent_m = j.at("extent_m").get<double>();
  c.fine_cell_m = j.at("fine_cell_m").get<double>();
  c.coarse_cell_m = j.at("coarse_cell_m").get<double>();
  c.feature_channels = j.at("feature_channels").get<int>();
  c.sensor_range_m = j.at("sensor_range_m").get<double>();
  c.obstacle_alpha = j.at("obstacle_alpha").get<double>();
  return c;
}

EgoMap::EgoMap(MapConfig cfg) : cfg_(cfg) {
  const size_t n = static_cast<size_t>(cfg_.fine_cells()) * cfg_.fine_cells();
  obstacle_.assign(n, 0.0);
  explored_.assign(n, 0);
  trajectory_.assign(n, 0);
  current_.assign(n, 0);
  const size_t nf = static_cast<size_t>(cfg_.feature_channels) *
                    cfg_.coarse_cells() * cfg_.coarse_cells();
  features_.assign(nf, 0.0);
}

double EgoMap::feature(int channel, int cx, int cy) const {
  const int lf = cfg_.coarse_cells();
  return features_[(static_cast<size_t>(channel) * lf + cy) * lf + cx];
}

double EgoMap::channel_sum() const {
  double s = 0.0;
  for (double v : obstacle_) s += v;
  for (auto v : explored_) s += v;
  for (auto v : trajectory_) s += v;
  for (auto v : current_) s += v;
  for (double v : features_) s += v;
  return s;
}

void EgoMap::to_map_frame(double wx, double wy, double* mx, double* my) const {
  const double dx = wx - origin_.x;
  const double dy = wy - origin_.y;
  const double c = std::cos(origin_.o), s = std::sin(origin_.o);
  *mx = c * dx + s * dy;
  *my = -s * dx + c * dy;
}

bool EgoMap::to_cell(const Pose& world, int* ix, int* iy) const {
  double mx, my;
  to_map_frame(world.x, world.y, &mx, &my);
  *ix = static_cast<int>(std::floor(to_px(mx) / cfg_.fine_cell_m));
  *iy = static_cast<int>(std::floor(to_px(my) / cfg_.fine_cell_m));
  const int l = cfg_.fine_cells();
  return *ix >= 0 && *ix < l && *iy >= 0 && *iy < l;
}

void EgoMap::set_explored(int ix, int iy) {
  const size_t i = index(ix, iy);
  if (!explored_[i]) {
    explored_[i] = 1;
    explored_count_++;
    explored_obstacle_sum_ += obstacle_[i];
  }
}

void EgoMap::update_obstacle(int ix, int iy, double target) {
  const size_t i = index(ix, iy);
  const double before = obstacle_[i];
  const double after = (1.0 - cfg_.obstacle_alpha) * before + cfg_.obstacle_alpha * target;
  obstacle_[i] = after;
  if (explored_[i]) explored_obstacle_sum_ += obstacle_[i] - before;
}

void EgoMap::update(const sim::Observation& obs, const Pose& pose_prev,
                    const Pose& pose_cur) {
  if (!anchored_) {
    origin_ = pose_prev;
    anchored_ = true;
  }
  const int l = cfg_.fine_cells();
  int cx, cy;
  if (!to_cell(pose_cur, &cx, &cy)) throw std::runtime_error("map overflow");

  double mx, my;
  to_map_frame(pose_cur.x, pose_cur.y, &mx, &my);
  const double px = to_px(mx);  // grid coordinates from the map corner
  const double py = to_px(my);

  const int k_rays = static_cast<int>(obs.depths.size());
  const double cell = cfg_.fine_cell_m;
  for (int k = 0; k < k_rays; ++k) {
    const double world_ang = pose_cur.o + 2.0 * M_PI * k / k_rays;
    // tiny fixed tilt keeps rays off exact grid alignments, where the cell
    // walk would otherwise depend on fp tie-breaking
    const double ang = world_ang - origin_.o + 1e-7;
    const double dx = std::cos(ang), dy = std::sin(ang);
    const double depth = obs.depths[k] * cfg_.sensor_range_m;

    // march fine cells along the ray, free-updating everything before the
    // hit; cells outside the map extent are skipped
    int ix = static_cast<int>(std::floor(px / cell));
    int iy = static_cast<int>(std::floor(py / cell));
    const double inf = std::numeric_limits<double>::infinity();
    const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    const double tdx = sx != 0 ? cell / std::abs(dx) : inf;
    const double tdy = sy != 0 ? cell / std::abs(dy) : inf;
    double tmx = inf, tmy = inf;
    if (sx > 0) tmx = ((ix + 1) * cell - px) / dx;
    if (sx < 0) tmx = (ix * cell - px) / dx;
    if (sy > 0) tmy = ((iy + 1) * cell - py) / dy;
    if (sy < 0) tmy = (iy * cell - py) / dy;

    // free cells strictly before the hit face; the wall cell is resolved
    // from the endpoint to avoid double-touching it across the boundary
    double t = 0.0;
    while (t < depth - 1e-9) {
      if (ix >= 0 && ix < l && iy >= 0 && iy < l) {
        set_explored(ix, iy);
        update_obstacle(ix, iy, 0.0);
      }
      if (tmx < tmy) {
        t = tmx;
        tmx += tdx;
        ix += sx;
      } else {
        t = tmy;
        tmy += tdy;
        iy += sy;
      }
    }
    if (obs.hit_types[k] == sim::HitType::wall) {
      const double hd = depth + 0.25 * cell;
      const int hx = static_cast<int>(std::floor((px + dx * hd) / cell));
      const int hy = static_cast<int>(std::floor((py + dy * hd) / cell));
      if (hx >= 0 && hx < l && hy >= 0 && hy < l) {
        set_explored(hx, hy);
        update_obstacle(hx, hy, 1.0);
      }
    }
  }

  // trajectory footprint: cells whose square overlaps the agent disc
  const int reach = static_cast<int>(std::ceil(kAgentRadius / cell)) + 1;
  for (int dyc = -reach; dyc <= reach; ++dyc) {
    for (int dxc = -reach; dxc <= reach; ++dxc) {
      const int ix = cx + dxc, iy = cy + dyc;
      if (ix < 0 || ix >= l || iy < 0 || iy >= l) continue;
      const double qx0 = ix * cell, qy0 = iy * cell;
      const double ddx = px < qx0 ? qx0 - px : (px > qx0 + cell ? px - qx0 - cell : 0.0);
      const double ddy = py < qy0 ? qy0 - py : (py > qy0 + cell ? py - qy0 - cell : 0.0);
      if (ddx * ddx + ddy * ddy >= kAgentRadius * kAgentRadius) continue;
      const size_t i = index(ix, iy);
      set_explored(ix, iy);
      if (!trajectory_[i]) {
        trajectory_[i] = 1;
        trajectory_count_++;
      }
    }
  }

  // current location: rebuilt from scratch each update
  for (int i : current_cells_) current_[i] = 0;
  current_cells_.clear();
  for (int dyc = -reach; dyc <= reach; ++dyc) {
    for (int dxc = -reach; dxc <= reach; ++dxc) {
      const int ix = cx + dxc, iy = cy + dyc;
      if (ix < 0 || ix >= l || iy < 0 || iy >= l) continue;
      const double qx0 = ix * cell, qy0 = iy * cell;
      const double ddx = px < qx0 ? qx0 - px : (px > qx0 + cell ? px - qx0 - cell : 0.0);
      const double ddy = py < qy0 ? qy0 - py : (py > qy0 + cell ? py - qy0 - cell : 0.0);
      if (ddx * ddx + ddy * ddy >= kAgentRadius * kAgentRadius) continue;
      const int i = static_cast<int>(index(ix, iy));
      current_[i] = 1;
      current_cells_.push_back(i);
    }
  }

  // pooled ray features overwrite the coarse cell containing the pose
  const int lf = cfg_.coarse_cells();
  const int fx = std::min(lf - 1, static_cast<int>(px / cfg_.coarse_cell_m));
  const int fy = std::min(lf - 1, static_cast<int>(py / cfg_.coarse_cell_m));
  const int c_channels = cfg_.feature_channels;
  for (int s = 0; s < c_channels; ++s) {
    double sum = 0.0;
    int count = 0;
    for (int k = 0; k < k_rays; ++k) {
      if (k * c_channels / k_rays == s) {
        sum += obs.depths[k];
        count++;
      }
    }
    features_[(static_cast<size_t>(s) * lf + fy) * lf + fx] = count ? sum / count : 0.0;
  }
}

Eigen::VectorXd EgoMap::summary(const Pose& pose) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(cfg_.digest_dim());
  const int l = cfg_.fine_cells();
  const int lf = cfg_.coarse_cells();
  if (!anchored_) return out;

  double mx, my;
  to_map_frame(pose.x, pose.y, &mx, &my);
  const int fx = static_cast<int>(std::floor(to_px(mx) / cfg_.coarse_cell_m));
  const int fy = static_cast<int>(std::floor(to_px(my) / cfg_.coarse_cell_m));

  int idx = 0;
  for (int c = 0; c < cfg_.feature_channels; ++c) {
    for (int wy = -2; wy <= 2; ++wy) {
      for (int wx = -2; wx <= 2; ++wx) {
        const int gx = fx + wx, gy = fy + wy;
        double v = 0.0;
        if (gx >= 0 && gx < lf && gy >= 0 && gy < lf) v = feature(c, gx, gy);
        out[idx++] = v;
      }
    }
  }
  const double total = static_cast<double>(l) * l;
  out[idx++] = explored_count_ / total;
  out[idx++] = explored_count_ > 0 ? explored_obstacle_sum_ / explored_count_ : 0.0;
  out[idx++] = trajectory_count_ / total;
  const int ix = static_cast<int>(std::floor(to_px(mx) / cfg_.fine_cell_m));
  const int iy = static_cast<int>(std::floor(to_px(my) / cfg_.fine_cell_m));
  out[idx++] = (ix >= 0 && ix < l && iy >= 0 && iy < l) ? obstacle_prob(ix, iy) : 0.0;
  return out;
}

std::string EgoMap::dump_json() const {
  nlohmann::json j;
  const int l = cfg_.fine_cells();
  j["fine_cells"] = l;
  j["coarse_cells"] = cfg_.coarse_cells();
  j["feature_channels"] = cfg_.feature_channels;
  j["extent_m"] = cfg_.extent_m;
  j["obstacle_prob"] = obstacle_;
  j["explored"] = std::vector<int>(explored_.begin(), explored_.end());
  j["trajectory"] = std::vector<int>(trajectory_.begin(), trajectory_.end());
  j["current_loc"] = std::vector<int>(current_.begin(), current_.end());
  j["features"] = features_;
  return j.dump();
}

}  // namespace covnav::mapping
