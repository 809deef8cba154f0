#include "vanet/geo.hpp"

#include <cmath>
#include <stdexcept>

namespace vanet::geo {

double planar_distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

Zone classify_zone(double distance_m, const ZoneRadii& radii) {
  if (distance_m <= radii.danger_m) return Zone::Danger;
  if (distance_m <= radii.uncertainty_m) return Zone::Uncertainty;
  if (distance_m <= radii.security_m) return Zone::Security;
  return Zone::OutOfScope;
}

Zone classify_zone(const Position& node, const Position& event, const ZoneRadii& radii) {
  return classify_zone(planar_distance(node, event), radii);
}

double safety_distance_m(double speed_limit_kmh) {
  if (speed_limit_kmh <= 0) throw std::domain_error("speed limit must be positive");
  double tens = speed_limit_kmh / 10.0;
  return tens * tens;
}

CellDims cell_dimensions(const RoadProfile& road) {
  if (road.lanes < 1) throw std::domain_error("lane count must be at least 1");
  return {2.0 * safety_distance_m(road.speed_limit_kmh), 4.0 * road.lanes};
}

CellGrid build_grid(const Position& event, const RoadProfile& road, double danger_radius_m) {
  if (danger_radius_m <= 0) throw std::domain_error("danger radius must be positive");
  CellDims dims = cell_dimensions(road);
  return {event, road.heading_rad, dims.length_m, dims.width_m, danger_radius_m};
}

CellId cell_of(const CellGrid& grid, const Position& p) {
  double dx = p.x - grid.origin.x;
  double dy = p.y - grid.origin.y;
  double c = std::cos(grid.heading_rad);
  double s = std::sin(grid.heading_rad);
  double u = dx * c + dy * s;
  double v = -dx * s + dy * c;
  return {static_cast<int64_t>(std::floor((u + grid.length_m / 2) / grid.length_m)),
          static_cast<int64_t>(std::floor((v + grid.width_m / 2) / grid.width_m))};
}

Position cell_center(const CellGrid& grid, const CellId& id) {
  double u = static_cast<double>(id.i) * grid.length_m;
  double v = static_cast<double>(id.j) * grid.width_m;
  double c = std::cos(grid.heading_rad);
  double s = std::sin(grid.heading_rad);
  return {grid.origin.x + u * c - v * s, grid.origin.y + u * s + v * c, grid.origin.z};
}

int max_group_size(const RoadProfile& road) {
  CellDims dims = cell_dimensions(road);
  double safety = safety_distance_m(road.speed_limit_kmh);
  int per_lane = static_cast<int>(std::floor(dims.length_m / safety)) + 1;
  return road.lanes * per_lane;
}

}  // namespace vanet::geo
