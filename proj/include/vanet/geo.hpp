#pragma once

#include <compare>
#include <cstdint>

namespace vanet::geo {

struct Position {
  double x = 0;
  double y = 0;
  double z = 0;  // carried but ignored by all planar math
};

// Distance in the road plane; z is ignored.
double planar_distance(const Position& a, const Position& b);

enum class RoadClass : uint8_t { Conventional = 0, Highway = 1 };

struct RoadProfile {
  int lanes = 1;                 // per direction
  double speed_limit_kmh = 50;
  RoadClass road_class = RoadClass::Conventional;
  double heading_rad = 0;        // road axis, measured from +x toward +y
};

struct ZoneRadii {
  double danger_m = 0;
  double uncertainty_m = 0;
  double security_m = 0;
  bool valid() const {
    return danger_m > 0 && danger_m < uncertainty_m && uncertainty_m < security_m;
  }
};

enum class Zone : uint8_t { Danger, Uncertainty, Security, OutOfScope };

// Boundaries belong to the inner zone: d == danger_m classifies as Danger.
Zone classify_zone(double distance_m, const ZoneRadii& radii);
Zone classify_zone(const Position& node, const Position& event, const ZoneRadii& radii);

// Rule-of-thumb braking distance: (v/10)^2 meters for v in km/h.
double safety_distance_m(double speed_limit_kmh);

struct CellDims {
  double length_m = 0;  // along the road axis: 2 * safety distance
  double width_m = 0;   // across: 4 * lanes
};
CellDims cell_dimensions(const RoadProfile& road);

struct CellId {
  int64_t i = 0;
  int64_t j = 0;
  auto operator<=>(const CellId&) const = default;
};

// Grid of cells centered on the event location; cell (0,0) spans
// [-L/2, L/2) x [-W/2, W/2) in road-aligned coordinates.
struct CellGrid {
  Position origin;
  double heading_rad = 0;
  double length_m = 0;
  double width_m = 0;
  double extent_m = 0;  // danger radius; the grid only matters inside it
};

CellGrid build_grid(const Position& event, const RoadProfile& road, double danger_radius_m);

// Half-open boxes: i = floor((u + L/2) / L), j = floor((v + W/2) / W) where
// (u, v) is the position rotated into the road frame. Every point maps to
// exactly one cell.
CellId cell_of(const CellGrid& grid, const Position& p);

Position cell_center(const CellGrid& grid, const CellId& id);

// Vehicles that fit one safety distance apart per lane across one cell,
// counting both cell ends.
int max_group_size(const RoadProfile& road);

}  // namespace vanet::geo
