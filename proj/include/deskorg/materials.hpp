#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "deskorg/geometry.hpp"
#include "deskorg/rng.hpp"
#include "deskorg/scene.hpp"

namespace deskorg {

// Size/mass ranges for generated objects. Ranges are reconstructed desk-scale
// values; book thicknesses are the tested set.
struct MaterialRange {
  Category category;
  double length_lo, length_hi;  // long side (long leg for triangles)
  double width_lo, width_hi;    // short side; ignored for triangles
  double height_lo, height_hi;
  double mass_lo, mass_hi;      // kg
};

inline constexpr std::array<MaterialRange, 8> kMaterialTable{{
    {Category::pen, 0.135, 0.150, 0.010, 0.012, 0.010, 0.012, 0.008, 0.015},
    {Category::eraser, 0.040, 0.060, 0.018, 0.025, 0.010, 0.012, 0.010, 0.025},
    {Category::lead_case, 0.060, 0.090, 0.012, 0.020, 0.006, 0.009, 0.005, 0.012},
    {Category::straight_ruler, 0.150, 0.200, 0.025, 0.030, 0.002, 0.002, 0.010, 0.020},
    {Category::triangle_ruler_30, 0.140, 0.150, 0.0, 0.0, 0.002, 0.002, 0.010, 0.015},
    {Category::triangle_ruler_45, 0.110, 0.120, 0.0, 0.0, 0.002, 0.002, 0.008, 0.013},
    {Category::paper, 0.297, 0.297, 0.210, 0.210, 0.0001, 0.0001, 0.0, 0.0},
    {Category::book, 0.210, 0.250, 0.150, 0.180, 0.0, 0.0, 0.0, 0.0},
}};

inline constexpr std::array<double, 4> kBookThicknesses{0.0025, 0.0065, 0.009, 0.012};
inline constexpr double kPaperGsmLo = 70.0, kPaperGsmHi = 80.0;
inline constexpr double kSpineGapMean = 0.005, kSpineGapSpread = 0.002;
inline constexpr double kBookDensity = 700.0;  // kg/m^3

inline const MaterialRange& material_range(Category c) {
  for (const auto& m : kMaterialTable)
    if (m.category == c) return m;
  throw Error(ErrorCode::unsupported_category,
              "no material data for " + std::string(category_name(c)));
}

// Centered rectangle, long side along body x.
inline Polygon rect_footprint(double length, double width) {
  const double a = 0.5 * length, b = 0.5 * width;
  return Polygon({{-a, -b}, {a, -b}, {a, b}, {-a, b}});
}

// Right triangle with legs along body +x (long) and +y, centroid at origin.
inline Polygon right_triangle_footprint(double leg_x, double leg_y) {
  const Point2 c{leg_x / 3.0, leg_y / 3.0};
  return Polygon({Point2{0, 0} - c, Point2{leg_x, 0} - c, Point2{0, leg_y} - c});
}

// Samples a body-frame object of category `c` (no pose, no support).
inline ObjectState sample_object(Category c, std::string id, Rng& rng) {
  const MaterialRange& m = material_range(c);
  ObjectState o;
  o.id = std::move(id);
  o.category = c;
  const double len = rng.uniform(m.length_lo, m.length_hi);
  switch (c) {
    case Category::triangle_ruler_30:
      o.footprint = right_triangle_footprint(len, len * std::tan(deg2rad(30.0)));
      break;
    case Category::triangle_ruler_45:
      o.footprint = right_triangle_footprint(len, len);
      break;
    default:
      o.footprint = rect_footprint(len, rng.uniform(m.width_lo, m.width_hi));
  }
  if (c == Category::pen) {
    // A pen lies on its side: height equals its width.
    const double w = 2.0 * o.footprint[2].y;
    o.height = w;
  } else {
    o.height = rng.uniform(m.height_lo, m.height_hi);
  }
  o.mass = rng.uniform(m.mass_lo, m.mass_hi);
  if (c == Category::paper) {
    const double gsm = rng.uniform(kPaperGsmLo, kPaperGsmHi);
    o.material = PaperMaterial{gsm};
    o.mass = gsm * 1e-3 * o.footprint.area();
  } else if (c == Category::book) {
    const double t = kBookThicknesses[rng.index(kBookThicknesses.size())];
    const double gap = kSpineGapMean + rng.uniform(-kSpineGapSpread, kSpineGapSpread);
    o.material = BookMaterial{t, gap};
    o.height = t;
    o.mass = kBookDensity * o.footprint.area() * t;
  }
  return o;
}

}  // namespace deskorg
