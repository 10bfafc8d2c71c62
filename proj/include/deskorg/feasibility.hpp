#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deskorg/error.hpp"
#include "deskorg/geometry.hpp"

namespace deskorg {

enum class GraspMode { contact, noncontact };
enum class OffsetBand { none, lateral, longitudinal };
enum class RulerKind { straight, triangular };
enum class SupportKind { desktop, book, paper };

// Where a cell value comes from: a measured rate, a measured bound (value taken
// at the bound), reconstructed from a trend, or calibrated here.
enum class Provenance { measured, measured_bound, reconstructed, calibrated };

constexpr std::string_view to_string(GraspMode m) {
  return m == GraspMode::contact ? "contact" : "noncontact";
}
constexpr std::string_view to_string(OffsetBand b) {
  switch (b) {
    case OffsetBand::none: return "none";
    case OffsetBand::lateral: return "lateral";
    case OffsetBand::longitudinal: return "longitudinal";
  }
  return "none";
}
constexpr std::string_view to_string(RulerKind k) {
  return k == RulerKind::straight ? "straight" : "triangular";
}
constexpr std::string_view to_string(SupportKind s) {
  switch (s) {
    case SupportKind::desktop: return "desktop";
    case SupportKind::book: return "book";
    case SupportKind::paper: return "paper";
  }
  return "desktop";
}
constexpr std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::measured: return "measured";
    case Provenance::measured_bound: return "measured_bound";
    case Provenance::reconstructed: return "reconstructed";
    case Provenance::calibrated: return "calibrated";
  }
  return "reconstructed";
}

struct ContactCell {
  GraspMode mode;
  double height_max;  // band upper bound, meters; +inf for the last band
  OffsetBand offset;
  double probability;
  Provenance provenance;
};

struct PaperCell {
  double offset;  // grasp position from the paper edge, meters
  double critical_gsm;
  Provenance provenance;
};

struct PryCell {
  double thickness;  // meters
  double alpha;      // radians
  double probability;
  Provenance provenance;
};

struct PushGraspCell {
  RulerKind ruler;
  SupportKind support;
  double probability;
  Provenance provenance;
};

struct Lookup {
  double probability = 0.0;
  bool extrapolated = false;  // query fell between tested values
  bool out_of_band = false;   // query outside the tested envelope
};

struct FeasibilityTables {
  std::vector<ContactCell> contact_grasp;
  std::vector<PaperCell> paper_grasp;
  std::vector<PryCell> pry;
  std::vector<PushGraspCell> push_grasp;
  double max_reach = 0.096;  // W0 + 2 Hmax

  static FeasibilityTables calibrated();
  friend bool operator==(const FeasibilityTables&, const FeasibilityTables&) = default;
};

inline bool operator==(const ContactCell& a, const ContactCell& b) {
  return a.mode == b.mode && a.height_max == b.height_max && a.offset == b.offset &&
         a.probability == b.probability && a.provenance == b.provenance;
}
inline bool operator==(const PaperCell& a, const PaperCell& b) {
  return a.offset == b.offset && a.critical_gsm == b.critical_gsm && a.provenance == b.provenance;
}
inline bool operator==(const PryCell& a, const PryCell& b) {
  return a.thickness == b.thickness && a.alpha == b.alpha && a.probability == b.probability &&
         a.provenance == b.provenance;
}
inline bool operator==(const PushGraspCell& a, const PushGraspCell& b) {
  return a.ruler == b.ruler && a.support == b.support && a.probability == b.probability &&
         a.provenance == b.provenance;
}

inline FeasibilityTables FeasibilityTables::calibrated() {
  using P = Provenance;
  constexpr double inf = std::numeric_limits<double>::infinity();
  FeasibilityTables t;

  // Small-object grasp-and-place. Height bands are upper bounds in meters.
  const std::array<double, 4> h{0.006, 0.009, 0.012, inf};
  for (double hm : h) t.contact_grasp.push_back({GraspMode::contact, hm, OffsetBand::none, 1.0, P::measured});
  for (double hm : h) t.contact_grasp.push_back({GraspMode::contact, hm, OffsetBand::lateral, 0.9, P::measured_bound});
  for (double hm : h) t.contact_grasp.push_back({GraspMode::contact, hm, OffsetBand::longitudinal, 0.9, P::measured_bound});
  t.contact_grasp.push_back({GraspMode::noncontact, 0.006, OffsetBand::none, 0.3, P::measured_bound});
  t.contact_grasp.push_back({GraspMode::noncontact, 0.009, OffsetBand::none, 0.6, P::measured});
  t.contact_grasp.push_back({GraspMode::noncontact, 0.012, OffsetBand::none, 0.9, P::reconstructed});
  t.contact_grasp.push_back({GraspMode::noncontact, inf, OffsetBand::none, 1.0, P::reconstructed});
  const std::array<double, 4> off{0.1, 0.4, 0.7, 0.8};
  for (std::size_t i = 0; i < h.size(); ++i) {
    t.contact_grasp.push_back({GraspMode::noncontact, h[i], OffsetBand::lateral, off[i], P::reconstructed});
    t.contact_grasp.push_back({GraspMode::noncontact, h[i], OffsetBand::longitudinal, off[i], P::reconstructed});
  }

  // Heaviest sheet (gsm) that still lifts, by grasp offset.
  t.paper_grasp = {
      {0.050, 60.0, P::reconstructed},
      {0.060, 70.0, P::reconstructed},
      {0.070, 80.0, P::measured_bound},
      {0.080, 100.0, P::reconstructed},
      {0.090, 120.0, P::measured},
  };

  // Book prying by thickness and angle.
  const std::array<double, 6> alphas{0, 3, 6, 9, 12, 15};
  for (double a : alphas) t.pry.push_back({0.0025, deg2rad(a), 1.0, P::measured});
  for (double a : alphas) t.pry.push_back({0.0065, deg2rad(a), 1.0, P::measured});
  for (double a : alphas)
    t.pry.push_back({0.009, deg2rad(a), a == 0 ? 0.8 : 1.0, a == 0 ? P::measured : P::reconstructed});
  t.pry.push_back({0.012, deg2rad(0.0), 0.7, P::measured_bound});
  t.pry.push_back({0.012, deg2rad(3.0), 0.8, P::measured_bound});
  t.pry.push_back({0.012, deg2rad(6.0), 0.9, P::reconstructed});
  t.pry.push_back({0.012, deg2rad(9.0), 1.0, P::measured});
  t.pry.push_back({0.012, deg2rad(12.0), 0.9, P::reconstructed});
  t.pry.push_back({0.012, deg2rad(15.0), 0.8, P::measured_bound});
  for (double a : alphas) t.pry.push_back({0.024, deg2rad(a), 0.0, P::measured});

  // Ruler push-grasp (grasp stage only; placement noise is simulated).
  t.push_grasp = {
      {RulerKind::straight, SupportKind::desktop, 1.0, P::measured},
      {RulerKind::straight, SupportKind::book, 1.0, P::measured},
      {RulerKind::straight, SupportKind::paper, 1.0, P::reconstructed},
      {RulerKind::triangular, SupportKind::desktop, 0.95, P::calibrated},
      {RulerKind::triangular, SupportKind::book, 0.95, P::calibrated},
      {RulerKind::triangular, SupportKind::paper, 0.95, P::calibrated},
  };
  return t;
}

// Offsets are fractions of the object's dimensions. Below 1/6 counts as
// centered; 1/3 is the largest tested offset.
inline Lookup contact_grasp_probability(const FeasibilityTables& t, GraspMode mode,
                                        double height, double lateral = 0.0,
                                        double longitudinal = 0.0) {
  Lookup r;
  const double fl = std::abs(lateral), fo = std::abs(longitudinal);
  const double f = std::max(fl, fo);
  OffsetBand band = OffsetBand::none;
  if (f >= 1.0 / 6.0) band = fl >= fo ? OffsetBand::lateral : OffsetBand::longitudinal;
  if (f > 1.0 / 3.0 + 1e-9) r.extrapolated = true;
  const ContactCell* hit = nullptr;
  for (const auto& c : t.contact_grasp) {
    if (c.mode != mode || c.offset != band) continue;
    if (height <= c.height_max + 1e-12 && (!hit || c.height_max < hit->height_max)) hit = &c;
  }
  if (!hit) {
    r.out_of_band = true;
    return r;
  }
  r.probability = hit->probability;
  return r;
}

struct CriticalGsm {
  double gsm = 0.0;
  bool extrapolated = false;
};

inline CriticalGsm critical_gsm(const FeasibilityTables& t, double offset) {
  if (!(offset > 0.0) || offset > t.max_reach + 1e-12)
    throw Error(ErrorCode::offset_out_of_range,
                "grasp offset " + std::to_string(offset) + " m outside (0, max reach]");
  const PaperCell* best = nullptr;
  double bd = 0.0;
  for (const auto& c : t.paper_grasp) {
    const double d = std::abs(c.offset - offset);
    if (!best || d < bd - 1e-12 || (std::abs(d - bd) <= 1e-12 && c.critical_gsm < best->critical_gsm)) {
      best = &c;
      bd = d;
    }
  }
  if (!best) throw Error(ErrorCode::offset_out_of_range, "empty paper table");
  return {best->critical_gsm, bd > 1e-9};
}

inline bool paper_grasp_feasible(const FeasibilityTables& t, double gsm, double offset) {
  if (!(gsm > 0.0)) throw Error(ErrorCode::degenerate_input, "gsm must be positive");
  return gsm <= critical_gsm(t, offset).gsm;
}

namespace detail {
inline std::vector<double> pry_thicknesses(const FeasibilityTables& t) {
  std::vector<double> v;
  for (const auto& c : t.pry)
    if (std::find(v.begin(), v.end(), c.thickness) == v.end()) v.push_back(c.thickness);
  std::sort(v.begin(), v.end());
  return v;
}
// Nearest tested thickness; ties go to the thicker (harder) one.
inline std::optional<double> nearest_thickness(const FeasibilityTables& t, double thickness) {
  const auto v = pry_thicknesses(t);
  if (v.empty() || !(thickness > 0.0) || thickness > v.back() + 1e-9) return std::nullopt;
  double best = v.front();
  for (double x : v)
    if (std::abs(x - thickness) <= std::abs(best - thickness) + 1e-12) best = x;
  return best;
}
}  // namespace detail

inline Lookup pry_probability(const FeasibilityTables& t, double thickness, double alpha) {
  Lookup r;
  const auto th = detail::nearest_thickness(t, thickness);
  double a_lo = 1e300, a_hi = -1e300;
  for (const auto& c : t.pry) {
    a_lo = std::min(a_lo, c.alpha);
    a_hi = std::max(a_hi, c.alpha);
  }
  if (!th || alpha < a_lo - 1e-9 || alpha > a_hi + 1e-9) {
    r.out_of_band = true;
    return r;
  }
  const PryCell* best = nullptr;
  double bd = 0.0;
  for (const auto& c : t.pry) {
    if (c.thickness != *th) continue;
    const double d = std::abs(c.alpha - alpha);
    if (!best || d < bd - 1e-12 || (std::abs(d - bd) <= 1e-12 && c.probability < best->probability)) {
      best = &c;
      bd = d;
    }
  }
  r.probability = best->probability;
  r.extrapolated = std::abs(*th - thickness) > 1e-9 || bd > 1e-9;
  return r;
}

// Tested angles whose probability reaches `threshold` at this thickness, as a
// closed interval.
inline std::optional<std::pair<double, double>> pry_feasible_band(const FeasibilityTables& t,
                                                                  double thickness,
                                                                  double threshold) {
  const auto th = detail::nearest_thickness(t, thickness);
  if (!th) return std::nullopt;
  double lo = 1e300, hi = -1e300;
  for (const auto& c : t.pry) {
    if (c.thickness != *th || c.probability < threshold) continue;
    lo = std::min(lo, c.alpha);
    hi = std::max(hi, c.alpha);
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

inline Lookup push_grasp_probability(const FeasibilityTables& t, RulerKind ruler,
                                     SupportKind support) {
  for (const auto& c : t.push_grasp)
    if (c.ruler == ruler && c.support == support) return {c.probability, false, false};
  return {0.0, false, true};
}

// ---------------------------------------------------------------------------
// CSV: primitive,param1,param2,probability,provenance

namespace detail {

inline std::string csv_number(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double csv_parse_number(std::string_view s, std::size_t line) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw Error(ErrorCode::schema, "bad number '" + std::string(s) + "' on line " + std::to_string(line));
  return v;
}

template <typename E, std::size_t N>
E csv_parse_enum(std::string_view s, const std::array<E, N>& all, std::size_t line) {
  for (E e : all)
    if (to_string(e) == s) return e;
  throw Error(ErrorCode::schema, "unknown value '" + std::string(s) + "' on line " + std::to_string(line));
}

inline constexpr std::array<GraspMode, 2> kModes{GraspMode::contact, GraspMode::noncontact};
inline constexpr std::array<OffsetBand, 3> kBands{OffsetBand::none, OffsetBand::lateral,
                                                  OffsetBand::longitudinal};
inline constexpr std::array<RulerKind, 2> kRulers{RulerKind::straight, RulerKind::triangular};
inline constexpr std::array<SupportKind, 3> kSupports{SupportKind::desktop, SupportKind::book,
                                                      SupportKind::paper};
inline constexpr std::array<Provenance, 4> kProvenances{Provenance::measured, Provenance::measured_bound,
                                                        Provenance::reconstructed,
                                                        Provenance::calibrated};
}  // namespace detail

inline void write_csv(std::ostream& os, const FeasibilityTables& t) {
  using detail::csv_number;
  os << "primitive,param1,param2,probability,provenance\n";
  for (const auto& c : t.contact_grasp)
    os << "contact_grasp." << to_string(c.mode) << ',' << csv_number(c.height_max) << ','
       << to_string(c.offset) << ',' << csv_number(c.probability) << ',' << to_string(c.provenance) << '\n';
  for (const auto& c : t.paper_grasp)
    os << "paper_grasp," << csv_number(c.offset) << ',' << csv_number(c.critical_gsm) << ",1,"
       << to_string(c.provenance) << '\n';
  for (const auto& c : t.pry)
    os << "pry," << csv_number(c.thickness) << ',' << csv_number(c.alpha) << ','
       << csv_number(c.probability) << ',' << to_string(c.provenance) << '\n';
  for (const auto& c : t.push_grasp)
    os << "push_grasp," << to_string(c.ruler) << ',' << to_string(c.support) << ','
       << csv_number(c.probability) << ',' << to_string(c.provenance) << '\n';
  os << "max_reach," << csv_number(t.max_reach) << ",,1,measured\n";
}

inline std::string to_csv(const FeasibilityTables& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

inline FeasibilityTables read_csv(std::istream& is) {
  FeasibilityTables t;
  std::string line;
  std::size_t n = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (!header) {
      if (line != "primitive,param1,param2,probability,provenance")
        throw Error(ErrorCode::schema, "missing CSV header");
      header = true;
      continue;
    }
    if (f.size() != 5)
      throw Error(ErrorCode::schema, "expected 5 columns on line " + std::to_string(n));
    const auto prov = detail::csv_parse_enum(f[4], detail::kProvenances, n);
    const double p = detail::csv_parse_number(f[3], n);
    if (p < 0.0 || p > 1.0)
      throw Error(ErrorCode::schema, "probability outside [0,1] on line " + std::to_string(n));
    const std::string& prim = f[0];
    if (prim.rfind("contact_grasp.", 0) == 0) {
      t.contact_grasp.push_back({detail::csv_parse_enum(std::string_view(prim).substr(14), detail::kModes, n),
                                 detail::csv_parse_number(f[1], n),
                                 detail::csv_parse_enum(f[2], detail::kBands, n), p, prov});
    } else if (prim == "paper_grasp") {
      t.paper_grasp.push_back({detail::csv_parse_number(f[1], n), detail::csv_parse_number(f[2], n), prov});
    } else if (prim == "pry") {
      t.pry.push_back({detail::csv_parse_number(f[1], n), detail::csv_parse_number(f[2], n), p, prov});
    } else if (prim == "push_grasp") {
      t.push_grasp.push_back({detail::csv_parse_enum(f[1], detail::kRulers, n),
                              detail::csv_parse_enum(f[2], detail::kSupports, n), p, prov});
    } else if (prim == "max_reach") {
      t.max_reach = detail::csv_parse_number(f[1], n);
    } else {
      throw Error(ErrorCode::schema, "unknown primitive '" + prim + "' on line " + std::to_string(n));
    }
  }
  if (!header) throw Error(ErrorCode::schema, "empty feasibility CSV");
  return t;
}

}  // namespace deskorg
