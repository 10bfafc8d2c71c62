#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "deskorg/perception.hpp"

namespace deskorg {

// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline void write_xyz(std::ostream& os, const PointCloud3& cloud) {
  for (const auto& p : cloud.points)
    os << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << '\n';
}

inline PointCloud3 read_xyz(std::istream& is) {
  PointCloud3 cloud;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    Vec3 p;
    if (!(ls >> p.x >> p.y >> p.z) || !std::isfinite(p.x) || !std::isfinite(p.y) ||
        !std::isfinite(p.z))
      throw Error(ErrorCode::schema, "bad XYZ record on line " + std::to_string(lineno));
    cloud.points.push_back(p);
  }
  return cloud;
}

inline void save_xyz(const std::string& path, const PointCloud3& cloud) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io, "cannot write " + path);
  write_xyz(os, cloud);
}

inline PointCloud3 load_xyz(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io, "cannot read " + path);
  return read_xyz(is);
}

}  // namespace deskorg
