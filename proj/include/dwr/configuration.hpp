#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dwr/geometry.hpp"
#include "dwr/window.hpp"

namespace dwr {

// Finite configuration. Points outside the window are the fixed boundary.
// marks is empty for unmarked configurations, else one mark in {1..q} per point.
struct Configuration {
  Window window;
  std::vector<Point> points;
  std::vector<int> marks;

  bool marked() const { return !marks.empty(); }
  bool is_boundary(std::size_t i) const { return !window.contains(points[i]); }
  std::size_t interior_count() const;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text format: header "# window x0 y0 x1 y1", then one "x y [mark]" per line.
Configuration read_configuration(std::istream& in);
// Points are written sorted by (x, y, mark).
void write_configuration(std::ostream& out, const Configuration& config);

Configuration load_configuration(const std::string& path);
void save_configuration(const std::string& path, const Configuration& config);

}  // namespace dwr
