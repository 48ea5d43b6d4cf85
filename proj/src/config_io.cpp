#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "dwr/configuration.hpp"

namespace dwr {

std::size_t Configuration::interior_count() const {
  std::size_t n = 0;
  for (Point p : points) n += window.contains(p) ? 1 : 0;
  return n;
}

Configuration read_configuration(std::istream& in) {
  Configuration c;
  bool have_window = false;
  bool any_mark = false, any_unmarked = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::istringstream ss(line.substr(first));
    if (line[first] == '#') {
      std::string hash, key;
      ss >> hash >> key;
      if (key == "window") {
        double x0, y0, x1, y1;
        if (!(ss >> x0 >> y0 >> x1 >> y1)) throw FormatError(fmt::format("line {}: bad window header", lineno));
        c.window = Window::box(x0, y0, x1, y1);
        have_window = true;
      }
      continue;
    }
    double x, y;
    if (!(ss >> x >> y)) throw FormatError(fmt::format("line {}: expected 'x y [mark]'", lineno));
    c.points.push_back({x, y});
    int m;
    if (ss >> m) {
      if (m < 1) throw FormatError(fmt::format("line {}: marks start at 1", lineno));
      c.marks.push_back(m);
      any_mark = true;
    } else {
      any_unmarked = true;
    }
  }
  if (!have_window) throw FormatError("missing '# window' header");
  if (any_mark && any_unmarked) throw FormatError("either all points or none carry a mark");
  return c;
}

void write_configuration(std::ostream& out, const Configuration& c) {
  if (!c.window.is_box()) throw FormatError("only axis-aligned windows can be exported");
  Point lo = c.window.origin;
  Point hi = c.window.origin + c.window.u + c.window.v;
  out << fmt::format("# window {:.17g} {:.17g} {:.17g} {:.17g}\n", lo.x, lo.y, hi.x, hi.y);
  std::vector<std::size_t> order(c.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Point& p = c.points[a];
    const Point& q = c.points[b];
    if (p.x != q.x) return p.x < q.x;
    if (p.y != q.y) return p.y < q.y;
    return c.marked() && c.marks[a] < c.marks[b];
  });
  for (std::size_t i : order) {
    if (c.marked())
      out << fmt::format("{:.17g} {:.17g} {}\n", c.points[i].x, c.points[i].y, c.marks[i]);
    else
      out << fmt::format("{:.17g} {:.17g}\n", c.points[i].x, c.points[i].y);
  }
}

Configuration load_configuration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_configuration(in);
}

void save_configuration(const std::string& path, const Configuration& c) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  write_configuration(out, c);
}

}  // namespace dwr
