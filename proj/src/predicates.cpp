#include <gmpxx.h>

#include <cmath>
#include <limits>

#include "dwr/geometry.hpp"

namespace dwr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kInCircleBound = (10.0 + 96.0 * kEps) * kEps;
constexpr double kDotBound = 8.0 * kEps;

int sign_of(const mpq_class& v) { return sgn(v); }

int orientation_exact(Point a, Point b, Point c) {
  mpq_class ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  mpq_class det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return sign_of(det);
}

int in_circle_exact(Point a, Point b, Point c, Point d) {
  mpq_class dx(d.x), dy(d.y);
  mpq_class adx = mpq_class(a.x) - dx, ady = mpq_class(a.y) - dy;
  mpq_class bdx = mpq_class(b.x) - dx, bdy = mpq_class(b.y) - dy;
  mpq_class cdx = mpq_class(c.x) - dx, cdy = mpq_class(c.y) - dy;
  mpq_class alift = adx * adx + ady * ady;
  mpq_class blift = bdx * bdx + bdy * bdy;
  mpq_class clift = cdx * cdx + cdy * cdy;
  mpq_class det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                  clift * (adx * bdy - bdx * ady);
  return sign_of(det);
}

int dot_exact(Point a, Point b, Point c) {
  mpq_class bx(b.x), by(b.y);
  mpq_class v = (mpq_class(a.x) - bx) * (mpq_class(c.x) - bx) +
                (mpq_class(a.y) - by) * (mpq_class(c.y) - by);
  return sign_of(v);
}

}  // namespace

int orientation(Point a, Point b, Point c) {
  double left = (b.x - a.x) * (c.y - a.y);
  double right = (b.y - a.y) * (c.x - a.x);
  double det = left - right;
  double bound = kOrientBound * (std::fabs(left) + std::fabs(right));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return orientation_exact(a, b, c);
}

int in_circle_raw(Point a, Point b, Point c, Point d) {
  double adx = a.x - d.x, ady = a.y - d.y;
  double bdx = b.x - d.x, bdy = b.y - d.y;
  double cdx = c.x - d.x, cdy = c.y - d.y;
  double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  double cdxady = cdx * ady, adxcdy = adx * cdy;
  double adxbdy = adx * bdy, bdxady = bdx * ady;
  double alift = adx * adx + ady * ady;
  double blift = bdx * bdx + bdy * bdy;
  double clift = cdx * cdx + cdy * cdy;
  double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                     (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                     (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
  double bound = kInCircleBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return in_circle_exact(a, b, c, d);
}

int in_circle(Point a, Point b, Point c, Point d) {
  if (orientation(a, b, c) == 0) throw GeometryError("in_circle: collinear triangle");
  return in_circle_raw(a, b, c, d);
}

int dot_sign(Point a, Point b, Point c) {
  double t1 = (a.x - b.x) * (c.x - b.x);
  double t2 = (a.y - b.y) * (c.y - b.y);
  double v = t1 + t2;
  double bound = kDotBound * (std::fabs(t1) + std::fabs(t2));
  if (v > bound) return 1;
  if (-v > bound) return -1;
  return dot_exact(a, b, c);
}

}  // namespace dwr
