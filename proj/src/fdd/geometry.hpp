// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>

namespace fdd {

/// Raised for violated preconditions and invalid inputs throughout the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend auto operator<=>(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

/// Closed axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(Point p, double tol = 1e-12) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
};

/// Straight segment with arc-length origin at the lexicographically smaller endpoint.
class Segment {
public:
  Segment(Point a, Point b) : a_(a < b ? a : b), b_(a < b ? b : a) {
    if (norm(b_ - a_) <= 0.0)
      throw Error("degenerate segment");
  }

  Point origin() const { return a_; }
  Point end() const { return b_; }
  double length() const { return norm(b_ - a_); }
  Point tangent() const { return (1.0 / length()) * (b_ - a_); }
  Point at(double s) const { return a_ + s * tangent(); }

  double arc_length(Point p) const { return dot(p - a_, tangent()); }
  double distance(Point p) const {
    const Point t = tangent();
    const Point d = p - a_;
    return std::abs(d.x * t.y - d.y * t.x);
  }
  bool contains(Point p, double tol = 1e-12) const {
    const double s = arc_length(p);
    return distance(p) <= tol && s >= -tol && s <= length() + tol;
  }

private:
  Point a_;
  Point b_;
};

} // namespace fdd
