#pragma once

#include <cmath>
#include <numbers>
#include <utility>

namespace slimegate {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return length(a - b); }
inline double distance_squared(Vec2 a, Vec2 b) { return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y); }

struct Segment {
    Vec2 a;
    Vec2 b;
    bool operator==(const Segment&) const = default;
};

/// Axis-aligned rectangle given by its centre and full extent.
struct Rect {
    Vec2 center;
    Vec2 size;

    double area() const { return size.x * size.y; }
    bool contains(Vec2 p) const {
        return std::abs(p.x - center.x) <= 0.5 * size.x && std::abs(p.y - center.y) <= 0.5 * size.y;
    }
    bool operator==(const Rect&) const = default;
};

/// Proper or touching intersection of two closed segments.
inline bool segments_intersect(const Segment& s, const Segment& t) {
    const Vec2 r = s.b - s.a;
    const Vec2 q = t.b - t.a;
    const double denom = cross(r, q);
    const Vec2 d = t.a - s.a;
    if (denom == 0.0) {
        // Parallel; collinear overlap counts as crossing.
        if (cross(d, r) != 0.0) return false;
        const double rr = dot(r, r);
        if (rr == 0.0) {
            // `s` is a point: test it against `t` instead.
            const double qq = dot(q, q);
            if (qq == 0.0) return s.a == t.a;
            if (cross(s.a - t.a, q) != 0.0) return false;
            const double w = dot(s.a - t.a, q) / qq;
            return w >= 0.0 && w <= 1.0;
        }
        double t0 = dot(d, r) / rr;
        double t1 = t0 + dot(q, r) / rr;
        if (t0 > t1) std::swap(t0, t1);
        return t1 >= 0.0 && t0 <= 1.0;
    }
    const double u = cross(d, q) / denom;
    const double v = cross(d, r) / denom;
    return u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0;
}

inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a = 0.0;
    return a;
}

}  // namespace slimegate
