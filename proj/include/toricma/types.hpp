#pragma once

#include <cmath>

namespace toricma {

/// Point or vector in the plane.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

using Point = Vec2;

constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// Rotation by +90 degrees.
constexpr Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }
/// Rotation by -90 degrees.
constexpr Vec2 rot_minus90(Vec2 a) { return {a.y, -a.x}; }

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    constexpr Sym2 operator+(const Sym2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
    constexpr Sym2 operator-(const Sym2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
    constexpr Sym2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
    constexpr Sym2& operator+=(const Sym2& o) { xx += o.xx; xy += o.xy; yy += o.yy; return *this; }

    constexpr double det() const { return xx * yy - xy * xy; }
    constexpr double trace() const { return xx + yy; }
    constexpr Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    constexpr double quad(Vec2 v) const { return dot(v, apply(v)); }

    double min_eigenvalue() const {
        return 0.5 * (xx + yy - std::hypot(xx - yy, 2.0 * xy));
    }
    double max_eigenvalue() const {
        return 0.5 * (xx + yy + std::hypot(xx - yy, 2.0 * xy));
    }
    bool positive_definite() const { return xx > 0.0 && det() > 0.0; }

    /// Outer product v v^T.
    static constexpr Sym2 outer(Vec2 v) { return {v.x * v.x, v.x * v.y, v.y * v.y}; }
};

/// Components of H in the frame (e1, e2): entries e_a^T H e_b.
constexpr Sym2 in_frame(const Sym2& h, Vec2 e1, Vec2 e2) {
    return {h.quad(e1), dot(e1, h.apply(e2)), h.quad(e2)};
}

}  // namespace toricma
