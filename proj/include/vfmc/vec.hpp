#pragma once

#include <cmath>
#include <ostream>

namespace vfmc {

/// Plain 3-vector with value semantics. All fields public by design;
/// this is the coordinate type used throughout the library.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3& operator*=(double s) {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

    friend constexpr bool operator==(const Vec3& a, const Vec3& b) {
        return a.x == b.x && a.y == b.y && a.z == b.z;
    }
};

constexpr double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

constexpr double norm2(const Vec3& a) { return dot(a, a); }

inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    return a / n;
}

/// 3x3 rotation (or general linear) matrix, row-major.
struct Mat3 {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    friend Vec3 operator*(const Mat3& R, const Vec3& v) {
        return {R.m[0][0] * v.x + R.m[0][1] * v.y + R.m[0][2] * v.z,
                R.m[1][0] * v.x + R.m[1][1] * v.y + R.m[1][2] * v.z,
                R.m[2][0] * v.x + R.m[2][1] * v.y + R.m[2][2] * v.z};
    }
};

/// Rotation by angle `theta` about the (unit) axis `u`, Rodrigues form.
inline Mat3 rotation_about(const Vec3& u, double theta) {
    const double c = std::cos(theta), s = std::sin(theta), t = 1.0 - c;
    Mat3 R;
    R.m[0][0] = c + u.x * u.x * t;
    R.m[0][1] = u.x * u.y * t - u.z * s;
    R.m[0][2] = u.x * u.z * t + u.y * s;
    R.m[1][0] = u.y * u.x * t + u.z * s;
    R.m[1][1] = c + u.y * u.y * t;
    R.m[1][2] = u.y * u.z * t - u.x * s;
    R.m[2][0] = u.z * u.x * t - u.y * s;
    R.m[2][1] = u.z * u.y * t + u.x * s;
    R.m[2][2] = c + u.z * u.z * t;
    return R;
}

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

}  // namespace vfmc
