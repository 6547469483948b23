#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace poromfe {

using Vector = std::vector<double>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double& operator[](int i) { return i == 0 ? x : y; }
    double operator[](int i) const { return i == 0 ? x : y; }

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

using Point = Vec2;

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

/// Row-major 2x2 matrix. For a displacement gradient, (i, j) holds d u_i / d x_j.
struct Mat2 {
    std::array<double, 4> m{0.0, 0.0, 0.0, 0.0};

    double& operator()(int i, int j) { return m[2 * i + j]; }
    double operator()(int i, int j) const { return m[2 * i + j]; }

    static Mat2 identity() { return Mat2{{1.0, 0.0, 0.0, 1.0}}; }

    friend Mat2 operator+(const Mat2& a, const Mat2& b) {
        return Mat2{{a.m[0] + b.m[0], a.m[1] + b.m[1], a.m[2] + b.m[2], a.m[3] + b.m[3]}};
    }
    friend Mat2 operator-(const Mat2& a, const Mat2& b) {
        return Mat2{{a.m[0] - b.m[0], a.m[1] - b.m[1], a.m[2] - b.m[2], a.m[3] - b.m[3]}};
    }
    friend Mat2 operator*(double s, const Mat2& a) {
        return Mat2{{s * a.m[0], s * a.m[1], s * a.m[2], s * a.m[3]}};
    }
};

inline Mat2 transpose(const Mat2& a) { return Mat2{{a.m[0], a.m[2], a.m[1], a.m[3]}}; }

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
    Mat2 c;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return c;
}

inline Vec2 matvec(const Mat2& a, Vec2 v) {
    return {a(0, 0) * v.x + a(0, 1) * v.y, a(1, 0) * v.x + a(1, 1) * v.y};
}

/// Full contraction A:B = sum_ij A_ij B_ij.
inline double contract(const Mat2& a, const Mat2& b) {
    return a.m[0] * b.m[0] + a.m[1] * b.m[1] + a.m[2] * b.m[2] + a.m[3] * b.m[3];
}

inline double trace(const Mat2& a) { return a.m[0] + a.m[3]; }
inline double det(const Mat2& a) { return a.m[0] * a.m[3] - a.m[1] * a.m[2]; }
inline Mat2 sym(const Mat2& a) { return 0.5 * (a + transpose(a)); }

using ScalarField = std::function<double(Point, double)>;
using VectorField = std::function<Vec2(Point, double)>;

}  // namespace poromfe
