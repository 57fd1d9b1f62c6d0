// Small fixed-size tensor algebra for three dimensions.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace crflow {

inline constexpr int kDim = 3;

/// Storage slot of the (i,j) entry of a symmetric 3x3 matrix: xx xy xz yy yz zz.
inline constexpr int kSymSlot[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

struct Vec3 {
    std::array<double, 3> c{};

    double operator[](int i) const { return c[i]; }
    double& operator[](int i) { return c[i]; }

    Vec3& operator+=(const Vec3& o) { for (int i = 0; i < 3; ++i) c[i] += o.c[i]; return *this; }
    Vec3& operator-=(const Vec3& o) { for (int i = 0; i < 3; ++i) c[i] -= o.c[i]; return *this; }
    Vec3& operator*=(double s) { for (auto& x : c) x *= s; return *this; }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }

struct Sym3 {
    std::array<double, 6> c{};

    static Sym3 identity() { return Sym3{{1, 0, 0, 1, 0, 1}}; }
    static Sym3 diagonal(double a, double b, double cc) { return Sym3{{a, 0, 0, b, 0, cc}}; }

    double operator()(int i, int j) const { return c[kSymSlot[i][j]]; }
    double& operator()(int i, int j) { return c[kSymSlot[i][j]]; }

    Sym3& operator+=(const Sym3& o) { for (int i = 0; i < 6; ++i) c[i] += o.c[i]; return *this; }
    Sym3& operator-=(const Sym3& o) { for (int i = 0; i < 6; ++i) c[i] -= o.c[i]; return *this; }
    Sym3& operator*=(double s) { for (auto& x : c) x *= s; return *this; }
};

inline Sym3 operator+(Sym3 a, const Sym3& b) { return a += b; }
inline Sym3 operator-(Sym3 a, const Sym3& b) { return a -= b; }
inline Sym3 operator*(double s, Sym3 a) { return a *= s; }

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Christoffel symbols at a point: gamma[k](i,j) = Gamma^k_ij.
using Christoffel = std::array<Sym3, 3>;

inline Christoffel& operator+=(Christoffel& a, const Christoffel& b) {
    for (int k = 0; k < 3; ++k) a[k] += b[k];
    return a;
}
inline Christoffel& operator-=(Christoffel& a, const Christoffel& b) {
    for (int k = 0; k < 3; ++k) a[k] -= b[k];
    return a;
}
inline Christoffel& operator*=(Christoffel& a, double s) {
    for (auto& x : a) x *= s;
    return a;
}
inline Christoffel operator+(Christoffel a, const Christoffel& b) { return a += b; }
inline Christoffel operator-(Christoffel a, const Christoffel& b) { return a -= b; }
inline Christoffel operator*(double s, Christoffel a) { return a *= s; }

/// Rank-four block, row-major over (i,j,k,l).
using Block81 = std::array<double, 81>;

constexpr std::size_t idx4(int i, int j, int k, int l) {
    return static_cast<std::size_t>(((i * 3 + j) * 3 + k) * 3 + l);
}

inline double det(const Sym3& g) {
    return g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(1, 2))
         - g(0, 1) * (g(0, 1) * g(2, 2) - g(1, 2) * g(0, 2))
         + g(0, 2) * (g(0, 1) * g(1, 2) - g(1, 1) * g(0, 2));
}

/// Cholesky pivots are all positive.
inline bool is_positive_definite(const Sym3& g) {
    const double l00 = g(0, 0);
    if (!(l00 > 0.0)) return false;
    const double l10 = g(1, 0) / std::sqrt(l00);
    const double l20 = g(2, 0) / std::sqrt(l00);
    const double d1 = g(1, 1) - l10 * l10;
    if (!(d1 > 0.0)) return false;
    const double l21 = (g(2, 1) - l20 * l10) / std::sqrt(d1);
    const double d2 = g(2, 2) - l20 * l20 - l21 * l21;
    return d2 > 0.0;
}

/// Inverse by cofactors; caller has checked positive definiteness.
inline Sym3 inverse(const Sym3& g) {
    const double d = det(g);
    Sym3 r;
    r(0, 0) = (g(1, 1) * g(2, 2) - g(1, 2) * g(1, 2)) / d;
    r(0, 1) = (g(0, 2) * g(1, 2) - g(0, 1) * g(2, 2)) / d;
    r(0, 2) = (g(0, 1) * g(1, 2) - g(0, 2) * g(1, 1)) / d;
    r(1, 1) = (g(0, 0) * g(2, 2) - g(0, 2) * g(0, 2)) / d;
    r(1, 2) = (g(0, 1) * g(0, 2) - g(0, 0) * g(1, 2)) / d;
    r(2, 2) = (g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1)) / d;
    return r;
}

inline Mat3 product(const Sym3& a, const Sym3& b) {
    Mat3 m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m[i][j] = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
    return m;
}

/// tr_g h = g^ij h_ij.
inline double trace(const Sym3& ginv, const Sym3& h) {
    return ginv(0, 0) * h(0, 0) + ginv(1, 1) * h(1, 1) + ginv(2, 2) * h(2, 2)
         + 2.0 * (ginv(0, 1) * h(0, 1) + ginv(0, 2) * h(0, 2) + ginv(1, 2) * h(1, 2));
}

/// Full contraction g^ik g^jl a_ij b_kl.
inline double contract(const Sym3& ginv, const Sym3& a, const Sym3& b) {
    const Mat3 p = product(ginv, a);
    const Mat3 q = product(ginv, b);
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += p[i][j] * q[j][i];
    return s;
}

inline Vec3 raise(const Sym3& ginv, const Vec3& w) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = ginv(i, 0) * w[0] + ginv(i, 1) * w[1] + ginv(i, 2) * w[2];
    return r;
}

inline Vec3 lower(const Sym3& g, const Vec3& v) { return raise(g, v); }

/// Eigenvalues in ascending order (trigonometric closed form).
inline std::array<double, 3> eigenvalues(const Sym3& a) {
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
    if (p1 == 0.0) {
        std::array<double, 3> e{a(0, 0), a(1, 1), a(2, 2)};
        if (e[0] > e[1]) std::swap(e[0], e[1]);
        if (e[1] > e[2]) std::swap(e[1], e[2]);
        if (e[0] > e[1]) std::swap(e[0], e[1]);
        return e;
    }
    const double d0 = a(0, 0) - q, d1 = a(1, 1) - q, d2 = a(2, 2) - q;
    const double p = std::sqrt((d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1) / 6.0);
    Sym3 b = a;
    for (int i = 0; i < 3; ++i) b(i, i) -= q;
    b *= 1.0 / p;
    double r = det(b) / 2.0;
    r = r < -1.0 ? -1.0 : (r > 1.0 ? 1.0 : r);
    const double phi = std::acos(r) / 3.0;
    const double hi = q + 2.0 * p * std::cos(phi);
    const double lo = q + 2.0 * p * std::cos(phi + 2.0 * 3.14159265358979323846 / 3.0);
    return {lo, 3.0 * q - hi - lo, hi};
}

}  // namespace crflow
