#pragma once

#include <cmath>

namespace parres {

// Phase-space point (x, p).
struct Vec2 {
    double x = 0.0;
    double p = 0.0;
};

// Real 2x2 matrix, row major. The working type for one-period maps and
// their generators; symplectic structure is a property of how instances
// are built, not of the type.
struct Mat2 {
    double m11 = 1.0;
    double m12 = 0.0;
    double m21 = 0.0;
    double m22 = 1.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    double trace() const { return m11 + m22; }
    double det() const { return m11 * m22 - m12 * m21; }
    Mat2 transpose() const { return {m11, m21, m12, m22}; }
    Mat2 negated() const { return {-m11, -m12, -m21, -m22}; }
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

inline Vec2 operator*(const Mat2& a, const Vec2& z) {
    return {a.m11 * z.x + a.m12 * z.p, a.m21 * z.x + a.m22 * z.p};
}

inline Mat2 operator*(double s, const Mat2& a) {
    return {s * a.m11, s * a.m12, s * a.m21, s * a.m22};
}

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
}

inline Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
}

inline double max_abs(const Mat2& a) {
    return std::max(std::max(std::abs(a.m11), std::abs(a.m12)),
                    std::max(std::abs(a.m21), std::abs(a.m22)));
}

inline double max_abs_diff(const Mat2& a, const Mat2& b) {
    return max_abs(a - b);
}

// Deviation from M^T L M = L with L = [[0,1],[-1,0]]. For 2x2 matrices
// this equals |det M - 1| algebraically; computed from the full product
// so the test exercises the structure, not the shortcut.
inline double symplectic_defect(const Mat2& m) {
    const Mat2 lam{0.0, 1.0, -1.0, 0.0};
    return max_abs_diff(m.transpose() * (lam * m), lam);
}

// det of a traceless matrix, with the products compensated via fma so the
// cancellation between g11^2 and g12*g21 does not lose the small result.
inline double det_traceless_compensated(const Mat2& g) {
    const double p = g.m11 * g.m11;
    const double ep = std::fma(g.m11, g.m11, -p);
    const double q = g.m12 * g.m21;
    const double eq = std::fma(g.m12, g.m21, -q);
    return -((p + q) + (ep + eq));
}

// Closed-form exponential of a traceless 2x2 matrix: with s^2 = -det G,
// exp(G) = cos(s) I + sinc(s) G for det G > 0 (rotation-like) and the
// cosh/sinh analogue for det G < 0; exact shear for det G = 0.
inline Mat2 exp_traceless(const Mat2& g) {
    const double d = det_traceless_compensated(g);
    double c0 = 1.0;
    double c1 = 1.0;
    if (d > 0.0) {
        const double s = std::sqrt(d);
        c0 = std::cos(s);
        c1 = std::sin(s) / s;
    } else if (d < 0.0) {
        const double s = std::sqrt(-d);
        c0 = std::cosh(s);
        c1 = std::sinh(s) / s;
    }
    return {c0 + c1 * g.m11, c1 * g.m12, c1 * g.m21, c0 + c1 * g.m22};
}

}  // namespace parres
