#pragma once

#include <array>
#include <cmath>
#include <complex>

// Minimal complex 2x2 matrix algebra. Everything the spin kernels need is
// closed form in the Pauli basis, so no linear-algebra library is pulled in.

namespace spinsim {

using cplx = std::complex<double>;

struct Mat2 {
    // Row-major: [ m00 m01 ; m10 m11 ], basis order (|up>, |down>).
    cplx m00{0.0}, m01{0.0}, m10{0.0}, m11{0.0};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
                a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
    }

    Mat2 adjoint() const {
        return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
    }

    cplx trace() const { return m00 + m11; }

    cplx det() const { return m00 * m11 - m01 * m10; }
};

/// Max-norm of the elementwise difference.
inline double max_abs_diff(const Mat2& a, const Mat2& b) {
    double m = std::abs(a.m00 - b.m00);
    m = std::max(m, std::abs(a.m01 - b.m01));
    m = std::max(m, std::abs(a.m10 - b.m10));
    m = std::max(m, std::abs(a.m11 - b.m11));
    return m;
}

/// Deviation from unitarity: max-norm of (a† a - I).
inline double unitarity_defect(const Mat2& a) {
    return max_abs_diff(a.adjoint() * a, Mat2::identity());
}

/// exp(-i * (theta/2) * n·sigma) = cos(theta/2) I - i sin(theta/2) n·sigma.
/// `axis` need not be normalized; a zero axis with any angle gives identity.
inline Mat2 rotation(double theta, double nx, double ny, double nz) {
    const double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (norm == 0.0) {
        return Mat2::identity();
    }
    nx /= norm;
    ny /= norm;
    nz /= norm;
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const cplx i(0.0, 1.0);
    return {c - i * s * nz, -i * s * (nx - i * ny),
            -i * s * (nx + i * ny), c + i * s * nz};
}

/// Column vector in C^2, basis order (|up>, |down>).
struct Vec2 {
    cplx up{0.0}, down{0.0};

    static Vec2 spin_down() { return {0.0, 1.0}; }
    static Vec2 spin_up() { return {1.0, 0.0}; }

    friend Vec2 operator*(const Mat2& m, const Vec2& v) {
        return {m.m00 * v.up + m.m01 * v.down, m.m10 * v.up + m.m11 * v.down};
    }

    double prob_up() const { return std::norm(up); }
    double prob_down() const { return std::norm(down); }
};

}  // namespace spinsim
