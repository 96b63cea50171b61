#pragma once

#include <cmath>
#include <complex>

namespace geodist {

// Row-major 2x2 matrix over any real scalar type. The multiprecision
// instantiation is used only by verification walks; production code uses
// Mat2 = TMat2<double>.
template <class R>
struct TMat2 {
    R m00{}, m01{}, m10{}, m11{};

    static TMat2 identity() { return {R(1), R(0), R(0), R(1)}; }

    R det() const { return m00 * m11 - m01 * m10; }
    R trace() const { return m00 + m11; }

    TMat2 operator*(const TMat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
    TMat2 operator+(const TMat2& o) const {
        return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11};
    }
    TMat2 operator-(const TMat2& o) const {
        return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11};
    }
    TMat2 operator-() const { return {-m00, -m01, -m10, -m11}; }

    // Inverse for det = 1 (adjugate).
    TMat2 inv_unimodular() const { return {m11, -m01, -m10, m00}; }

    R frobenius_sq() const { return m00 * m00 + m01 * m01 + m10 * m10 + m11 * m11; }

    R dist_to_identity_sq() const {
        const R a = m00 - R(1), d = m11 - R(1);
        return a * a + m01 * m01 + m10 * m10 + d * d;
    }

    // Right-multiplication by a_t = diag(e^{t/2}, e^{-t/2}) scales columns.
    void flow_right(const R& t) {
        using std::exp;
        const R s = exp(t / R(2));
        m00 *= s; m10 *= s;
        m01 /= s; m11 /= s;
    }

    void rescale_det() {
        using std::sqrt;
        const R d = det();
        const R s = sqrt(d);
        m00 /= s; m01 /= s; m10 /= s; m11 /= s;
    }

    // g . i in the upper half plane (det > 0 assumed).
    std::complex<R> act_on_i() const {
        const R den = m10 * m10 + m11 * m11;
        return {(m01 * m11 + m00 * m10) / den, det() / den};
    }

    // Moebius action on a real boundary point; caller handles the pole.
    R act_on_real(const R& x) const { return (m00 * x + m01) / (m10 * x + m11); }
};

using Mat2 = TMat2<double>;

inline Mat2 translation_matrix(double k) { return {1.0, k, 0.0, 1.0}; }
inline Mat2 inversion_matrix() { return {0.0, -1.0, 1.0, 0.0}; }
inline Mat2 upper_unipotent(double s) { return {1.0, s, 0.0, 1.0}; }
inline Mat2 lower_unipotent(double s) { return {1.0, 0.0, s, 1.0}; }
inline Mat2 diag_flow(double t) { return {std::exp(t / 2), 0.0, 0.0, std::exp(-t / 2)}; }

} // namespace geodist
