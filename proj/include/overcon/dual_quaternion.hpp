#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "overcon/scalar.hpp"

namespace overcon {

template <class S>
using Vec3 = std::array<S, 3>;

template <class S>
S dot(const Vec3<S>& a, const Vec3<S>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class S>
Vec3<S> cross(const Vec3<S>& a, const Vec3<S>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <class S>
Vec3<S> operator+(const Vec3<S>& a, const Vec3<S>& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

template <class S>
Vec3<S> operator-(const Vec3<S>& a, const Vec3<S>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

template <class S>
Vec3<S> operator*(const S& s, const Vec3<S>& a) {
    return {s * a[0], s * a[1], s * a[2]};
}

inline double norm(const Vec3<double>& a) { return std::sqrt(dot(a, a)); }

/// Quaternion p0 + p1 i + p2 j + p3 k over a commutative coefficient field.
template <class S>
struct Quaternion {
    std::array<S, 4> c{};

    Quaternion() : c{S(0), S(0), S(0), S(0)} {}
    Quaternion(S p0, S p1, S p2, S p3) : c{std::move(p0), std::move(p1), std::move(p2), std::move(p3)} {}
    explicit Quaternion(S scalar) : c{std::move(scalar), S(0), S(0), S(0)} {}

    static Quaternion pure(const Vec3<S>& v) { return {S(0), v[0], v[1], v[2]}; }

    const S& operator[](std::size_t k) const { return c[k]; }
    S& operator[](std::size_t k) { return c[k]; }

    Vec3<S> vec() const { return {c[1], c[2], c[3]}; }

    Quaternion conj() const { return {c[0], -c[1], -c[2], -c[3]}; }

    // p * conj(p); a scalar of the coefficient field (complex-bilinear, no modulus).
    S norm() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]; }

    bool is_zero() const { return c[0] == S(0) && c[1] == S(0) && c[2] == S(0) && c[3] == S(0); }

    Quaternion operator-() const { return {-c[0], -c[1], -c[2], -c[3]}; }
    friend Quaternion operator+(const Quaternion& a, const Quaternion& b) {
        return {a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2], a.c[3] + b.c[3]};
    }
    friend Quaternion operator-(const Quaternion& a, const Quaternion& b) {
        return {a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2], a.c[3] - b.c[3]};
    }
    friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
        const auto& x = a.c;
        const auto& y = b.c;
        return {x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3],
                x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2],
                x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1],
                x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0]};
    }
    friend Quaternion operator*(const S& s, const Quaternion& a) {
        return {s * a.c[0], s * a.c[1], s * a.c[2], s * a.c[3]};
    }
    friend bool operator==(const Quaternion& a, const Quaternion& b) { return a.c == b.c; }
    friend bool operator!=(const Quaternion& a, const Quaternion& b) { return !(a == b); }
};

/// a + b eps with eps^2 = 0.
template <class S>
struct DualNumber {
    S a{};
    S b{};

    friend DualNumber operator*(const DualNumber& x, const DualNumber& y) {
        return {x.a * y.a, x.a * y.b + x.b * y.a};
    }
    friend DualNumber operator+(const DualNumber& x, const DualNumber& y) { return {x.a + y.a, x.b + y.b}; }
    friend bool operator==(const DualNumber& x, const DualNumber& y) { return x.a == y.a && x.b == y.b; }
};

/// h = p + eps d. Coordinates (p0:p1:p2:p3:d0:d1:d2:d3) in P^7.
template <class S>
struct DualQuaternion {
    Quaternion<S> primal;
    Quaternion<S> dual;

    DualQuaternion() = default;
    DualQuaternion(Quaternion<S> p, Quaternion<S> d) : primal(std::move(p)), dual(std::move(d)) {}
    explicit DualQuaternion(S scalar) : primal(std::move(scalar)), dual() {}

    static DualQuaternion one() { return DualQuaternion(S(1)); }

    static DualQuaternion from_coords(const std::array<S, 8>& x) {
        return {{x[0], x[1], x[2], x[3]}, {x[4], x[5], x[6], x[7]}};
    }

    // Pure rotation-type element (0:p1:p2:p3:0:q1:q2:q3).
    static DualQuaternion line(const Vec3<S>& p, const Vec3<S>& q) {
        return {Quaternion<S>::pure(p), Quaternion<S>::pure(q)};
    }

    std::array<S, 8> coords() const {
        return {primal[0], primal[1], primal[2], primal[3], dual[0], dual[1], dual[2], dual[3]};
    }

    const S& coord(std::size_t k) const { return k < 4 ? primal[k] : dual[k - 4]; }

    DualQuaternion conj() const { return {primal.conj(), dual.conj()}; }

    DualNumber<S> norm() const {
        // p conj(p) + eps (p conj(d) + d conj(p)) = |p|^2 + 2 eps (p . d)
        S pd = primal[0] * dual[0] + primal[1] * dual[1] + primal[2] * dual[2] + primal[3] * dual[3];
        return {primal.norm(), pd + pd};
    }

    bool is_zero() const { return primal.is_zero() && dual.is_zero(); }

    DualQuaternion operator-() const { return {-primal, -dual}; }
    friend DualQuaternion operator+(const DualQuaternion& a, const DualQuaternion& b) {
        return {a.primal + b.primal, a.dual + b.dual};
    }
    friend DualQuaternion operator-(const DualQuaternion& a, const DualQuaternion& b) {
        return {a.primal - b.primal, a.dual - b.dual};
    }
    friend DualQuaternion operator*(const DualQuaternion& a, const DualQuaternion& b) {
        return {a.primal * b.primal, a.primal * b.dual + a.dual * b.primal};
    }
    friend DualQuaternion operator*(const S& s, const DualQuaternion& a) { return {s * a.primal, s * a.dual}; }
    friend bool operator==(const DualQuaternion& a, const DualQuaternion& b) {
        return a.primal == b.primal && a.dual == b.dual;
    }
    friend bool operator!=(const DualQuaternion& a, const DualQuaternion& b) { return !(a == b); }
};

template <class T, class S>
Quaternion<T> quaternion_cast(const Quaternion<S>& q) {
    return {scalar_cast<T>(q[0]), scalar_cast<T>(q[1]), scalar_cast<T>(q[2]), scalar_cast<T>(q[3])};
}

template <class T, class S>
DualQuaternion<T> dq_cast(const DualQuaternion<S>& h) {
    return {quaternion_cast<T>(h.primal), quaternion_cast<T>(h.dual)};
}

inline DualQuaternion<double> eps_times(const Quaternion<double>& q) { return {Quaternion<double>(), q}; }

/// Euclidean 8-norm of the coordinate vector (moduli for complex fields).
template <class S>
double coord_norm(const DualQuaternion<S>& h) {
    double s = 0;
    for (const S& x : h.coords()) {
        double m = magnitude(x);
        s += m * m;
    }
    return std::sqrt(s);
}

template <class S>
double primal_norm(const DualQuaternion<S>& h) {
    double s = 0;
    for (const S& x : h.primal.c) {
        double m = magnitude(x);
        s += m * m;
    }
    return std::sqrt(s);
}

/// Study bilinear form B(a,b) = (p_a . d_b + d_a . p_b) / 2; B(h,h) = p . d.
template <class S>
S study_form(const DualQuaternion<S>& a, const DualQuaternion<S>& b) {
    S s(0);
    for (std::size_t k = 0; k < 4; ++k) s = s + a.primal[k] * b.dual[k] + a.dual[k] * b.primal[k];
    if constexpr (is_exact_v<S>) return s * S(Rational(1, 2));
    else return s * S(0.5);
}

/// Zero test relative to a reference scale: exact fields compare to zero.
template <class S>
bool is_negligible(const DualQuaternion<S>& h, double scale, double rel_tol) {
    if constexpr (is_exact_v<S>) {
        (void)scale;
        (void)rel_tol;
        return h.is_zero();
    } else {
        return coord_norm(h) <= rel_tol * scale;
    }
}

/// h is on the Study quadric: p0 d0 + p1 d1 + p2 d2 + p3 d3 = 0.
/// In floating mode the tolerance is relative to the squared 8-norm of h.
template <class S>
bool is_on_study_quadric(const DualQuaternion<S>& h, double tol = 1e-9) {
    S s = h.norm().b;
    if constexpr (is_exact_v<S>) {
        (void)tol;
        return s == S(0);
    } else {
        double scale = coord_norm(h);
        return magnitude(s) <= tol * scale * scale;
    }
}

/// Norm-zero test with the relative tolerance |N| < tol * |h|^2 in floating mode.
template <class S>
bool has_zero_norm(const DualQuaternion<S>& h, double tol = 1e-9) {
    DualNumber<S> n = h.norm();
    if constexpr (is_exact_v<S>) {
        (void)tol;
        return n.a == S(0) && n.b == S(0);
    } else {
        double scale = coord_norm(h);
        scale *= scale;
        return magnitude(n.a) <= tol * scale && magnitude(n.b) <= tol * scale;
    }
}

/// Multiple of eps: primal part vanishes.
template <class S>
bool is_eps_multiple(const DualQuaternion<S>& h, double scale, double rel_tol = 1e-9) {
    if constexpr (is_exact_v<S>) {
        (void)scale;
        (void)rel_tol;
        return h.primal.is_zero();
    } else {
        return primal_norm(h) <= rel_tol * scale;
    }
}

/// Inverse of an element with invertible primal part (N(p) != 0).
template <class S>
DualQuaternion<S> inverse(const DualQuaternion<S>& h) {
    DualNumber<S> n = h.norm();
    if (is_zero(n.a, 0.0)) throw std::domain_error("inverse: primal norm is zero");
    // 1/(a + b eps) = 1/a - b/a^2 eps
    S inv_a = S(1) / n.a;
    S dual_coeff = -(n.b * inv_a * inv_a);
    DualQuaternion<S> c = h.conj();
    return {inv_a * c.primal, inv_a * c.dual + dual_coeff * c.primal};
}

/// Projective equality in P^7: b = lambda a for some nonzero lambda. The ratio
/// is taken from a's largest-magnitude coordinate and cross-checked at b's.
template <class S>
bool projectively_equal(const DualQuaternion<S>& a, const DualQuaternion<S>& b, double tol = 1e-9) {
    auto ca = a.coords();
    auto cb = b.coords();
    auto argmax = [](const std::array<S, 8>& x) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < 8; ++k)
            if (magnitude(x[k]) > magnitude(x[best])) best = k;
        return best;
    };
    std::size_t ka = argmax(ca), kb = argmax(cb);
    if (is_zero(ca[ka], 0.0) || is_zero(cb[kb], 0.0)) return is_zero(ca[ka], 0.0) && is_zero(cb[kb], 0.0);
    // Cross-ratio test: a_i b_k - a_k b_i = 0 for the two pivot indices and all i.
    for (std::size_t k : {ka, kb}) {
        for (std::size_t i = 0; i < 8; ++i) {
            S cr = ca[i] * cb[k] - ca[k] * cb[i];
            if constexpr (is_exact_v<S>) {
                if (cr != S(0)) return false;
            } else {
                double scale = magnitude(ca[ka]) * magnitude(cb[kb]);
                if (magnitude(cr) > tol * scale) return false;
            }
        }
    }
    return true;
}

/// Applies the rigid motion of h (h not in E) to the point x:
/// x -> (p x conj(p) + d conj(p) - p conj(d)) / (p conj(p)). With this sign,
/// 1 + eps t/2 translates by t.
template <class S>
Vec3<S> act_on_point(const DualQuaternion<S>& h, const Vec3<S>& x) {
    const Quaternion<S>& p = h.primal;
    const Quaternion<S>& d = h.dual;
    S n = p.norm();
    if (is_zero(n, 0.0)) throw std::domain_error("act_on_point: element lies in the exceptional space");
    Quaternion<S> img = p * Quaternion<S>::pure(x) * p.conj() + d * p.conj() - p * d.conj();
    return {img[1] / n, img[2] / n, img[3] / n};
}

}  // namespace overcon
