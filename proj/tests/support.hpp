#pragma once

#include <cmath>
#include <random>

#include "overcon/dual_quaternion.hpp"
#include "overcon/linkage.hpp"

namespace testsupport {

using namespace overcon;

inline Rational random_rational(std::mt19937_64& rng, long span = 9, long max_den = 7) {
    std::uniform_int_distribution<long> num(-span, span), den(1, max_den);
    return Rational(num(rng), den(rng));
}

inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Quaternion<Cplx> random_cquat(std::mt19937_64& rng) {
    auto z = [&] { return Cplx(uniform(rng), uniform(rng)); };
    return {z(), z(), z(), z()};
}

inline DualQuaternion<Rational> random_exact_dq(std::mt19937_64& rng) {
    std::array<Rational, 8> c;
    for (auto& x : c) x = random_rational(rng);
    return DualQuaternion<Rational>::from_coords(c);
}

inline DualQuaternion<double> random_dq(std::mt19937_64& rng) {
    std::array<double, 8> c;
    for (auto& x : c) x = uniform(rng);
    return DualQuaternion<double>::from_coords(c);
}

inline Vec3<double> random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec3<double> v{g(rng), g(rng), g(rng)};
    double n = norm(v);
    return {v[0] / n, v[1] / n, v[2] / n};
}

inline Vec3<double> random_point(std::mt19937_64& rng, double r = 2.0) {
    return {uniform(rng, -r, r), uniform(rng, -r, r), uniform(rng, -r, r)};
}

/// Rotation quaternion of the line through c with unit direction D.
inline DualQuaternion<double> axis_through(const Vec3<double>& c, const Vec3<double>& D) {
    return DualQuaternion<double>::line(D, cross(c, D));
}

inline DualQuaternion<double> random_axis(std::mt19937_64& rng) {
    return axis_through(random_point(rng), random_unit(rng));
}

inline Vec3<double> sub(const Vec3<double>& a, const Vec3<double>& b) { return a - b; }

inline double dist(const Vec3<double>& a, const Vec3<double>& b) { return norm(a - b); }

/// Random proper rigid motion p + eps d with d = t p / 2.
inline DualQuaternion<double> random_motion(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Quaternion<double> p{g(rng), g(rng), g(rng), g(rng)};
    Vec3<double> t = random_point(rng);
    return {p, 0.5 * (Quaternion<double>::pure(t) * p)};
}

inline Linkage random_nr(std::mt19937_64& rng, std::size_t n) {
    std::vector<Joint> js;
    for (std::size_t k = 0; k < n; ++k) js.push_back(Joint::revolute(FixedElement::from_double(random_axis(rng))));
    return Linkage(std::move(js), "random-" + std::to_string(n) + "r");
}

inline DualQuaternion<double> transformed(const DualQuaternion<double>& g, const DualQuaternion<double>& h) {
    return g * h * inverse(g);
}

/// Three axes with middle axis x, feet coinciding at the origin and
/// b12 = sign * b23, moved by a random rigid motion.
inline std::array<DualQuaternion<double>, 3> bennett_triple(std::mt19937_64& rng, int sign) {
    const double a1 = uniform(rng, 0.2, 2.9) * (uniform(rng) < 0 ? -1 : 1);
    const double a2 = uniform(rng, 0.2, 2.9) * (uniform(rng) < 0 ? -1 : 1);
    const double d1 = uniform(rng, -2, 2);
    const double d2 = sign * d1 * std::sin(a2) / std::sin(a1);
    auto l1 = axis_through({0, 0, -d1}, {std::cos(a1), -std::sin(a1), 0});
    auto l2 = axis_through({0, 0, 0}, {1, 0, 0});
    auto l3 = axis_through({0, 0, -d2}, {std::cos(a2), -std::sin(a2), 0});
    auto g = random_motion(rng);
    return {transformed(g, l1), transformed(g, l2), transformed(g, l3)};
}

}  // namespace testsupport
