#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "overcon/dual_quaternion.hpp"

namespace overcon {

enum class JointKind { R, P, H };

constexpr std::string_view to_string(JointKind k) {
    switch (k) {
        case JointKind::R: return "R";
        case JointKind::P: return "P";
        case JointKind::H: return "H";
    }
    return "?";
}

/// A fixed dual quaternion carried in floating form, and in exact rational
/// form when it was specified exactly.
struct FixedElement {
    DualQuaternion<double> approx = DualQuaternion<double>::one();
    std::optional<DualQuaternion<Rational>> exact = DualQuaternion<Rational>::one();

    static FixedElement from_exact(const DualQuaternion<Rational>& h) { return {dq_cast<double>(h), h}; }
    static FixedElement from_double(const DualQuaternion<double>& h) { return {h, std::nullopt}; }
    static FixedElement identity() { return {}; }

    bool has_exact() const { return exact.has_value(); }

    template <class S>
    DualQuaternion<S> as() const {
        if constexpr (is_exact_v<S>) {
            if (!exact) throw std::logic_error("element has no exact representation");
            return dq_cast<S>(*exact);
        } else {
            return dq_cast<S>(approx);
        }
    }
};

FixedElement operator*(const FixedElement& a, const FixedElement& b);

/// A joint of kind R, P or H. `axis` holds h (h^2 = -1, pure primal and dual)
/// for R/H, and eps*p for P so that the P motion is t - axis as for R.
struct Joint {
    JointKind kind = JointKind::R;
    FixedElement axis;
    Rational pitch = 0;  // H only

    static Joint revolute(const FixedElement& h) { return {JointKind::R, h, 0}; }
    static Joint prismatic(const Vec3<double>& p) {
        return {JointKind::P, FixedElement::from_double(eps_times(Quaternion<double>::pure(p))), 0};
    }
    static Joint prismatic(const Vec3<Rational>& p) {
        return {JointKind::P,
                FixedElement::from_exact({Quaternion<Rational>(), Quaternion<Rational>::pure(p)}), 0};
    }
    static Joint helical(const FixedElement& h, Rational g) { return {JointKind::H, h, std::move(g)}; }

    /// Direction of a P joint.
    Vec3<double> direction() const { return axis.approx.dual.vec(); }
};

/// Checks the per-kind joint invariants (h^2 = -1 with vanishing scalar parts
/// for R/H; nonzero pure direction for P). Exact check when the joint is exact,
/// otherwise relative tolerance `tol`. Throws std::invalid_argument.
void validate_joint(const Joint& j, double tol = 1e-9);

/// A closed loop: m_0(t_0) L_0 m_1(t_1) L_1 ... m_{n-1}(t_{n-1}) L_{n-1}.
/// links[k] sits between joint k and joint k+1 (cyclically). A linkage with all
/// joints frozen keeps a single link holding the total transform.
struct Linkage {
    std::string name;
    std::vector<Joint> joints;
    std::vector<FixedElement> links;

    Linkage() = default;
    explicit Linkage(std::vector<Joint> js, std::string nm = {});
    Linkage(std::vector<Joint> js, std::vector<FixedElement> ls, std::string nm = {});

    std::size_t size() const { return joints.size(); }
    bool has_exact() const;
    bool identity_links() const;
    std::size_t count(JointKind k) const;
};

/// Validates joints and the non-degeneracy invariant (no neighbouring R/H joints
/// with equal axes, no neighbouring P joints with equal directions).
void validate_linkage(const Linkage& L, double tol = 1e-9);

/// Joint parameter: t in an affine chart of P^1 with an explicit point at
/// infinity (R, P), or the rotation angle (H).
template <class S>
struct Param {
    S value{};
    bool infinite = false;

    Param() = default;
    Param(S v) : value(std::move(v)) {}  // NOLINT(google-explicit-constructor)
    static Param at_infinity() {
        Param p;
        p.infinite = true;
        return p;
    }
};

template <class S>
using BasicConfiguration = std::vector<Param<S>>;

using Configuration = BasicConfiguration<double>;
using ComplexConfiguration = BasicConfiguration<Cplx>;
using ExactConfiguration = BasicConfiguration<Rational>;
using ExactComplexConfiguration = BasicConfiguration<GaussRational>;

template <class T, class S>
BasicConfiguration<T> config_cast(const BasicConfiguration<S>& c) {
    BasicConfiguration<T> out;
    out.reserve(c.size());
    for (const auto& p : c) {
        Param<T> q(scalar_cast<T>(p.value));
        q.infinite = p.infinite;
        out.push_back(q);
    }
    return out;
}

Configuration to_configuration(const std::vector<double>& t);

/// Motion of one joint at parameter t:
///   R: t - h (identity class at infinity),  P: t - eps p (t != 0),
///   H: (1 - eps g a p)(cos(a/2) - sin(a/2) h), the cot(a/2) form scaled by
///      sin(a/2) so that a = 0 mod 2 pi stays finite.
template <class S>
DualQuaternion<S> joint_motion(const Joint& j, const Param<S>& t) {
    if (t.infinite) {
        if (j.kind == JointKind::H) throw std::domain_error("H joint parameter is an angle; infinity not allowed");
        return DualQuaternion<S>::one();
    }
    switch (j.kind) {
        case JointKind::R:
            return DualQuaternion<S>(t.value) - j.axis.as<S>();
        case JointKind::P:
            if (is_zero(t.value, 0.0)) throw std::domain_error("P joint parameter 0 is outside the domain");
            return DualQuaternion<S>(t.value) - j.axis.as<S>();
        case JointKind::H: {
            if constexpr (is_exact_v<S>) {
                throw std::domain_error("H joints need a floating coefficient field");
            } else {
                using std::cos;
                using std::sin;
                const DualQuaternion<S> h = j.axis.as<S>();
                const S g = S(j.pitch.template convert_to<double>());
                const S half = t.value * S(0.5);
                DualQuaternion<S> screw = DualQuaternion<S>::one() -
                                          DualQuaternion<S>(Quaternion<S>(), (g * t.value) * h.primal);
                return screw * (DualQuaternion<S>(cos(half)) - sin(half) * h);
            }
        }
    }
    throw std::logic_error("unknown joint kind");
}

/// Derivative of joint_motion with respect to its parameter (finite parameters).
DualQuaternion<double> joint_motion_derivative(const Joint& j, double t);

/// m_0(t_0) L_0 m_1(t_1) L_1 ... in cyclic order.
template <class S>
DualQuaternion<S> loop_product(const Linkage& L, const BasicConfiguration<S>& c) {
    if (c.size() != L.size()) throw std::invalid_argument("configuration length does not match joint count");
    DualQuaternion<S> prod = DualQuaternion<S>::one();
    for (std::size_t k = 0; k < L.size(); ++k) {
        prod = prod * joint_motion(L.joints[k], c[k]);
        if (!L.links.empty() && !(L.links[k].has_exact() && *L.links[k].exact == DualQuaternion<Rational>::one()))
            prod = prod * L.links[k].template as<S>();
    }
    if (L.size() == 0 && !L.links.empty()) prod = prod * L.links[0].template as<S>();
    return prod;
}

/// Closed iff the product is a nonzero real scalar.
template <class S>
bool is_closed(const Linkage& L, const BasicConfiguration<S>& c, double tol = 1e-10) {
    DualQuaternion<S> p = loop_product(L, c);
    if constexpr (is_exact_v<S>) {
        (void)tol;
        for (std::size_t k = 1; k < 8; ++k)
            if (p.coord(k) != S(0)) return false;
        return p.coord(0) != S(0);
    } else {
        double n = coord_norm(p);
        if (n == 0) return false;
        for (std::size_t k = 1; k < 8; ++k)
            if (magnitude(p.coord(k)) > tol * n) return false;
        return true;
    }
}

struct ClosureResidual {
    std::array<double, 7> values{};  // (p1,p2,p3,d0,d1,d2,d3) / |product|
    bool zero_product = false;       // bond-like outcome; values meaningless

    double norm() const;
};

ClosureResidual closure_residual(const Linkage& L, const Configuration& c);

/// Removes joint k, folding m_k(t) into the neighbouring links:
/// new link = L_{k-1} m_k(t) L_k. For k = 0 the folded link becomes the last
/// link, so products agree with the original up to a cyclic conjugation.
template <class S>
Linkage freeze_joint(const Linkage& L, std::size_t k, const Param<S>& t);

extern template Linkage freeze_joint<double>(const Linkage&, std::size_t, const Param<double>&);
extern template Linkage freeze_joint<Rational>(const Linkage&, std::size_t, const Param<Rational>&);

enum class DerivedKind { Spherical, ReplaceHByR, ReplaceHByP };

/// Spherical projection (dual parts dropped; P joints become scalar motions),
/// or every H joint replaced by an R joint on the same axis / a P joint along it.
Linkage derived_linkage(const Linkage& L, DerivedKind which);

/// Joint axes expressed in the common home frame: e_k = T_k h_k T_k^{-1}
/// with T_k = L_0 ... L_{k-1}, plus the total link T = L_0 ... L_{n-1}.
struct HomeAxes {
    std::vector<FixedElement> axes;
    FixedElement total;
};

HomeAxes home_axes(const Linkage& L);

/// g x g^{-1} for g not in E.
FixedElement conjugate_by(const FixedElement& g, const FixedElement& x);

/// Draws a parameter uniformly from [-2, 2] avoiding +-0.05 neighbourhoods of
/// the given values (and of 0 for P joints).
template <class Rng>
double draw_generic_parameter(Rng& rng, const std::vector<double>& avoid) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (;;) {
        double t = dist(rng);
        bool ok = true;
        for (double a : avoid)
            if (std::abs(t - a) < 0.05) ok = false;
        if (ok) return t;
    }
}

}  // namespace overcon
