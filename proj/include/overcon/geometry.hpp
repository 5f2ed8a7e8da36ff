#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "overcon/linkage.hpp"

namespace overcon {

/// Oriented line as a Pluecker pair: unit direction D, moment M = point x D.
template <class S>
struct Line {
    Vec3<S> direction;
    Vec3<S> moment;

    Line operator-() const {
        return {{-direction[0], -direction[1], -direction[2]}, {-moment[0], -moment[1], -moment[2]}};
    }
    /// Point of the line closest to the origin, D x M.
    Vec3<S> closest_point() const { return cross(direction, moment); }
};

using OrientedLine = Line<double>;

/// Line of a rotation quaternion (0:p:0:q). Floating inputs are normalized by
/// |p|; exact inputs must already have |p| = 1. Throws std::invalid_argument
/// for other shapes.
template <class S>
Line<S> axis_of(const DualQuaternion<S>& h, double tol = 1e-9);

extern template Line<double> axis_of(const DualQuaternion<double>&, double);
extern template Line<Rational> axis_of(const DualQuaternion<Rational>&, double);

DualQuaternion<double> line_quaternion(const OrientedLine& l);

/// Reciprocal product D1 . M2 + D2 . M1; zero iff the lines are coplanar.
template <class S>
S reciprocal_product(const Line<S>& a, const Line<S>& b) {
    return dot(a.direction, b.moment) + dot(b.direction, a.moment);
}

/// Parameter along a (from a.closest_point(), in units of a.direction) of the
/// foot of the common normal with b. Lines must not be parallel.
template <class S>
S foot_parameter(const Line<S>& a, const Line<S>& b) {
    const S c = dot(a.direction, b.direction);
    const Vec3<S> w = b.closest_point() - a.closest_point();
    return (dot(w, a.direction) - c * dot(w, b.direction)) / (S(1) - c * c);
}

template <class S>
bool directions_parallel(const Line<S>& a, const Line<S>& b, double tol) {
    const Vec3<S> x = cross(a.direction, b.direction);
    return is_zero(x[0], tol) && is_zero(x[1], tol) && is_zero(x[2], tol);
}

/// Twist angle alpha in [0, pi], its cosine c, the signed twist distance d
/// (along the common normal oriented by D1 x D2), the Bennett ratio
/// b = d / sin(alpha) and the offset o (filled by tables).
struct DHParams {
    double alpha = 0;
    double c = 1;
    double d = 0;
    double b = 0;
    double o = 0;
    bool parallel = false;   // b undefined
    bool o_defined = true;   // offset needs both neighbouring pairs non-parallel
};

DHParams dh_between(const OrientedLine& l1, const OrientedLine& l2, double tol = 1e-9);

/// The rational part of a DH record: c, b and o are rational functions of the
/// Pluecker coordinates.
template <class S>
struct DhCore {
    S c{};
    S b{};
    S o{};
    bool parallel = false;
    bool o_defined = true;
};

/// Lines of joint k's previous neighbour, itself and its next neighbour, all in
/// joint k's frame (links conjugated in). Empty for P joints.
template <class S>
struct JointFrame {
    std::optional<Line<S>> prev, self, next;
};

template <class S>
std::vector<JointFrame<S>> joint_frames(const Linkage& L);

extern template std::vector<JointFrame<double>> joint_frames(const Linkage&);
extern template std::vector<JointFrame<Rational>> joint_frames(const Linkage&);

/// Relabelled view of a loop: start at joint `shift`, optionally traverse in
/// reverse, and flip the orientation of the joints with flips[k] (k in the
/// original labelling).
template <class S>
std::vector<JointFrame<S>> transform_frames(const std::vector<JointFrame<S>>& frames, std::size_t shift, bool reverse,
                                            const std::vector<bool>& flips);

extern template std::vector<JointFrame<double>> transform_frames(const std::vector<JointFrame<double>>&, std::size_t,
                                                                 bool, const std::vector<bool>&);
extern template std::vector<JointFrame<Rational>> transform_frames(const std::vector<JointFrame<Rational>>&,
                                                                   std::size_t, bool, const std::vector<bool>&);

template <class S>
std::vector<std::optional<DhCore<S>>> dh_cores(const std::vector<JointFrame<S>>& frames, double tol = 1e-9);

extern template std::vector<std::optional<DhCore<double>>> dh_cores(const std::vector<JointFrame<double>>&, double);
extern template std::vector<std::optional<DhCore<Rational>>> dh_cores(const std::vector<JointFrame<Rational>>&,
                                                                      double);

/// rows[k]: pair (joint k, joint k+1) plus the offset on joint k. Rows touching
/// a P joint are empty. `orientation` records the sign chosen for each axis
/// (+1: as given). `exact` is present when the linkage is exact.
struct DHTable {
    std::vector<std::optional<DHParams>> rows;
    std::vector<int> orientation;
    std::optional<std::vector<std::optional<DhCore<Rational>>>> exact;
    std::vector<std::size_t> compatible_pairs;  // k with joint k, k+1 on one line
};

DHTable dh_table(const Linkage& L, double tol = 1e-9);
std::vector<std::optional<DHParams>> dh_rows(const std::vector<JointFrame<double>>& frames, double tol = 1e-9);

template <class S>
bool are_parallel(const DualQuaternion<S>& h1, const DualQuaternion<S>& h2, double tol = 1e-9);
template <class S>
bool are_compatible(const DualQuaternion<S>& h1, const DualQuaternion<S>& h2, double tol = 1e-9);
template <class S>
bool are_concurrent(const DualQuaternion<S>& h1, const DualQuaternion<S>& h2, double tol = 1e-9);

enum class BennettSign { No, Plus, Minus };

constexpr std::string_view to_string(BennettSign s) {
    switch (s) {
        case BennettSign::No: return "NO";
        case BennettSign::Plus: return "PLUS";
        case BennettSign::Minus: return "MINUS";
    }
    return "?";
}

/// Normal feet of l1 and l3 on l2 coincide and b12 = +-b23. Throws
/// std::invalid_argument when a consecutive pair is parallel.
template <class S>
BennettSign bennett_from_lines(const Line<S>& l1, const Line<S>& l2, const Line<S>& l3, double tol = 1e-9);

template <class S>
BennettSign is_bennett_triple(const DualQuaternion<S>& h1, const DualQuaternion<S>& h2, const DualQuaternion<S>& h3,
                              double tol = 1e-9) {
    return bennett_from_lines(axis_of(h1), axis_of(h2), axis_of(h3), tol);
}

// Absolute quadric cone. A point (a0:a1:a2:a3) with a0^2 + a1^2 + a2^2 = 0;
// (0:0:0:1) is the vertex.
using AbsolutePoint = std::array<Cplx, 4>;

AbsolutePoint line_to_abs_point(const OrientedLine& l);
AbsolutePoint line_to_abs_point(const DualQuaternion<double>& h);
AbsolutePoint conjugate_point(const AbsolutePoint& p);
/// Unit rotation quaternion of the oriented line of p (normalized by
/// mu = |u||v|). Throws std::invalid_argument for the vertex.
DualQuaternion<double> abs_point_to_rotation(const AbsolutePoint& p);

/// Determinant of four homogeneous points after scaling each to unit norm.
double normalized_det(const AbsolutePoint& a, const AbsolutePoint& b, const AbsolutePoint& c,
                      const AbsolutePoint& d);

bool concurrent_via_cone(const DualQuaternion<double>& h1, const DualQuaternion<double>& h2, double tol = 1e-9);
BennettSign bennett_via_cone(const DualQuaternion<double>& h1, const DualQuaternion<double>& h2,
                             const DualQuaternion<double>& h3, double tol = 1e-9);

/// Rank of the span of all ordered subset products h_{i1} h_{i2} ... (i1 < i2 < ...),
/// the empty product included. Floating: singular values below 1e-8 sigma_max
/// are zero. Exact: rational elimination.
int coupling_space_dim(const std::vector<DualQuaternion<double>>& hs, double rel_tol = 1e-8);
int coupling_space_dim(const std::vector<DualQuaternion<Rational>>& hs);

template <class S>
std::vector<DualQuaternion<S>> coupling_products(const std::vector<DualQuaternion<S>>& hs) {
    std::vector<DualQuaternion<S>> out{DualQuaternion<S>::one()};
    for (const auto& h : hs) {
        const std::size_t m = out.size();
        for (std::size_t k = 0; k < m; ++k) out.push_back(out[k] * h);
    }
    return out;
}

/// The Study form vanishes on the coupling space of (h1, h2).
bool coupling_in_study(const DualQuaternion<double>& h1, const DualQuaternion<double>& h2, double tol = 1e-9);
bool coupling_in_study(const DualQuaternion<Rational>& h1, const DualQuaternion<Rational>& h2);

/// Conjugation by cos(theta/2) + sin(theta/2) h: rotation of the line about
/// the axis h by theta.
OrientedLine rotate_line_about(const DualQuaternion<double>& axis, double theta, const OrientedLine& line);

/// Rank of a complex matrix with relative threshold.
int complex_rank(const std::vector<AbsolutePoint>& rows, double rel_tol = 1e-8);

}  // namespace overcon
