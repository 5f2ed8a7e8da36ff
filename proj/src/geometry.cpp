#include "overcon/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace overcon {

namespace {

template <class S>
S sq_norm(const Vec3<S>& v) {
    return dot(v, v);
}

}  // namespace

template <class S>
Line<S> axis_of(const DualQuaternion<S>& h, double tol) {
    const Vec3<S> p = h.primal.vec();
    const Vec3<S> q = h.dual.vec();
    if constexpr (is_exact_v<S>) {
        (void)tol;
        if (h.primal[0] != 0 || h.dual[0] != 0 || sq_norm(p) != 1 || dot(p, q) != 0)
            throw std::invalid_argument("axis_of: not a unit rotation quaternion");
        return {p, q};
    } else {
        const double scale = coord_norm(h);
        const double n = norm(p);
        if (n == 0.0 || std::abs(h.primal[0]) > tol * scale || std::abs(h.dual[0]) > tol * scale ||
            std::abs(dot(p, q)) > tol * scale * scale)
            throw std::invalid_argument("axis_of: not a rotation quaternion");
        const double inv = 1.0 / n;
        return {inv * p, inv * q};
    }
}

template Line<double> axis_of(const DualQuaternion<double>&, double);
template Line<Rational> axis_of(const DualQuaternion<Rational>&, double);

DualQuaternion<double> line_quaternion(const OrientedLine& l) {
    return DualQuaternion<double>::line(l.direction, l.moment);
}

DHParams dh_between(const OrientedLine& l1, const OrientedLine& l2, double tol) {
    DHParams out;
    const Vec3<double> x = cross(l1.direction, l2.direction);
    const double s = norm(x);
    out.c = dot(l1.direction, l2.direction);
    out.alpha = std::atan2(s, out.c);
    if (s <= tol) {
        out.parallel = true;
        out.o_defined = false;
        out.d = norm(cross(l1.direction, l2.closest_point() - l1.closest_point()));
        out.b = 0;
        return out;
    }
    const double r = reciprocal_product(l1, l2);
    out.d = -r / s;
    out.b = -r / (s * s);
    return out;
}

template <class S>
std::vector<JointFrame<S>> joint_frames(const Linkage& L) {
    const std::size_t n = L.size();
    std::vector<JointFrame<S>> out(n);
    const bool plain = L.identity_links();
    auto rotational = [&](std::size_t k) { return L.joints[k].kind != JointKind::P; };
    for (std::size_t k = 0; k < n; ++k) {
        if (!rotational(k)) continue;
        out[k].self = axis_of(L.joints[k].axis.template as<S>());
        const std::size_t nx = (k + 1) % n, pv = (k + n - 1) % n;
        if (rotational(nx)) {
            DualQuaternion<S> h = L.joints[nx].axis.template as<S>();
            if (!plain) {
                const DualQuaternion<S> g = L.links[k].template as<S>();
                h = g * h * inverse(g);
            }
            out[k].next = axis_of(h);
        }
        if (rotational(pv)) {
            DualQuaternion<S> h = L.joints[pv].axis.template as<S>();
            if (!plain) {
                const DualQuaternion<S> g = L.links[pv].template as<S>();
                h = inverse(g) * h * g;
            }
            out[k].prev = axis_of(h);
        }
    }
    return out;
}

template std::vector<JointFrame<double>> joint_frames(const Linkage&);
template std::vector<JointFrame<Rational>> joint_frames(const Linkage&);

template <class S>
std::vector<JointFrame<S>> transform_frames(const std::vector<JointFrame<S>>& frames, std::size_t shift, bool reverse,
                                            const std::vector<bool>& flips) {
    const std::size_t n = frames.size();
    std::vector<JointFrame<S>> out(n);
    auto flipped = [&](const std::optional<Line<S>>& l, std::size_t orig) -> std::optional<Line<S>> {
        if (!l) return l;
        return (!flips.empty() && flips[orig]) ? -*l : *l;
    };
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t o = reverse ? (shift + n - j % n) % n : (shift + j) % n;
        const JointFrame<S>& f = frames[o];
        JointFrame<S> g;
        g.self = flipped(f.self, o);
        g.prev = flipped(f.prev, (o + n - 1) % n);
        g.next = flipped(f.next, (o + 1) % n);
        if (reverse) std::swap(g.prev, g.next);
        out[j] = g;
    }
    return out;
}

template std::vector<JointFrame<double>> transform_frames(const std::vector<JointFrame<double>>&, std::size_t, bool,
                                                          const std::vector<bool>&);
template std::vector<JointFrame<Rational>> transform_frames(const std::vector<JointFrame<Rational>>&, std::size_t,
                                                            bool, const std::vector<bool>&);

template <class S>
std::vector<std::optional<DhCore<S>>> dh_cores(const std::vector<JointFrame<S>>& frames, double tol) {
    const std::size_t n = frames.size();
    std::vector<std::optional<DhCore<S>>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const JointFrame<S>& f = frames[k];
        if (!f.self || !f.next) continue;
        DhCore<S> r;
        r.c = dot(f.self->direction, f.next->direction);
        r.parallel = directions_parallel(*f.self, *f.next, tol);
        if (!r.parallel) r.b = -reciprocal_product(*f.self, *f.next) / (S(1) - r.c * r.c);
        if (f.prev && !r.parallel && !directions_parallel(*f.self, *f.prev, tol)) {
            r.o = foot_parameter(*f.self, *f.next) - foot_parameter(*f.self, *f.prev);
        } else {
            r.o_defined = false;
        }
        out[k] = r;
    }
    return out;
}

template std::vector<std::optional<DhCore<double>>> dh_cores(const std::vector<JointFrame<double>>&, double);
template std::vector<std::optional<DhCore<Rational>>> dh_cores(const std::vector<JointFrame<Rational>>&, double);

std::vector<std::optional<DHParams>> dh_rows(const std::vector<JointFrame<double>>& frames, double tol) {
    const std::size_t n = frames.size();
    std::vector<std::optional<DHParams>> out(n);
    auto cores = dh_cores(frames, tol);
    for (std::size_t k = 0; k < n; ++k) {
        if (!cores[k]) continue;
        DHParams p = dh_between(*frames[k].self, *frames[k].next, tol);
        p.o = cores[k]->o_defined ? cores[k]->o : 0.0;
        p.o_defined = cores[k]->o_defined;
        out[k] = p;
    }
    return out;
}

namespace {

bool exact_geometry(const Linkage& L) {
    for (const auto& j : L.joints)
        if (j.kind != JointKind::P && !j.axis.exact) return false;
    for (const auto& l : L.links)
        if (!l.exact) return false;
    return true;
}

template <class S>
bool same_line(const Line<S>& a, const Line<S>& b, double tol) {
    if (!directions_parallel(a, b, tol)) return false;
    const Vec3<S> x = cross(a.direction, b.closest_point() - a.closest_point());
    return is_zero(x[0], tol) && is_zero(x[1], tol) && is_zero(x[2], tol);
}

}  // namespace

DHTable dh_table(const Linkage& L, double tol) {
    DHTable t;
    auto frames = joint_frames<double>(L);
    t.rows = dh_rows(frames, tol);
    t.orientation.assign(L.size(), 1);
    for (std::size_t k = 0; k < L.size(); ++k)
        if (frames[k].self && frames[k].next && same_line(*frames[k].self, *frames[k].next, tol))
            t.compatible_pairs.push_back(k);
    if (exact_geometry(L)) {
        try {
            t.exact = dh_cores(joint_frames<Rational>(L), tol);
        } catch (const std::invalid_argument&) {
            t.exact.reset();  // exact axes that are not unit
        }
    }
    return t;
}

template <class S>
bool are_parallel(const DualQuaternion<S>& h1, const DualQuaternion<S>& h2, double tol) {
    return directions_parallel(axis_of(h1), axis_of(h2), tol);
}

template <class S>
bool are_compatible(const DualQuaternion<S>& h1, const DualQuaternion<S>& h2, double tol) {
    return same_line(axis_of(h1), axis_of(h2), tol);
}

template <class S>
bool are_concurrent(const DualQuaternion<S>& h1, const DualQuaternion<S>& h2, double tol) {
    const Line<S> a = axis_of(h1), b = axis_of(h2);
    const S r = reciprocal_product(a, b);
    if constexpr (is_exact_v<S>) {
        (void)tol;
        return r == 0;
    } else {
        return std::abs(r) <= tol * (1.0 + norm(a.moment) + norm(b.moment));
    }
}

template bool are_parallel(const DualQuaternion<double>&, const DualQuaternion<double>&, double);
template bool are_parallel(const DualQuaternion<Rational>&, const DualQuaternion<Rational>&, double);
template bool are_compatible(const DualQuaternion<double>&, const DualQuaternion<double>&, double);
template bool are_compatible(const DualQuaternion<Rational>&, const DualQuaternion<Rational>&, double);
template bool are_concurrent(const DualQuaternion<double>&, const DualQuaternion<double>&, double);
template bool are_concurrent(const DualQuaternion<Rational>&, const DualQuaternion<Rational>&, double);

template <class S>
BennettSign bennett_from_lines(const Line<S>& l1, const Line<S>& l2, const Line<S>& l3, double tol) {
    if (directions_parallel(l1, l2, tol) || directions_parallel(l2, l3, tol))
        throw std::invalid_argument("Bennett condition needs non-parallel consecutive axes");
    auto ratio = [](const Line<S>& a, const Line<S>& b) {
        const S c = dot(a.direction, b.direction);
        return -reciprocal_product(a, b) / (S(1) - c * c);
    };
    const S o = foot_parameter(l2, l3) - foot_parameter(l2, l1);
    if (!is_zero(o, tol)) return BennettSign::No;
    const S b12 = ratio(l1, l2), b23 = ratio(l2, l3);
    if (is_zero(b12 - b23, tol)) return BennettSign::Plus;
    if (is_zero(b12 + b23, tol)) return BennettSign::Minus;
    return BennettSign::No;
}

template BennettSign bennett_from_lines(const Line<double>&, const Line<double>&, const Line<double>&, double);
template BennettSign bennett_from_lines(const Line<Rational>&, const Line<Rational>&, const Line<Rational>&, double);

AbsolutePoint line_to_abs_point(const OrientedLine& l) {
    const Vec3<double>& D = l.direction;
    // Reference axis least aligned with D.
    std::size_t k = 0;
    for (std::size_t m = 1; m < 3; ++m)
        if (std::abs(D[m]) < std::abs(D[k])) k = m;
    Vec3<double> e{0, 0, 0};
    e[k] = 1;
    Vec3<double> u = e - dot(e, D) * D;
    u = (1.0 / norm(u)) * u;
    const Vec3<double> v = cross(D, u);
    const double d1 = dot(l.moment, v), d2 = -dot(l.moment, u);
    return {Cplx(u[0], v[0]), Cplx(u[1], v[1]), Cplx(u[2], v[2]), Cplx(d1, d2)};
}

AbsolutePoint line_to_abs_point(const DualQuaternion<double>& h) { return line_to_abs_point(axis_of(h)); }

AbsolutePoint conjugate_point(const AbsolutePoint& p) {
    return {std::conj(p[0]), std::conj(p[1]), std::conj(p[2]), std::conj(p[3])};
}

DualQuaternion<double> abs_point_to_rotation(const AbsolutePoint& p) {
    const Vec3<double> u{p[0].real(), p[1].real(), p[2].real()};
    const Vec3<double> v{p[0].imag(), p[1].imag(), p[2].imag()};
    const double scale = std::abs(p[0]) + std::abs(p[1]) + std::abs(p[2]) + std::abs(p[3]);
    const double mu = norm(u) * norm(v);
    if (scale == 0.0 || mu <= 1e-14 * scale * scale)
        throw std::invalid_argument("abs_point_to_rotation: the cone vertex has no line");
    const double d1 = p[3].real(), d2 = p[3].imag();
    Quaternion<double> primal = Quaternion<double>::pure(u) * Quaternion<double>::pure(v);
    Quaternion<double> dual = Quaternion<double>::pure(d1 * v - d2 * u);
    return {(1.0 / mu) * primal, (1.0 / mu) * dual};
}

double normalized_det(const AbsolutePoint& a, const AbsolutePoint& b, const AbsolutePoint& c,
                      const AbsolutePoint& d) {
    Eigen::Matrix4cd m;
    const AbsolutePoint* rows[4] = {&a, &b, &c, &d};
    for (int r = 0; r < 4; ++r) {
        double n = 0;
        for (const Cplx& z : *rows[r]) n += std::norm(z);
        n = std::sqrt(n);
        if (n == 0.0) return 0.0;
        for (int k = 0; k < 4; ++k) m(r, k) = (*rows[r])[static_cast<std::size_t>(k)] / n;
    }
    return std::abs(m.determinant());
}

bool concurrent_via_cone(const DualQuaternion<double>& h1, const DualQuaternion<double>& h2, double tol) {
    const AbsolutePoint p1 = line_to_abs_point(h1), p2 = line_to_abs_point(h2);
    return normalized_det(p1, conjugate_point(p1), p2, conjugate_point(p2)) <= tol;
}

BennettSign bennett_via_cone(const DualQuaternion<double>& h1, const DualQuaternion<double>& h2,
                             const DualQuaternion<double>& h3, double tol) {
    const AbsolutePoint p1 = line_to_abs_point(h1), p2 = line_to_abs_point(h2), p3 = line_to_abs_point(h3);
    const AbsolutePoint q2 = conjugate_point(p2);
    if (normalized_det(p1, p2, q2, p3) <= tol) return BennettSign::Plus;
    if (normalized_det(conjugate_point(p1), p2, q2, p3) <= tol) return BennettSign::Minus;
    return BennettSign::No;
}

int coupling_space_dim(const std::vector<DualQuaternion<double>>& hs, double rel_tol) {
    auto prods = coupling_products(hs);
    Eigen::MatrixXd m(8, static_cast<Eigen::Index>(prods.size()));
    for (std::size_t j = 0; j < prods.size(); ++j) {
        auto c = prods[j].coords();
        for (int i = 0; i < 8; ++i) m(i, static_cast<Eigen::Index>(j)) = c[static_cast<std::size_t>(i)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > rel_tol * s(0)) ++rank;
    return rank;
}

namespace {

int exact_rank(std::vector<std::array<Rational, 8>> rows) {
    int rank = 0;
    for (std::size_t col = 0; col < 8 && static_cast<std::size_t>(rank) < rows.size(); ++col) {
        std::size_t piv = static_cast<std::size_t>(rank);
        while (piv < rows.size() && rows[piv][col] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[static_cast<std::size_t>(rank)]);
        const auto& pr = rows[static_cast<std::size_t>(rank)];
        for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < rows.size(); ++r) {
            if (rows[r][col] == 0) continue;
            const Rational f = rows[r][col] / pr[col];
            for (std::size_t c = col; c < 8; ++c) rows[r][c] -= f * pr[c];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

int coupling_space_dim(const std::vector<DualQuaternion<Rational>>& hs) {
    std::vector<std::array<Rational, 8>> rows;
    for (const auto& p : coupling_products(hs)) rows.push_back(p.coords());
    return exact_rank(std::move(rows));
}

bool coupling_in_study(const DualQuaternion<double>& h1, const DualQuaternion<double>& h2, double tol) {
    auto prods = coupling_products(std::vector<DualQuaternion<double>>{h1, h2});
    for (const auto& x : prods)
        for (const auto& y : prods)
            if (std::abs(study_form(x, y)) > tol * coord_norm(x) * coord_norm(y)) return false;
    return true;
}

bool coupling_in_study(const DualQuaternion<Rational>& h1, const DualQuaternion<Rational>& h2) {
    auto prods = coupling_products(std::vector<DualQuaternion<Rational>>{h1, h2});
    for (const auto& x : prods)
        for (const auto& y : prods)
            if (study_form(x, y) != 0) return false;
    return true;
}

OrientedLine rotate_line_about(const DualQuaternion<double>& axis, double theta, const OrientedLine& line) {
    const DualQuaternion<double> h = line_quaternion(axis_of(axis));
    const DualQuaternion<double> g = DualQuaternion<double>(std::cos(theta / 2)) + std::sin(theta / 2) * h;
    return axis_of(g * line_quaternion(line) * inverse(g));
}

int complex_rank(const std::vector<AbsolutePoint>& rows, double rel_tol) {
    if (rows.empty()) return 0;
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()), 4);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int k = 0; k < 4; ++k) m(static_cast<Eigen::Index>(r), k) = rows[r][static_cast<std::size_t>(k)];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > rel_tol * s(0)) ++rank;
    return rank;
}

}  // namespace overcon
