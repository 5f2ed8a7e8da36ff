#include "overcon/linkage.hpp"

#include <cmath>

namespace overcon {

FixedElement operator*(const FixedElement& a, const FixedElement& b) {
    FixedElement out;
    out.approx = a.approx * b.approx;
    if (a.exact && b.exact) out.exact = *a.exact * *b.exact;
    else out.exact.reset();
    return out;
}

namespace {

template <class S>
bool axis_shape_ok(const DualQuaternion<S>& h, double tol) {
    // h^2 = -1 for pure primal/dual parts means |p| = 1 and p . q = 0.
    const double scale = std::max(1.0, coord_norm(h));
    if (!is_zero(h.primal[0], tol * scale) || !is_zero(h.dual[0], tol * scale)) return false;
    DualQuaternion<S> sq = h * h + DualQuaternion<S>::one();
    return is_negligible(sq, scale * scale, tol);
}

bool same_line(const FixedElement& a, const FixedElement& b, double tol) {
    if (a.exact && b.exact) return *a.exact == *b.exact || *a.exact == -*b.exact;
    return is_negligible(a.approx - b.approx, 1.0, tol) || is_negligible(a.approx + b.approx, 1.0, tol);
}

bool parallel_dirs(const Vec3<double>& a, const Vec3<double>& b, double tol) {
    return norm(cross(a, b)) <= tol * norm(a) * norm(b);
}

}  // namespace

void validate_joint(const Joint& j, double tol) {
    switch (j.kind) {
        case JointKind::R:
        case JointKind::H: {
            bool ok = j.axis.exact ? axis_shape_ok(*j.axis.exact, tol) : axis_shape_ok(j.axis.approx, tol);
            if (!ok)
                throw std::invalid_argument(std::string(to_string(j.kind)) +
                                            " joint axis must satisfy h^2 = -1 with zero scalar parts");
            if (j.kind == JointKind::R && j.pitch != 0)
                throw std::invalid_argument("pitch is only meaningful for H joints");
            break;
        }
        case JointKind::P: {
            const auto& h = j.axis.approx;
            double dn = norm(h.dual.vec());
            if (primal_norm(h) > tol * std::max(1.0, dn) || std::abs(h.dual[0]) > tol * std::max(1.0, dn) ||
                dn == 0.0)
                throw std::invalid_argument("P joint direction must be a nonzero pure vector");
            if (j.axis.exact && (!j.axis.exact->primal.is_zero() || j.axis.exact->dual[0] != 0))
                throw std::invalid_argument("P joint direction must be a nonzero pure vector");
            break;
        }
    }
}

Linkage::Linkage(std::vector<Joint> js, std::string nm)
    : name(std::move(nm)), joints(std::move(js)), links(std::max<std::size_t>(joints.size(), 1)) {}

Linkage::Linkage(std::vector<Joint> js, std::vector<FixedElement> ls, std::string nm)
    : name(std::move(nm)), joints(std::move(js)), links(std::move(ls)) {
    if (links.size() != std::max<std::size_t>(joints.size(), 1))
        throw std::invalid_argument("link count must equal joint count");
}

bool Linkage::has_exact() const {
    for (const auto& j : joints)
        if (!j.axis.exact || j.kind == JointKind::H) return false;
    for (const auto& l : links)
        if (!l.exact) return false;
    return true;
}

bool Linkage::identity_links() const {
    for (const auto& l : links) {
        if (l.exact) {
            if (*l.exact != DualQuaternion<Rational>::one()) return false;
        } else if (!is_negligible(l.approx - DualQuaternion<double>::one(), 1.0, 0.0)) {
            return false;
        }
    }
    return true;
}

std::size_t Linkage::count(JointKind k) const {
    std::size_t n = 0;
    for (const auto& j : joints) n += j.kind == k;
    return n;
}

void validate_linkage(const Linkage& L, double tol) {
    if (L.links.size() != std::max<std::size_t>(L.size(), 1))
        throw std::invalid_argument("link count must equal joint count");
    for (std::size_t k = 0; k < L.size(); ++k) {
        try {
            validate_joint(L.joints[k], tol);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("joint " + std::to_string(k) + ": " + e.what());
        }
    }
    const std::size_t n = L.size();
    if (n < 2) return;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t m = (k + 1) % n;
        const Joint& a = L.joints[k];
        const Joint& b = L.joints[m];
        if (n == 2 && k == 1) break;
        // Express joint m in joint k's frame through the link between them.
        FixedElement bk = conjugate_by(L.links[k], b.axis);
        bool degenerate = false;
        if (a.kind != JointKind::P && b.kind != JointKind::P)
            degenerate = same_line(a.axis, bk, tol);
        else if (a.kind == JointKind::P && b.kind == JointKind::P)
            degenerate = parallel_dirs(a.axis.approx.dual.vec(), bk.approx.dual.vec(), tol);
        if (degenerate)
            throw std::invalid_argument("degenerate linkage: joints " + std::to_string(k) + " and " +
                                        std::to_string(m) + " share an axis");
    }
}

Configuration to_configuration(const std::vector<double>& t) {
    Configuration c;
    c.reserve(t.size());
    for (double x : t) c.emplace_back(x);
    return c;
}

DualQuaternion<double> joint_motion_derivative(const Joint& j, double t) {
    if (j.kind != JointKind::H) return DualQuaternion<double>::one();
    const DualQuaternion<double>& h = j.axis.approx;
    const double g = j.pitch.convert_to<double>();
    const double c = std::cos(t / 2), s = std::sin(t / 2);
    DualQuaternion<double> screw(Quaternion<double>(1.0), -(g * t) * h.primal);
    DualQuaternion<double> dscrew(Quaternion<double>(), -g * h.primal);
    DualQuaternion<double> rot = DualQuaternion<double>(c) - s * h;
    DualQuaternion<double> drot = DualQuaternion<double>(-s / 2) - (c / 2) * h;
    return dscrew * rot + screw * drot;
}

double ClosureResidual::norm() const {
    double s = 0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

ClosureResidual closure_residual(const Linkage& L, const Configuration& c) {
    DualQuaternion<double> p = loop_product(L, c);
    ClosureResidual r;
    double n = coord_norm(p);
    if (n == 0.0 || !std::isfinite(n)) {
        r.zero_product = true;
        return r;
    }
    // Sign fixed by the first nonzero coordinate so that any real rescaling of a
    // factor leaves the residual unchanged.
    for (std::size_t k = 0; k < 8; ++k) {
        if (p.coord(k) != 0.0) {
            if (p.coord(k) < 0) n = -n;
            break;
        }
    }
    for (std::size_t k = 1; k < 8; ++k) r.values[k - 1] = p.coord(k) / n;
    return r;
}

namespace {

template <class S>
FixedElement motion_element(const Joint& j, const Param<S>& t) {
    if constexpr (is_exact_v<S>) {
        if (!j.axis.exact) throw std::invalid_argument("exact freeze needs an exact joint");
        DualQuaternion<Rational> m = joint_motion(j, t);
        return FixedElement::from_exact(m);
    } else {
        return FixedElement::from_double(joint_motion(j, t));
    }
}

}  // namespace

template <class S>
Linkage freeze_joint(const Linkage& L, std::size_t k, const Param<S>& t) {
    const std::size_t n = L.size();
    if (k >= n) throw std::out_of_range("freeze_joint: joint index out of range");
    FixedElement m = motion_element(L.joints[k], t);
    Linkage out;
    out.name = L.name;
    if (n == 1) {
        out.links = {m * L.links[0]};
        return out;
    }
    out.joints = L.joints;
    out.links = L.links;
    if (k == 0) {
        out.links[n - 1] = L.links[n - 1] * m * L.links[0];
    } else {
        out.links[k - 1] = L.links[k - 1] * m * L.links[k];
    }
    out.joints.erase(out.joints.begin() + static_cast<std::ptrdiff_t>(k));
    out.links.erase(out.links.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
}

template Linkage freeze_joint<double>(const Linkage&, std::size_t, const Param<double>&);
template Linkage freeze_joint<Rational>(const Linkage&, std::size_t, const Param<Rational>&);

namespace {

FixedElement drop_dual(const FixedElement& e) {
    FixedElement out;
    out.approx = {e.approx.primal, Quaternion<double>()};
    if (e.exact) out.exact = DualQuaternion<Rational>{e.exact->primal, Quaternion<Rational>()};
    else out.exact.reset();
    return out;
}

}  // namespace

Linkage derived_linkage(const Linkage& L, DerivedKind which) {
    Linkage out = L;
    if (which == DerivedKind::Spherical) {
        out.name = L.name + "-spherical";
        for (auto& j : out.joints) {
            j.axis = drop_dual(j.axis);
            if (j.kind == JointKind::H) {
                j.kind = JointKind::R;
                j.pitch = 0;
            }
        }
        for (auto& l : out.links) l = drop_dual(l);
        return out;
    }
    if (L.count(JointKind::H) == 0) throw std::invalid_argument("derived linkage needs at least one H joint");
    for (auto& j : out.joints) {
        if (j.kind != JointKind::H) continue;
        j.pitch = 0;
        if (which == DerivedKind::ReplaceHByR) {
            j.kind = JointKind::R;
        } else {
            j.kind = JointKind::P;
            FixedElement a;
            a.approx = {Quaternion<double>(), j.axis.approx.primal};
            if (j.axis.exact) a.exact = DualQuaternion<Rational>{Quaternion<Rational>(), j.axis.exact->primal};
            else a.exact.reset();
            j.axis = a;
        }
    }
    out.name = L.name + (which == DerivedKind::ReplaceHByR ? "-r" : "-p");
    return out;
}

FixedElement conjugate_by(const FixedElement& g, const FixedElement& x) {
    FixedElement out;
    out.approx = g.approx * x.approx * inverse(g.approx);
    if (g.exact && x.exact) out.exact = *g.exact * *x.exact * inverse(*g.exact);
    else out.exact.reset();
    return out;
}

HomeAxes home_axes(const Linkage& L) {
    HomeAxes out;
    FixedElement T = FixedElement::identity();
    for (std::size_t k = 0; k < L.size(); ++k) {
        out.axes.push_back(conjugate_by(T, L.joints[k].axis));
        T = T * L.links[k];
    }
    if (L.size() == 0 && !L.links.empty()) T = L.links[0];
    out.total = T;
    return out;
}

}  // namespace overcon
