#include "overcon/classify.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace overcon {

std::string_view to_string(Strength s) {
    switch (s) {
        case Strength::Necessary: return "necessary";
        case Strength::Sufficient: return "sufficient";
        case Strength::NecessaryAndSufficient: return "necessary-and-sufficient";
    }
    return "?";
}

std::string_view to_string(GoldbergVerdict v) {
    return v == GoldbergVerdict::PassesNecessary ? "PASSES_NECESSARY" : "FAILS";
}

std::string_view to_string(SixRCase c) {
    switch (c) {
        case SixRCase::TwoBennetts: return "TWO_BENNETTS";
        case SixRCase::SecondPattern: return "SECOND_PATTERN";
        case SixRCase::NoMatch: return "NO_MATCH";
    }
    return "?";
}

std::string_view to_string(SubgroupVerdict v) {
    switch (v) {
        case SubgroupVerdict::SE2: return "SE2";
        case SubgroupVerdict::SO3: return "SO3";
        case SubgroupVerdict::No: return "NO";
    }
    return "?";
}

std::string describe(const LabelView& v) {
    std::string s = "shift " + std::to_string(v.shift) + (v.reversed ? ", reversed" : ", forward");
    std::string f;
    for (std::size_t k = 0; k < v.flips.size(); ++k)
        if (v.flips[k]) f += (f.empty() ? "" : ",") + std::to_string(k);
    if (!f.empty()) s += ", flipped {" + f + "}";
    return s;
}

std::string describe(const StructureItem& s) {
    std::string j;
    for (std::size_t k : s.joints) j += (j.empty() ? "" : "-") + std::to_string(k);
    switch (s.kind) {
        case StructureItem::Kind::Parallel: return "parallel " + j;
        case StructureItem::Kind::Concurrent: return "concurrent " + j;
        case StructureItem::Kind::BennettTriple: return "bennett " + j + " " + std::string(to_string(s.sign));
    }
    return j;
}

std::string joint_signature(const Linkage& L) {
    std::string s;
    for (const auto& j : L.joints) s += to_string(j.kind);
    return s;
}

namespace {

template <class S>
using Cores = std::vector<std::optional<DhCore<S>>>;

template <class V>
struct frame_scalar;
template <class S>
struct frame_scalar<std::vector<JointFrame<S>>> {
    using type = S;
};
template <class V>
using FrameScalar = typename frame_scalar<std::decay_t<V>>::type;

std::string fmt(const Rational& x) { return to_string(x); }
std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

template <class S>
bool eqv(const S& a, const S& b, double tol) {
    return is_zero(S(a - b), tol);
}

bool exact_geometry(const Linkage& L) {
    for (const auto& j : L.joints)
        if (!j.axis.exact) return false;
    for (const auto& l : L.links)
        if (!l.exact) return false;
    return true;
}

// Runs f(frames, exact) in rational arithmetic when the loop is exact.
template <class F>
auto with_frames(const Linkage& L, F&& f) {
    if (exact_geometry(L)) {
        std::optional<std::vector<JointFrame<Rational>>> fr;
        try {
            fr = joint_frames<Rational>(L);
        } catch (const std::invalid_argument&) {
        }
        if (fr) return f(*fr, true);
    }
    return f(joint_frames<double>(L), false);
}

template <class S>
bool same_line(const Line<S>& a, const Line<S>& b, double tol) {
    if (!directions_parallel(a, b, tol)) return false;
    const Vec3<S> x = cross(a.direction, b.closest_point() - a.closest_point());
    return is_zero(x[0], tol) && is_zero(x[1], tol) && is_zero(x[2], tol);
}

template <class S>
bool coplanar(const Line<S>& a, const Line<S>& b, double tol) {
    const S r = reciprocal_product(a, b);
    if constexpr (is_exact_v<S>) {
        return r == 0;
    } else {
        return std::abs(r) <= tol * (1.0 + norm(a.moment) + norm(b.moment));
    }
}

template <class S>
bool rows_skew(const Cores<S>& c, std::initializer_list<std::size_t> rows) {
    for (std::size_t r : rows)
        if (!c[r] || c[r]->parallel) return false;
    return true;
}

template <class S>
bool equal_ratios(const Cores<S>& c, std::initializer_list<std::size_t> rows, double tol) {
    const S& b0 = c[*rows.begin()]->b;
    for (std::size_t r : rows)
        if (!eqv(c[r]->b, b0, tol)) return false;
    return true;
}

template <class S>
bool zero_offsets(const Cores<S>& c, std::initializer_list<std::size_t> rows, double tol) {
    for (std::size_t r : rows)
        if (!c[r] || !c[r]->o_defined || !is_zero(c[r]->o, tol)) return false;
    return true;
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = k;
    return r;
}

template <class S>
bool rows_skew(const Cores<S>& c, const std::vector<std::size_t>& rows) {
    for (std::size_t r : rows)
        if (!c[r] || c[r]->parallel) return false;
    return true;
}

template <class S>
bool equal_ratios(const Cores<S>& c, const std::vector<std::size_t>& rows, double tol) {
    for (std::size_t r : rows)
        if (!eqv(c[r]->b, c[rows[0]]->b, tol)) return false;
    return true;
}

template <class S>
bool zero_offsets(const Cores<S>& c, const std::vector<std::size_t>& rows, double tol) {
    for (std::size_t r : rows)
        if (!c[r] || !c[r]->o_defined || !is_zero(c[r]->o, tol)) return false;
    return true;
}

// First relabelling (cyclic shift, direction, axis flips) whose DH cores
// satisfy pred. Flips only, when all_labels is false.
template <class S, class Pred>
std::optional<std::pair<LabelView, Cores<S>>> find_view(const std::vector<JointFrame<S>>& frames, bool all_labels,
                                                        double tol, Pred&& pred) {
    const std::size_t n = frames.size();
    const std::size_t shifts = all_labels ? n : 1;
    const int dirs = all_labels ? 2 : 1;
    for (std::size_t shift = 0; shift < shifts; ++shift)
        for (int rev = 0; rev < dirs; ++rev)
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                LabelView v{shift, rev == 1, std::vector<bool>(n)};
                for (std::size_t k = 0; k < n; ++k) v.flips[k] = (mask >> k) & 1u;
                Cores<S> c = dh_cores(transform_frames(frames, shift, rev == 1, v.flips), tol);
                if (pred(c)) return std::make_pair(v, std::move(c));
            }
    return std::nullopt;
}

template <class S>
bool all_parallel(const Cores<S>& c) {
    for (const auto& r : c)
        if (!r || !r->parallel) return false;
    return true;
}

template <class S>
bool all_spherical(const Cores<S>& c, double tol) {
    const auto rows = all_rows(c.size());
    if (!rows_skew(c, rows)) return false;
    for (const auto& r : c)
        if (!is_zero(r->b, tol)) return false;
    return zero_offsets(c, rows, tol);
}

template <class S>
std::vector<JointFrame<S>> loop_frames(const std::vector<Line<S>>& lines) {
    const std::size_t n = lines.size();
    std::vector<JointFrame<S>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k].prev = lines[(k + n - 1) % n];
        out[k].self = lines[k];
        out[k].next = lines[(k + 1) % n];
    }
    return out;
}

template <class S>
BennettCheck bennett_on_frames(const std::vector<JointFrame<S>>& frames, bool exact, double tol) {
    if (frames.size() != 4) throw std::invalid_argument("four-bar check needs 4 joints");
    for (const auto& f : frames)
        if (!f.self || !f.next) throw std::invalid_argument("four-bar check needs R joints");
    for (std::size_t k = 0; k < 4; ++k)
        if (same_line(*frames[k].self, *frames[k].next, tol))
            throw std::invalid_argument("joints " + std::to_string(k) + " and " + std::to_string((k + 1) % 4) +
                                        " share an axis");
    BennettCheck out;
    out.exact = exact;
    const Cores<S> plain = dh_cores(frames, tol);
    if (all_parallel(plain)) {
        out.holds = true;
        out.kind = "planar";
        out.evidence.push_back("all axes parallel");
        return out;
    }
    if (all_spherical(plain, tol)) {
        out.holds = true;
        out.kind = "spherical";
        out.evidence.push_back("all Bennett ratios and offsets zero");
        return out;
    }
    auto hit = find_view(frames, false, tol, [&](const Cores<S>& c) {
        return rows_skew(c, {0, 1, 2, 3}) && equal_ratios(c, {0, 1, 2, 3}, tol) && eqv(c[0]->c, c[2]->c, tol) &&
               eqv(c[1]->c, c[3]->c, tol) && zero_offsets(c, {0, 1, 2, 3}, tol);
    });
    if (!hit) {
        out.kind = "none";
        return out;
    }
    const Cores<S>& c = hit->second;
    out.holds = true;
    out.kind = "bennett";
    out.view = hit->first;
    out.evidence.push_back("b = " + fmt(c[0]->b) + " on all four pairs");
    out.evidence.push_back("c1 = c3 = " + fmt(c[0]->c) + ", c2 = c4 = " + fmt(c[1]->c));
    out.evidence.push_back("offsets zero");
    return out;
}

template <class S>
Line<S> line_of(const FixedElement& h) {
    return axis_of(h.as<S>());
}

}  // namespace

BennettCheck check_bennett_4r(const Linkage& L, double tol) {
    if (L.size() != 4 || L.count(JointKind::R) != 4) throw std::invalid_argument("four-bar check needs 4 R joints");
    return with_frames(L, [&](const auto& frames, bool exact) { return bennett_on_frames(frames, exact, tol); });
}

BennettCheck check_bennett_loop(const std::vector<FixedElement>& axes, double tol) {
    if (axes.size() != 4) throw std::invalid_argument("four-bar check needs 4 axes");
    bool exact = true;
    for (const auto& a : axes) exact = exact && a.exact.has_value();
    if (exact) {
        std::vector<Line<Rational>> ls;
        try {
            for (const auto& a : axes) ls.push_back(line_of<Rational>(a));
            return bennett_on_frames(loop_frames(ls), true, tol);
        } catch (const std::invalid_argument& e) {
            if (ls.size() == 4) throw;  // geometric failure, not a non-unit axis
        }
    }
    std::vector<Line<double>> ls;
    for (const auto& a : axes) ls.push_back(line_of<double>(a));
    return bennett_on_frames(loop_frames(ls), false, tol);
}

GoldbergCheck check_goldberg_5r(const Linkage& L, double tol) {
    if (L.size() != 5 || L.count(JointKind::R) != 5) throw std::invalid_argument("five-bar check needs 5 R joints");
    return with_frames(L, [&](const auto& frames, bool exact) {
        using S = FrameScalar<decltype(frames)>;
        GoldbergCheck out;
        out.exact = exact;
        if (all_parallel(dh_cores(frames, tol))) {
            out.verdict = GoldbergVerdict::PassesNecessary;
            out.degenerate = true;
            out.evidence.push_back("all axes parallel (planar)");
            return out;
        }
        auto hit = find_view(frames, true, tol, [&](const Cores<S>& c) {
            return rows_skew(c, {0, 1, 2, 3}) && equal_ratios(c, {0, 1, 2, 3}, tol) &&
                   eqv(c[0]->c, c[3]->c, tol) && zero_offsets(c, {1, 2, 3}, tol);
        });
        if (hit) {
            const Cores<S>& c = hit->second;
            out.verdict = GoldbergVerdict::PassesNecessary;
            out.view = hit->first;
            out.evidence.push_back("b1..b4 = " + fmt(c[0]->b));
            out.evidence.push_back("c1 = c4 = " + fmt(c[0]->c));
            out.evidence.push_back("o2 = o3 = o4 = 0");
        }
        out.evidence.push_back("partial check: further equational conditions are not tested");
        return out;
    });
}

SixRResult classify_6r_mobility2(const Linkage& L, double tol) {
    if (L.size() != 6 || L.count(JointKind::R) != 6) throw std::invalid_argument("6R classification needs 6 R joints");
    return with_frames(L, [&](const auto& frames, bool exact) {
        using S = FrameScalar<decltype(frames)>;
        const std::vector<std::size_t> rows = all_rows(6);
        SixRResult out;
        out.exact = exact;
        auto base = [&](const Cores<S>& c) {
            return rows_skew(c, rows) && equal_ratios(c, rows, tol) && zero_offsets(c, rows, tol);
        };
        out.equal_ratios = find_view(frames, false, tol, [&](const Cores<S>& c) {
                               return rows_skew(c, rows) && equal_ratios(c, rows, tol);
                           }).has_value();
        out.zero_offsets = zero_offsets(dh_cores(frames, tol), rows, tol);

        // 0-based rows: case one c0=c3, c1=c5, c2=c4; case two c0=c3, c1=c4, c2=c5.
        auto first = find_view(frames, true, tol, [&](const Cores<S>& c) {
            return base(c) && eqv(c[0]->c, c[3]->c, tol) && eqv(c[1]->c, c[5]->c, tol) && eqv(c[2]->c, c[4]->c, tol);
        });
        decltype(first) hit;
        if (first) {
            out.match = SixRCase::TwoBennetts;
            hit = first;
        } else {
            hit = find_view(frames, true, tol, [&](const Cores<S>& c) {
                return base(c) && eqv(c[0]->c, c[3]->c, tol) && eqv(c[1]->c, c[4]->c, tol) &&
                       eqv(c[2]->c, c[5]->c, tol);
            });
            if (hit) out.match = SixRCase::SecondPattern;
        }
        if (hit) {
            const Cores<S>& c = hit->second;
            out.view = hit->first;
            out.evidence.push_back("equal Bennett ratios b = " + fmt(c[0]->b));
            out.evidence.push_back("all offsets zero");
            if (out.match == SixRCase::TwoBennetts)
                out.evidence.push_back("c1 = c4 = " + fmt(c[0]->c) + ", c2 = c6 = " + fmt(c[1]->c) +
                                       ", c3 = c5 = " + fmt(c[2]->c));
            else
                out.evidence.push_back("c1 = c4 = " + fmt(c[0]->c) + ", c2 = c5 = " + fmt(c[1]->c) +
                                       ", c3 = c6 = " + fmt(c[2]->c));
            out.evidence.push_back("under " + describe(hit->first));
        }

        // Four consecutive joints s..s+3 whose three links fit a Bennett loop.
        for (std::size_t s = 0; s < 6; ++s) {
            const std::size_t r0 = s, r1 = (s + 1) % 6, r2 = (s + 2) % 6;
            auto q = find_view(frames, false, tol, [&](const Cores<S>& c) {
                return rows_skew(c, {r0, r1, r2}) && equal_ratios(c, {r0, r1, r2}, tol) &&
                       eqv(c[r0]->c, c[r2]->c, tol) && zero_offsets(c, {r1, r2}, tol);
            });
            if (q) out.bennett_quads.push_back(s);
        }
        if (out.match != SixRCase::NoMatch && out.bennett_quads.empty())
            out.evidence.push_back("no Bennett 4R loop on any four consecutive joints");
        for (std::size_t s : out.bennett_quads)
            out.evidence.push_back("joints " + std::to_string(s) + ".." + std::to_string((s + 3) % 6) +
                                   " fit a Bennett loop");
        return out;
    });
}

namespace {

template <class S>
Vec3<S> p_direction(const FixedElement& e) {
    return e.as<S>().dual.vec();
}

template <class S>
bool vec_zero(const Vec3<S>& v, double tol) {
    return is_zero(v[0], tol) && is_zero(v[1], tol) && is_zero(v[2], tol);
}

template <class S>
Vec3<S> unit_if_float(const Vec3<S>& v) {
    if constexpr (is_exact_v<S>) {
        return v;
    } else {
        const double n = norm(v);
        return {v[0] / n, v[1] / n, v[2] / n};
    }
}

// Directions of the joints in the home frame. R/H axes and P directions.
struct DirectionFacts {
    bool has_rotational = false;
    bool rotational_parallel = false;  // every R/H axis parallel, seam included
    bool p_perpendicular = false;      // every P direction perpendicular to that common direction
};

template <class S>
DirectionFacts direction_facts(const Linkage& L, double tol) {
    const HomeAxes H = home_axes(L);
    DirectionFacts f;
    std::optional<Vec3<S>> d0;
    std::size_t first = 0;
    bool parallel = true;
    for (std::size_t k = 0; k < L.size(); ++k) {
        if (L.joints[k].kind == JointKind::P) continue;
        const Vec3<S> d = line_of<S>(H.axes[k]).direction;
        if (!d0) {
            d0 = d;
            first = k;
        } else if (!vec_zero(cross(*d0, d), tol)) {
            parallel = false;
        }
    }
    if (!d0) return f;
    f.has_rotational = true;
    const Vec3<S> seam = line_of<S>(conjugate_by(H.total, H.axes[first])).direction;
    f.rotational_parallel = parallel && vec_zero(cross(*d0, seam), tol);
    bool perp = true;
    for (std::size_t k = 0; k < L.size(); ++k)
        if (L.joints[k].kind == JointKind::P && !is_zero(dot(*d0, unit_if_float(p_direction<S>(H.axes[k]))), tol))
            perp = false;
    f.p_perpendicular = perp;
    return f;
}

template <class F>
auto with_home(const Linkage& L, F&& f) {
    if (exact_geometry(L)) {
        try {
            return f(std::true_type{});
        } catch (const std::invalid_argument&) {
        }
    }
    return f(std::false_type{});
}

DirectionFacts directions(const Linkage& L, double tol) {
    return with_home(L, [&](auto exact) {
        if constexpr (decltype(exact)::value) return direction_facts<Rational>(L, tol);
        else return direction_facts<double>(L, tol);
    });
}

bool p_parallel(const Linkage& L, std::size_t i, std::size_t j, double tol) {
    return with_home(L, [&](auto exact) {
        const HomeAxes H = home_axes(L);
        if constexpr (decltype(exact)::value) {
            return vec_zero(cross(p_direction<Rational>(H.axes[i]), p_direction<Rational>(H.axes[j])), tol);
        } else {
            return vec_zero(cross(unit_if_float(p_direction<double>(H.axes[i])),
                                  unit_if_float(p_direction<double>(H.axes[j]))),
                            tol);
        }
    });
}

// Neighbouring R/H pair (k, k+1) parallel; false when either is P.
std::vector<bool> neighbour_parallel(const Linkage& L, double tol) {
    return with_frames(L, [&](const auto& frames, bool) {
        std::vector<bool> out(frames.size(), false);
        for (std::size_t k = 0; k < frames.size(); ++k)
            if (frames[k].self && frames[k].next) out[k] = directions_parallel(*frames[k].self, *frames[k].next, tol);
        return out;
    });
}

}  // namespace

SubgroupCheck check_n_minus_3(const Linkage& L, double tol) {
    SubgroupCheck out;
    const std::size_t n = L.size();
    out.applies = n >= 5;
    if (!out.applies) out.evidence.push_back("n = 4: mobility n-3 is not tied to a subgroup");
    if (L.count(JointKind::H) > 0) {
        out.evidence.push_back("H joints present");
        return out;
    }
    const DirectionFacts d = directions(L, tol);
    if (d.has_rotational && d.rotational_parallel && d.p_perpendicular) {
        out.verdict = SubgroupVerdict::SE2;
        out.evidence.push_back("all R axes parallel");
        if (L.count(JointKind::P) > 0) out.evidence.push_back("all P directions perpendicular to them");
        return out;
    }
    if (L.count(JointKind::P) > 0) return out;
    with_frames(L, [&](const auto& frames, bool) {
        using S = FrameScalar<decltype(frames)>;
        const Cores<S> c = dh_cores(frames, tol);
        if (!all_spherical(c, tol)) return 0;
        const Line<S>& a = *frames[0].self;
        const Line<S>& b = *frames[0].next;
        const Vec3<S> p = a.closest_point() + foot_parameter(a, b) * a.direction;
        out.verdict = SubgroupVerdict::SO3;
        out.center = Vec3<double>{scalar_cast<double>(p[0]), scalar_cast<double>(p[1]), scalar_cast<double>(p[2])};
        out.evidence.push_back("all axes through one point (frame of joint 0)");
        return 0;
    });
    return out;
}

NMinus5Result necessary_n_minus_5(const Linkage& L, double tol) {
    if (L.size() < 7 || L.count(JointKind::R) != L.size()) throw std::invalid_argument("scan needs nR with n >= 7");
    return with_frames(L, [&](const auto& frames, bool) {
        const std::size_t n = frames.size();
        NMinus5Result out;
        for (std::size_t k = 0; k < n; ++k) {
            const auto& a = *frames[k].self;
            const auto& b = *frames[k].next;
            if (directions_parallel(a, b, tol))
                out.structure.push_back({StructureItem::Kind::Parallel, {k, (k + 1) % n}});
            else if (coplanar(a, b, tol))
                out.structure.push_back({StructureItem::Kind::Concurrent, {k, (k + 1) % n}});
        }
        for (std::size_t k = 0; k < n; ++k) {
            const auto& f = frames[k];
            if (directions_parallel(*f.prev, *f.self, tol) || directions_parallel(*f.self, *f.next, tol)) continue;
            const BennettSign s = bennett_from_lines(*f.prev, *f.self, *f.next, tol);
            if (s != BennettSign::No)
                out.structure.push_back({StructureItem::Kind::BennettTriple, {(k + n - 1) % n, k, (k + 1) % n}, s});
        }
        out.violates = out.structure.empty();
        return out;
    });
}

IsomericCheck check_isomeric(const Linkage& L, std::size_t k, const FixedElement& h_new, double tol) {
    if (k >= L.size()) throw std::out_of_range("joint index out of range");
    const std::size_t n = L.size();
    for (std::size_t j : {(k + n - 1) % n, k, (k + 1) % n})
        if (L.joints[j].kind != JointKind::R) throw std::invalid_argument("isomeric replacement needs R joints");
    auto run = [&](const auto& frames, bool exact) {
        using S = FrameScalar<decltype(frames)>;
        IsomericCheck out;
        const JointFrame<S>& f = frames[k];
        const Line<S> hn = line_of<S>(h_new);
        if (directions_parallel(*f.prev, *f.self, tol) || directions_parallel(*f.self, *f.next, tol)) {
            out.reason = "neighbouring axes are parallel";
            return out;
        }
        out.triple = bennett_from_lines(*f.prev, *f.self, *f.next, tol);
        if (out.triple == BennettSign::No) {
            out.reason = "joints " + std::to_string((k + n - 1) % n) + ", " + std::to_string(k) + ", " +
                         std::to_string((k + 1) % n) + " are not a Bennett triple";
            return out;
        }
        if (same_line(hn, *f.self, tol)) {
            out.reason = "new axis equals the old one";
            return out;
        }
        try {
            out.loop = bennett_on_frames(loop_frames(std::vector<Line<S>>{*f.prev, *f.self, *f.next, hn}), exact, tol);
        } catch (const std::invalid_argument& e) {
            out.reason = e.what();
            return out;
        }
        if (out.loop->kind != "bennett") {
            out.reason = out.loop->holds ? "loop is degenerate (" + out.loop->kind + ")" : "loop is not a Bennett loop";
            return out;
        }
        out.valid = true;
        return out;
    };
    if (exact_geometry(L) && h_new.exact) {
        std::optional<std::vector<JointFrame<Rational>>> fr;
        try {
            fr = joint_frames<Rational>(L);
            (void)line_of<Rational>(h_new);
        } catch (const std::invalid_argument&) {
            fr.reset();
        }
        if (fr) return run(*fr, true);
    }
    return run(joint_frames<double>(L), false);
}

Linkage isomeric_replace(const Linkage& L, std::size_t k, const FixedElement& h_new, double tol) {
    const IsomericCheck c = check_isomeric(L, k, h_new, tol);
    if (!c.valid) throw std::invalid_argument("isomeric replacement rejected: " + c.reason);
    Linkage out = L;
    out.joints[k] = Joint::revolute(h_new);
    out.name = L.name.empty() ? std::string() : L.name + "-iso" + std::to_string(k);
    return out;
}

namespace {

MatchedCase subgroup_case(const SubgroupCheck& s, std::size_t n) {
    MatchedCase m;
    m.rule = "joint motions in one 3-dimensional subgroup";
    m.case_label = std::string(to_string(s.verdict));
    m.strength = Strength::NecessaryAndSufficient;
    m.stated_mobility = static_cast<int>(n) - 3;
    m.evidence = s.evidence;
    return m;
}

// Exactly two P joints at j and j+3 with the R/H pairs between them parallel
// and the P directions parallel. Returns j.
std::optional<std::size_t> two_p_pattern(const Linkage& L, const std::vector<bool>& par, double tol) {
    if (L.size() != 6 || L.count(JointKind::P) != 2) return std::nullopt;
    for (std::size_t j = 0; j < 3; ++j) {
        if (L.joints[j].kind != JointKind::P || L.joints[j + 3].kind != JointKind::P) continue;
        if (par[j + 1] && par[(j + 4) % 6] && p_parallel(L, j, j + 3, tol)) return j;
    }
    return std::nullopt;
}

// One P joint at j, h_{j+1} || h_{j+2} and h_{j+3} || h_{j+4}. Returns j.
std::optional<std::size_t> one_p_pattern(const Linkage& L, const std::vector<bool>& par) {
    if (L.size() != 5 || L.count(JointKind::P) != 1 || L.count(JointKind::H) != 0) return std::nullopt;
    for (std::size_t j = 0; j < 5; ++j)
        if (L.joints[j].kind == JointKind::P && par[(j + 1) % 5] && par[(j + 3) % 5]) return j;
    return std::nullopt;
}

}  // namespace

NMinus4Verdict classify_n_minus_4(const Linkage& L, double tol) {
    const std::size_t n = L.size();
    if (n < 6) throw std::invalid_argument("n-4 classification needs n >= 6");
    const int ni = static_cast<int>(n);
    NMinus4Verdict out;
    out.mobility_bound = ni - 3;
    const SubgroupCheck sub = check_n_minus_3(L, tol);
    if (sub.verdict != SubgroupVerdict::No) {
        out.matches = true;
        out.match = subgroup_case(sub, n);
        out.predicted_mobility = ni - 3;
        out.evidence = sub.evidence;
        return out;
    }
    const std::size_t nP = L.count(JointKind::P), nH = L.count(JointKind::H);
    const DirectionFacts dir = directions(L, tol);
    MatchedCase m;
    m.stated_mobility = ni - 4;
    m.strength = Strength::Necessary;
    if (n == 6) {
        if (nP == 0 && nH == 0) {
            const SixRResult r = classify_6r_mobility2(L, tol);
            if (r.match != SixRCase::NoMatch) {
                m.rule = "6R with equal Bennett ratios and zero offsets";
                m.case_label = r.match == SixRCase::TwoBennetts ? "two-bennetts" : "second-pattern";
                m.view = r.view;
                m.evidence = r.evidence;
                out.match = m;
            }
        } else {
            const std::vector<bool> par = neighbour_parallel(L, tol);
            if (dir.has_rotational && dir.rotational_parallel && (nH > 0 || nP >= 2)) {
                m.rule = nH > 0 ? "6-linkage with H joints" : "6-linkage with P joints";
                m.case_label = "rotational-axes-parallel";
                m.evidence.push_back("all R/H axes parallel");
                if (nH == 0) m.evidence.push_back(std::to_string(nP) + " P joints");
                out.match = m;
            } else if (auto j = two_p_pattern(L, par, tol)) {
                m.rule = nH > 0 ? "6-linkage with H joints" : "6-linkage with P joints";
                m.case_label = "two-p-joints";
                const std::size_t a = *j;
                m.evidence.push_back("P joints " + std::to_string(a) + " and " + std::to_string(a + 3) +
                                     " with parallel directions");
                m.evidence.push_back("h" + std::to_string(a + 1) + " || h" + std::to_string(a + 2));
                m.evidence.push_back("h" + std::to_string((a + 4) % 6) + " || h" + std::to_string((a + 5) % 6));
                out.match = m;
            }
        }
        if (out.match) {
            out.matches = true;
            out.predicted_mobility = 2;
            out.mobility_bound = 2;
            out.evidence = out.match->evidence;
        } else {
            out.mobility_bound = 1;
            out.evidence.push_back("no mobility-2 case of 6-linkages matches");
        }
        return out;
    }
    // n > 6
    if (nP == 0 && nH == 0) {
        out.mobility_bound = ni - 5;
        out.evidence.push_back("nR with n > 6 and axes not concurrent: mobility below n-4");
        const NMinus5Result r = necessary_n_minus_5(L, tol);
        if (r.violates) {
            out.mobility_bound = ni - 6;
            out.evidence.push_back("no parallel or concurrent neighbours and no Bennett triples: mobility at most n-6");
        }
        return out;
    }
    const bool ok = dir.has_rotational && dir.rotational_parallel && (nH > 0 || nP >= 2);
    if (ok) {
        m.rule = nH > 0 ? "n-linkage with H joints" : "n-linkage with P joints";
        m.case_label = "rotational-axes-parallel";
        m.evidence.push_back("all R/H axes parallel");
        if (nH == 0) m.evidence.push_back(std::to_string(nP) + " P joints");
        out.matches = true;
        out.match = m;
        out.predicted_mobility = ni - 4;
        out.mobility_bound = ni - 4;
        out.evidence = m.evidence;
    } else {
        out.mobility_bound = ni - 5;
        out.evidence.push_back("R/H axes not all parallel (or fewer than two P joints): mobility below n-4");
    }
    return out;
}

namespace {

std::vector<std::vector<std::size_t>> parallel_runs(const std::vector<bool>& par) {
    const std::size_t n = par.size();
    std::vector<std::vector<std::size_t>> out;
    if (n == 0) return out;
    if (std::all_of(par.begin(), par.end(), [](bool b) { return b; })) {
        out.push_back(all_rows(n));
        return out;
    }
    std::size_t start = 0;
    while (par[(start + n - 1) % n]) start = (start + n - 1) % n;  // a run boundary
    for (std::size_t i = 0; i < n;) {
        const std::size_t k = (start + i) % n;
        if (!par[k]) {
            ++i;
            continue;
        }
        std::vector<std::size_t> run{k};
        while (i < n && par[(start + i) % n]) {
            run.push_back((start + i + 1) % n);
            ++i;
        }
        out.push_back(run);
    }
    return out;
}

struct Rules {
    std::vector<MatchedCase> matches;
    int bound = 0;
    std::vector<std::string> reasons;
};

Rules apply_rules(const Linkage& L, double tol) {
    const std::size_t n = L.size();
    const int ni = static_cast<int>(n);
    Rules r;
    r.bound = std::max(ni - 3, 0);
    r.reasons.push_back("at most n-3");
    const std::size_t nR = L.count(JointKind::R), nP = L.count(JointKind::P), nH = L.count(JointKind::H);
    if (n >= 6) {
        const NMinus4Verdict v = classify_n_minus_4(L, tol);
        if (v.match) r.matches.push_back(*v.match);
        if (v.mobility_bound < r.bound) {
            r.bound = v.mobility_bound;
            r.reasons.push_back(v.evidence.empty() ? "n-4 classification" : v.evidence.back());
        }
        return r;
    }
    if (n == 5) {
        const SubgroupCheck s = check_n_minus_3(L, tol);
        if (s.verdict != SubgroupVerdict::No) {
            r.matches.push_back(subgroup_case(s, n));
            return r;
        }
        if (nH == 0) {
            r.bound = 1;
            r.reasons.push_back("no 3-dimensional subgroup: at most n-4");
        }
        if (nR == 5) {
            const GoldbergCheck g = check_goldberg_5r(L, tol);
            if (g.verdict == GoldbergVerdict::PassesNecessary) {
                MatchedCase m;
                m.rule = "5R mobile loop";
                m.case_label = "goldberg-necessary";
                m.view = g.view;
                m.strength = Strength::Necessary;
                m.stated_mobility = 1;
                m.evidence = g.evidence;
                r.matches.push_back(m);
            } else {
                r.bound = 0;
                r.reasons.push_back("5R conditions fail: rigid");
            }
        } else if (nP >= 1 && nH == 0) {
            const std::vector<bool> par = neighbour_parallel(L, tol);
            const DirectionFacts d = directions(L, tol);
            if (auto j = one_p_pattern(L, par)) {
                MatchedCase m;
                m.rule = "5-linkage with P joints";
                m.case_label = "parallel-pairs";
                m.strength = Strength::Necessary;
                m.stated_mobility = 1;
                const std::size_t a = *j;
                m.evidence.push_back("P joint " + std::to_string(a));
                m.evidence.push_back("h" + std::to_string((a + 1) % 5) + " || h" + std::to_string((a + 2) % 5));
                m.evidence.push_back("h" + std::to_string((a + 3) % 5) + " || h" + std::to_string((a + 4) % 5));
                r.matches.push_back(m);
            } else if (d.has_rotational && d.rotational_parallel) {
                MatchedCase m;
                m.rule = "5-linkage with P joints";
                m.case_label = "rotational-axes-parallel";
                m.strength = Strength::Necessary;
                m.evidence.push_back("all R axes parallel");
                r.matches.push_back(m);
            } else {
                r.bound = 0;
                r.reasons.push_back("no mobile 5-linkage pattern: rigid");
            }
        }
        return r;
    }
    if (n == 4 && nR == 4) {
        const BennettCheck b = check_bennett_4r(L, tol);
        if (b.holds) {
            MatchedCase m;
            m.rule = "4R mobile loop";
            m.case_label = b.kind;
            m.view = b.view;
            m.strength = Strength::NecessaryAndSufficient;
            m.stated_mobility = 1;
            m.evidence = b.evidence;
            r.matches.push_back(m);
        } else {
            r.bound = 0;
            r.reasons.push_back("not Bennett, planar or spherical: rigid");
        }
    }
    return r;
}

struct FreezeTask {
    std::size_t joint;
    double value;
    std::uint64_t seed;
};

FreezeEntry run_freeze(const Linkage& L, const FreezeTask& t, int samples) {
    FreezeEntry e;
    e.joint = t.joint;
    e.value = t.value;
    const Linkage F = freeze_joint<double>(L, t.joint, Param<double>(t.value));
    const MobilityEstimate m = mobility_estimate_serial(F, samples, t.seed);
    e.mobility = m.mobility;
    if (m.mobility)
        for (std::size_t j : m.frozen_joints) e.co_frozen.push_back(j < t.joint ? j : j + 1);
    return e;
}

}  // namespace

ClassificationReport consistency_check(const Linkage& L, const ConsistencyOptions& opt) {
    const std::size_t n = L.size();
    const int ni = static_cast<int>(n);
    ClassificationReport rep;
    rep.linkage_id = L.name;
    rep.signature = joint_signature(L);
    rep.dh = dh_table(L, opt.tol);

    std::vector<bool> par(n, false);
    for (std::size_t k = 0; k < n; ++k) par[k] = rep.dh.rows[k] && rep.dh.rows[k]->parallel;
    for (auto& g : parallel_runs(par))
        if (g.size() >= 2) rep.parallel_groups.push_back(g);
    if (n >= 5) {
        const SubgroupCheck s = check_n_minus_3(L, opt.tol);
        if (s.verdict == SubgroupVerdict::SO3) rep.concurrency_point = s.center;
    }
    if (n >= 3)
        with_frames(L, [&](const auto& frames, bool) {
            for (std::size_t k = 0; k < n; ++k) {
                const auto& f = frames[k];
                if (!f.prev || !f.self || !f.next) continue;
                if (directions_parallel(*f.prev, *f.self, opt.tol) || directions_parallel(*f.self, *f.next, opt.tol))
                    continue;
                const BennettSign s = bennett_from_lines(*f.prev, *f.self, *f.next, opt.tol);
                if (s != BennettSign::No)
                    rep.bennett_triples.push_back(
                        {StructureItem::Kind::BennettTriple, {(k + n - 1) % n, k, (k + 1) % n}, s});
            }
            return 0;
        });

    Rules rules = apply_rules(L, opt.tol);
    rep.matches = rules.matches;
    rep.mobility_bound = rules.bound;
    rep.bound_reasons = rules.reasons;
    for (const auto& m : rep.matches)
        if (m.stated_mobility) {
            rep.predicted_mobility = m.stated_mobility;
            break;
        }

    const MobilityEstimate est = opt.parallel ? mobility_estimate(L, opt.samples, opt.seed)
                                              : mobility_estimate_serial(L, opt.samples, opt.seed);
    rep.estimated_mobility = est.mobility;
    rep.histogram = est.histogram;
    rep.frozen_joints = est.frozen_joints;

    if (est.mobility) {
        const int m = *est.mobility;
        if (m > rep.mobility_bound)
            rep.contradictions.push_back("estimated mobility " + std::to_string(m) + " exceeds the bound " +
                                         std::to_string(rep.mobility_bound) + " (" + rep.bound_reasons.back() + ")");
        for (const auto& c : rep.matches)
            if (c.stated_mobility && *c.stated_mobility != m)
                rep.contradictions.push_back("matched " + c.rule + " (" + c.case_label + ") states mobility " +
                                             std::to_string(*c.stated_mobility) + ", estimated " + std::to_string(m));
    }

    if (opt.freeze_scan && est.mobility && *est.mobility > 0) {
        std::vector<const MobilitySample*> modal;
        for (const auto& s : est.samples)
            if (s && s->regular && s->null_dim == *est.mobility) modal.push_back(&*s);
        std::vector<FreezeTask> tasks;
        for (std::size_t k = 0; k < n; ++k) {
            if (std::find(est.frozen_joints.begin(), est.frozen_joints.end(), k) != est.frozen_joints.end()) continue;
            for (int v = 0; v < opt.freeze_values && v < static_cast<int>(modal.size()); ++v)
                tasks.push_back({k, modal[static_cast<std::size_t>(v)]->config[k].value,
                                 derive_seed(opt.seed, 1000 + 64 * k + static_cast<std::size_t>(v))});
        }
        rep.freeze_scan.resize(tasks.size());
        if (opt.parallel) {
#pragma omp parallel for schedule(dynamic)
            for (std::size_t i = 0; i < tasks.size(); ++i) rep.freeze_scan[i] = run_freeze(L, tasks[i], opt.freeze_samples);
        } else {
            for (std::size_t i = 0; i < tasks.size(); ++i) rep.freeze_scan[i] = run_freeze(L, tasks[i], opt.freeze_samples);
        }
        const int m = *est.mobility;
        for (const auto& e : rep.freeze_scan) {
            if (!e.mobility) continue;
            const std::string who = "freezing joint " + std::to_string(e.joint) + " at " + fmt(e.value);
            if (*e.mobility != m - 1)
                rep.contradictions.push_back(who + " gives mobility " + std::to_string(*e.mobility) + ", expected " +
                                             std::to_string(m - 1));
            // Parallel P joints can keep moving with every R joint locked, so the
            // co-freeze limit is only applied to loops without P joints.
            if (n > 5 && m == ni - 4 && L.count(JointKind::P) == 0 && e.co_frozen.size() >= 2)
                rep.contradictions.push_back(who + " co-freezes " + std::to_string(e.co_frozen.size()) + " joints");
        }
    }
    return rep;
}

}  // namespace overcon
