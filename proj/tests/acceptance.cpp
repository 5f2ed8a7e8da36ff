// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "overcon/abc.hpp"
#include "overcon/bonds.hpp"
#include "overcon/classify.hpp"
#include "overcon/document.hpp"
#include "overcon/geometry.hpp"
#include "overcon/mobility.hpp"
#include "support.hpp"

using namespace overcon;
using namespace testsupport;

namespace {

// Tolerances.
constexpr double kDhTol = 1e-9;
constexpr double kPredicateTol = 1e-9;
constexpr double kRoundTripTol = 1e-10;
constexpr double kAbcTol = 1e-9;

using DQ = DualQuaternion<double>;
using CQ = Quaternion<Cplx>;
using CDQ = DualQuaternion<Cplx>;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

ExactComplexConfiguration gauss(std::initializer_list<const char*> ts) {
    ExactComplexConfiguration c;
    for (const char* t : ts) c.emplace_back(parse_gauss_rational(t));
    return c;
}

ExactConfiguration rational(std::initializer_list<const char*> ts) {
    ExactConfiguration c;
    for (const char* t : ts) c.emplace_back(parse_rational(t));
    return c;
}

bool product_real_nonzero(const Linkage& L, const ExactConfiguration& c) {
    const auto p = loop_product(L, c);
    for (std::size_t k = 1; k < 8; ++k)
        if (p.coord(k) != 0) return false;
    return p.coord(0) != 0;
}

bool product_zero(const Linkage& L, const ExactComplexConfiguration& c) {
    const auto p = bond_product(L, c);
    for (std::size_t k = 0; k < 8; ++k)
        if (!(p.coord(k) == GaussRational(0))) return false;
    return true;
}

std::vector<FixedElement> axes_of(const Linkage& L, std::initializer_list<std::size_t> idx) {
    std::vector<FixedElement> out;
    for (auto k : idx) out.push_back(L.joints[k].axis);
    return out;
}

// --- criteria ---

void parallel_pair_loop(Verdict& v) {
    const Linkage L = corpus_document("p4r-parallel-pairs").linkage;
    v.require(product_real_nonzero(L, rational({"-1", "1", "-1", "1", "-1"})), "exact closure at (-1,1,-1,1,-1)");
    int ones = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto e = mobility_estimate(L, 8, seed);
        if (e.mobility == 1) ++ones;
    }
    v.detail << " mobility 1 on " << ones << "/20 seeds;";
    v.require(ones == 20, "mobility 1 on every seed");
    const auto bond = gauss({"0", "i", "-i", "i", "-i"});
    const bool bonded = is_bond(L, bond) && product_zero(L, bond);
    const auto att = attachment_set(L, bond);
    v.detail << " bond (0,i,-i,i,-i) " << (bonded ? "vanishes" : "does not vanish") << ", attachment size "
             << att.size() << ";";
    v.require(bonded, "bond vanishes exactly");
    v.require(att == std::vector<std::size_t>{0, 1, 2, 3, 4}, "attachment is every joint");
    const auto& j = L.joints;
    const bool p12 = are_parallel(*j[1].axis.exact, *j[2].axis.exact);
    const bool p34 = are_parallel(*j[3].axis.exact, *j[4].axis.exact);
    ConsistencyOptions opt;
    opt.freeze_scan = false;
    const auto r = consistency_check(L, opt);
    const std::vector<std::vector<std::size_t>> groups{{1, 2}, {3, 4}};
    v.detail << " parallel pairs (1,2) " << p12 << " (3,4) " << p34;
    v.require(p12 && p34, "parallel pairs detected by the predicate");
    v.require(r.parallel_groups == groups, "parallel groups in the report");
}

void two_bennett_loop(Verdict& v) {
    const Linkage L = corpus_document("6r-two-bennett").linkage;
    v.require(product_real_nonzero(L, rational({"0", "-3/2", "1", "4/7", "1", "-2"})), "exact closure");
    const auto e = mobility_estimate(L, 20, 1);
    v.detail << " mobility " << (e.mobility ? std::to_string(*e.mobility) : "inconclusive") << ";";
    v.require(e.mobility == 2, "mobility 2");

    const DHTable t = dh_table(L, kDhTol);
    bool ratios = true, offsets = true;
    for (const auto& r : t.rows) {
        ratios = ratios && r && !r->parallel && std::abs(std::abs(r->b) - std::abs(t.rows[0]->b)) <= kDhTol;
        offsets = offsets && r && r->o_defined && std::abs(r->o) <= kDhTol;
    }
    auto c = [&](std::size_t k) { return t.rows[k]->c; };
    const bool cosines = ratios && std::abs(c(0) - c(2)) <= kDhTol && std::abs(c(1) - c(4)) <= kDhTol &&
                         std::abs(c(3) - c(5)) <= kDhTol;
    v.detail << " equal ratios " << ratios << ", zero offsets " << offsets << ", cosine pattern " << cosines << ";";
    v.require(ratios && offsets && cosines, "DH pattern");
    const auto six = classify_6r_mobility2(L, kDhTol);
    v.require(six.match == SixRCase::TwoBennetts, "two-Bennett case from the classifier");

    const auto b4 = check_bennett_loop(axes_of(L, {0, 1, 2, 3}), kDhTol);
    v.detail << " joints 0..3 " << b4.kind << ";";
    v.require(b4.holds && b4.kind == "bennett", "Bennett sub-loop on joints 0..3");

    int family = 0;
    for (const char* t4 : {"0", "1", "-5/2", "3/7-2i"}) {
        const auto b = gauss({"1/3-1/3i", "-i", "-1/2+i", t4, "-1-i", "i"});
        if (is_bond(L, b) && product_zero(L, b)) ++family;
    }
    v.detail << " one-parameter bond family vanishes at " << family << "/4 values of t3;";
    v.require(family == 4, "bond family");

    const auto& known = corpus_document("6r-two-bennett").known_bonds;
    int printed = 0;
    for (const auto& b : known)
        if (is_bond(L, b) && product_zero(L, b)) ++printed;
    v.detail << " listed bonds vanishing " << printed << "/" << known.size();
    v.require(known.size() == 8 && printed == 8, "listed bonds");
}

void isomeric_variants(Verdict& v) {
    const Linkage L = corpus_document("6r-two-bennett").linkage;
    const Linkage A = corpus_document("6r-two-bennett-iso0").linkage;
    const Linkage B = corpus_document("6r-two-bennett-iso3").linkage;
    for (const auto& [k, R] : {std::pair<std::size_t, const Linkage*>{0, &A}, {3, &B}}) {
        const auto chk = check_isomeric(L, k, R->joints[k].axis, kDhTol);
        v.detail << " joint " << k << ": " << (chk.valid ? "valid" : chk.reason);
        v.require(chk.valid, "preconditions for joint " + std::to_string(k));
        if (!chk.valid) continue;
        const Linkage iso = isomeric_replace(L, k, R->joints[k].axis, kDhTol);
        const auto e = mobility_estimate(iso, 20, 1);
        v.detail << ", mobility " << (e.mobility ? std::to_string(*e.mobility) : "inconclusive") << ";";
        v.require(e.mobility == 2, "mobility 2 after replacing joint " + std::to_string(k));
    }
}

void predicate_equivalence(Verdict& v) {
    std::mt19937_64 rng(4001);
    int disagree_conc = 0, disagree_bennett = 0, round_trip = 0;
    int positives_conc = 0, positives_bennett = 0;
    for (int n = 0; n < 1000; ++n) {
        const DQ a = random_axis(rng);
        DQ b;
        switch (n % 3) {
            case 0: b = random_axis(rng); break;
            case 1: b = axis_through(axis_of(a).closest_point() + uniform(rng, -2, 2) * axis_of(a).direction,
                                     random_unit(rng)); break;
            default: b = axis_through(random_point(rng), axis_of(a).direction); break;
        }
        const bool m = are_concurrent(a, b, kPredicateTol);
        if (m) ++positives_conc;
        if (m != concurrent_via_cone(a, b, kPredicateTol)) ++disagree_conc;
    }
    for (int n = 0; n < 1000; ++n) {
        std::array<DQ, 3> t;
        if (n % 3 == 0) t = {random_axis(rng), random_axis(rng), random_axis(rng)};
        else t = bennett_triple(rng, n % 3 == 1 ? 1 : -1);
        const BennettSign m = is_bennett_triple(t[0], t[1], t[2], kPredicateTol);
        if (m != BennettSign::No) ++positives_bennett;
        if (m != bennett_via_cone(t[0], t[1], t[2], kPredicateTol)) ++disagree_bennett;
    }
    for (int n = 0; n < 1000; ++n) {
        const DQ h = random_axis(rng);
        if (!projectively_equal(abs_point_to_rotation(line_to_abs_point(h)), h, kRoundTripTol)) ++round_trip;
    }
    v.detail << " concurrency disagreements " << disagree_conc << "/1000 (" << positives_conc
             << " concurrent); Bennett disagreements " << disagree_bennett << "/1000 (" << positives_bennett
             << " Bennett); line round trip failures " << round_trip << "/1000";
    v.require(disagree_conc == 0 && disagree_bennett == 0, "zero disagreements");
    v.require(round_trip == 0, "round trip");
}

void coupling_spaces(Verdict& v) {
    std::mt19937_64 rng(5002);
    int wrong_dim = 0, study_mismatch = 0, concurrent = 0;
    for (int n = 0; n < 200; ++n) {
        const DQ a = random_axis(rng);
        DQ b;
        switch (n % 3) {
            case 0: b = random_axis(rng); break;
            case 1: b = axis_through(axis_of(a).closest_point() + uniform(rng, -2, 2) * axis_of(a).direction,
                                     random_unit(rng)); break;
            default: b = axis_through(random_point(rng), axis_of(a).direction); break;
        }
        if (are_compatible(a, b)) continue;
        if (coupling_space_dim({a, b}) != 4) ++wrong_dim;
        const bool c = are_concurrent(a, b);
        if (c) ++concurrent;
        if (coupling_in_study(a, b) != c) ++study_mismatch;
    }
    int triple_dim = 0;
    for (int n = 0; n < 50; ++n) {
        const auto t = bennett_triple(rng, n % 2 ? 1 : -1);
        if (coupling_space_dim({t[0], t[1], t[2]}) != 6) ++triple_dim;
    }
    v.detail << " pair dimension != 4: " << wrong_dim << "/200; Study containment mismatches " << study_mismatch
             << " (" << concurrent << " concurrent); Bennett triple dimension != 6: " << triple_dim << "/50";
    v.require(wrong_dim == 0 && study_mismatch == 0 && triple_dim == 0, "coupling dimensions");
}

void seven_r_harness(Verdict& v) {
    std::mt19937_64 rng(6003);
    int violates = 0, low = 0;
    for (int n = 0; n < 50; ++n) {
        const Linkage L = random_nr(rng, 7);
        if (necessary_n_minus_5(L).violates) ++violates;
        const auto e = mobility_estimate(L, 6, static_cast<std::uint64_t>(n + 1));
        if (e.mobility && *e.mobility <= 1) ++low;
    }
    v.detail << " random 7R: VIOLATES " << violates << "/50, mobility <= 1 on " << low << "/50;";
    v.require(violates == 50 && low == 50, "random 7R");
    for (const char* family : {"planar", "spherical"}) {
        for (int n = 6; n <= 9; ++n) {
            const Linkage L = corpus_document(std::string(family) + "-" + std::to_string(n) + "r").linkage;
            const auto e = mobility_estimate(L, 8, 1);
            const auto s = check_n_minus_3(L);
            const bool ok = e.mobility == n - 3 && s.verdict != SubgroupVerdict::No;
            v.detail << " " << family << "-" << n << "r " << (e.mobility ? std::to_string(*e.mobility) : "?");
            v.require(ok, std::string(family) + "-" + std::to_string(n) + "r mobility n-3");
        }
    }
}

void freeze_scan(Verdict& v) {
    const Linkage L = corpus_document("6r-two-bennett").linkage;
    ConsistencyOptions opt;
    opt.samples = 12;
    opt.freeze_values = 5;
    const auto r = consistency_check(L, opt);
    int mobility_one = 0, co_ok = 0;
    for (const auto& f : r.freeze_scan) {
        if (f.mobility == 1) ++mobility_one;
        if (f.co_frozen.size() <= 1) ++co_ok;
    }
    const int total = static_cast<int>(r.freeze_scan.size());
    v.detail << " " << total << " frozen sub-loops: mobility 1 on " << mobility_one << ", at most one co-frozen joint on "
             << co_ok << "; contradictions " << r.contradictions.size();
    v.require(total == 30, "five values per joint");
    v.require(mobility_one == total && co_ok == total, "freeze results");
}

CQ inv(const CQ& q) { return (1.0 / q.norm()) * q.conj(); }
CQ b0() { return CQ(Cplx(0, 1)) - CQ(Cplx(0), Cplx(1), Cplx(0), Cplx(0)); }
CQ b0_left() { return CQ(Cplx(0, 1)) + CQ(Cplx(0), Cplx(1), Cplx(0), Cplx(0)); }
CDQ prim(const CQ& q) { return {q, CQ()}; }
CDQ random_cdq(std::mt19937_64& rng) { return {random_cquat(rng), random_cquat(rng)}; }

void abc_suite(Verdict& v) {
    std::mt19937_64 rng(8005);
    int not_applicable = 0, mismatched = 0;
    std::array<int, 3> counts{};
    for (int n = 0; n < 500; ++n) {
        const CQ u = random_cquat(rng), w = random_cquat(rng);
        CDQ a, b, c;
        AbcCase built;
        switch (n % 3) {
            case 0:
                b = prim(u * b0() * w);
                a = prim(random_cquat(rng) * b0_left() * inv(u));
                c = random_cdq(rng) * prim(b0()) * random_cdq(rng);
                built = AbcCase::AbZero;
                break;
            case 1:
                b = prim(u * b0() * w);
                a = random_cdq(rng) * prim(b0()) * random_cdq(rng);
                c = prim(inv(w) * b0_left() * random_cquat(rng));
                built = AbcCase::BcZero;
                break;
            default:
                b = prim(u * b0() * w);
                a = prim(b0_left()) * CDQ(inv(u), random_cquat(rng));
                c = CDQ(inv(w), random_cquat(rng)) * prim(b0_left());
                built = AbcCase::BothEps;
                break;
        }
        // Move the construction by invertible factors; each case is preserved.
        const CDQ g = random_cdq(rng), k = random_cdq(rng), m = random_cdq(rng), h = random_cdq(rng);
        const CDQ a2 = g * a * k, b2 = inverse(k) * b * m, c2 = inverse(m) * c * h;
        const AbcCase got = abc_case(a2, b2, c2, kAbcTol);
        if (got == AbcCase::NotApplicable) ++not_applicable;
        else ++counts[static_cast<std::size_t>(got)];
        if (got != built) ++mismatched;
    }
    v.detail << " AB_ZERO " << counts[0] << ", BC_ZERO " << counts[1] << ", BOTH_EPS " << counts[2]
             << ", NOT_APPLICABLE " << not_applicable << ", differing from construction " << mismatched;
    v.require(not_applicable == 0, "no NOT_APPLICABLE");
    v.require(mismatched == 0, "case matches construction");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
        {"P4R loop: exact closure, mobility 1, full-attachment bond, parallel pairs", parallel_pair_loop},
        {"two-Bennett 6R: exact closure, mobility 2, DH pattern, Bennett sub-loop, bonds", two_bennett_loop},
        {"isomeric replacements keep mobility 2", isomeric_variants},
        {"metric and cone predicates agree; line round trip", predicate_equivalence},
        {"coupling space dimensions and Study containment", coupling_spaces},
        {"random 7R violate the structure scan; planar and spherical reach n-3", seven_r_harness},
        {"freeze scan of the two-Bennett 6R", freeze_scan},
        {"vanishing triple products classify into a case", abc_suite},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!v.pass) ++failed;
        std::printf("%s %zu %s (%.2fs):%s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    v.detail.str().c_str());
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
