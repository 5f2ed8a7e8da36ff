#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "overcon/document.hpp"
#include "support.hpp"

using namespace overcon;
using namespace testsupport;

namespace {

using DQR = DualQuaternion<Rational>;

bool is_real_nonzero(const DQR& p) {
    for (std::size_t k = 1; k < 8; ++k)
        if (p.coord(k) != 0) return false;
    return p.coord(0) != 0;
}

std::vector<oracle::V8<Rational>> oracle_axes(const Linkage& L) {
    std::vector<oracle::V8<Rational>> out;
    for (const auto& j : L.joints) out.push_back(j.axis.exact->coords());
    return out;
}

std::vector<Rational> values(const ExactConfiguration& c) {
    std::vector<Rational> v;
    for (const auto& p : c) v.push_back(p.value);
    return v;
}

// Closed configurations of the P4R loop: t1 = s, t3 = s, t2 = t4 = -s,
// t0 = -(s^2 + 1)/(s + 1).
ExactConfiguration p4r_closed(const Rational& s) {
    return {Param<Rational>(-(s * s + 1) / (s + 1)), s, -s, s, -s};
}

}  // namespace

TEST_CASE("joint motion examples") {
    auto R = Joint::revolute(exact_axis({"1", "0", "0"}, {"0", "0", "0"}));
    auto m = joint_motion(R, Param<Rational>(1));
    CHECK(m == DQR({1, -1, 0, 0}, {}));
    CHECK(m.norm().a == 2);

    auto P = Joint::prismatic(Vec3<Rational>{0, 1, 1});
    auto mp = joint_motion(P, Param<Rational>(2));
    CHECK(mp == DQR({2, 0, 0, 0}, {0, 0, -1, -1}));
    // Under the adopted action t - eps p translates by -2p/t.
    auto shift = act_on_point(mp, Vec3<Rational>{0, 0, 0});
    CHECK(shift == Vec3<Rational>{0, -1, -1});
    CHECK_THROWS_AS(joint_motion(P, Param<Rational>(0)), std::domain_error);
    CHECK(joint_motion(R, Param<Rational>::at_infinity()) == DQR::one());

    auto H = Joint::helical(exact_axis({"0", "0", "1"}, {"0", "0", "0"}), 1);
    auto mh = joint_motion(H, Param<double>(M_PI));
    auto rot = act_on_point(mh, Vec3<double>{1, 0, 0});
    auto org = act_on_point(mh, Vec3<double>{0, 0, 0});
    CHECK(dist(rot, {-1, 0, -2 * M_PI}) < 1e-12);
    CHECK(dist(org, {0, 0, -2 * M_PI}) < 1e-12);
    // At angle 0 the H motion is the identity.
    CHECK(projectively_equal(joint_motion(H, Param<double>(0.0)), DualQuaternion<double>::one()));
}

TEST_CASE("H motion derivative matches finite differences") {
    auto H = Joint::helical(FixedElement::from_double(axis_through({1, -2, 0.5}, {0.6, 0.0, 0.8})), Rational(3, 4));
    for (double t : {-1.3, 0.2, 2.9}) {
        const double h = 1e-6;
        auto fd = (1.0 / (2 * h)) * (joint_motion(H, Param<double>(t + h)) - joint_motion(H, Param<double>(t - h)));
        CHECK(coord_norm(fd - joint_motion_derivative(H, t)) < 1e-8);
    }
}

TEST_CASE("loop product of the P4R fixture") {
    auto doc = corpus_document("p4r-parallel-pairs");
    ExactConfiguration c = doc.known_configs[0];
    auto p = loop_product(doc.linkage, c);
    CHECK(is_real_nonzero(p));
    CHECK(p.coords() == oracle::loop(oracle_axes(doc.linkage), values(c)));
    CHECK(is_closed(doc.linkage, c));
    for (const auto& kc : doc.known_configs) CHECK(is_real_nonzero(loop_product(doc.linkage, kc)));
}

TEST_CASE("loop product of the 6R fixture") {
    auto doc = corpus_document("6r-two-bennett");
    ExactConfiguration c = doc.known_configs[0];
    auto p = loop_product(doc.linkage, c);
    CHECK(is_real_nonzero(p));
    CHECK(p.coords() == oracle::loop(oracle_axes(doc.linkage), values(c)));
    CHECK(p.coord(0) == Rational(-65, 7));
}

TEST_CASE("every bundled known configuration closes exactly") {
    for (const auto& name : corpus_names()) {
        auto doc = corpus_document(name);
        validate_linkage(doc.linkage);
        for (const auto& c : doc.known_configs) {
            INFO(name);
            CHECK(is_real_nonzero(loop_product(doc.linkage, c)));
        }
    }
}

TEST_CASE("all R joints at infinity give the identity") {
    std::mt19937_64 rng(3);
    auto L = random_nr(rng, 7);
    Configuration c(7, Param<double>::at_infinity());
    CHECK(loop_product(L, c) == DualQuaternion<double>::one());
    auto r = closure_residual(L, c);
    CHECK_FALSE(r.zero_product);
    CHECK(r.norm() == 0.0);
}

TEST_CASE("closure residual") {
    auto p4r = corpus_document("p4r-parallel-pairs").linkage;
    auto two_bennett = corpus_document("6r-two-bennett").linkage;
    auto r1 = closure_residual(p4r, to_configuration({-1, 1, -1, 1, -1}));
    auto r2 = closure_residual(two_bennett, to_configuration({0, -1.5, 1, 4.0 / 7.0, 1, -2}));
    for (double v : r1.values) CHECK(std::abs(v) < 1e-12);
    for (double v : r2.values) CHECK(std::abs(v) < 1e-12);
    auto off = closure_residual(p4r, to_configuration({-1, 1, -1, 1, -0.9}));
    double worst = 0;
    for (double v : off.values) worst = std::max(worst, std::abs(v));
    CHECK(worst > 1e-3);
    Configuration bond(5);
    CHECK_FALSE(closure_residual(p4r, to_configuration({-1, 1, -1, 1, -1})).zero_product);
}

TEST_CASE("closure residual is invariant under scaling a factor") {
    std::mt19937_64 rng(12);
    auto L = random_nr(rng, 6);
    Configuration c = to_configuration({0.3, -1.2, 0.7, 1.9, -0.4, 1.1});
    auto base = closure_residual(L, c);
    auto scaled = L;
    scaled.links[2] = FixedElement::from_double(DualQuaternion<double>(-2.5));
    auto r = closure_residual(scaled, c);
    for (std::size_t k = 0; k < 7; ++k) CHECK(std::abs(r.values[k] - base.values[k]) < 1e-14);
}

TEST_CASE("freezing a joint of the 6R fixture") {
    auto L = corpus_document("6r-two-bennett").linkage;
    auto F = freeze_joint(L, 5, Param<Rational>(-2));
    CHECK(F.size() == 5);
    ExactConfiguration c{Param<Rational>(0), Rational(-3, 2), Rational(1), Rational(4, 7), Rational(1)};
    CHECK(is_real_nonzero(loop_product(F, c)));
}

TEST_CASE("freeze then evaluate equals evaluate on closed samples") {
    auto L = corpus_document("p4r-parallel-pairs").linkage;
    std::mt19937_64 rng(21);
    int tested = 0;
    while (tested < 100) {
        Rational s = random_rational(rng, 12, 9);
        if (s == -1) continue;
        ExactConfiguration c = p4r_closed(s);
        auto full = loop_product(L, c);
        REQUIRE(is_real_nonzero(full));
        std::size_t k = static_cast<std::size_t>(tested % 5);
        if (k == 0 && c[0].value == 0) continue;
        auto F = freeze_joint(L, k, c[k]);
        ExactConfiguration rest = c;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
        auto part = loop_product(F, rest);
        if (k == 0) CHECK(is_real_nonzero(part));
        else CHECK(part == full);
        ++tested;
    }
}

TEST_CASE("freezing every joint leaves a real scalar link") {
    auto L = corpus_document("6r-two-bennett").linkage;
    ExactConfiguration c = corpus_document("6r-two-bennett").known_configs[0];
    Linkage F = L;
    for (std::size_t k = 0; k < 6; ++k) F = freeze_joint(F, F.size() - 1, c[5 - k]);
    CHECK(F.size() == 0);
    REQUIRE(F.links.size() == 1);
    CHECK(is_real_nonzero(*F.links[0].exact));
    CHECK(is_real_nonzero(loop_product(F, ExactConfiguration{})));
}

TEST_CASE("cyclic relabeling preserves closure") {
    auto doc = corpus_document("6r-two-bennett");
    auto c = doc.known_configs[0];
    for (std::size_t s = 0; s < 6; ++s) {
        Linkage R = doc.linkage;
        std::rotate(R.joints.begin(), R.joints.begin() + static_cast<std::ptrdiff_t>(s), R.joints.end());
        ExactConfiguration rc = c;
        std::rotate(rc.begin(), rc.begin() + static_cast<std::ptrdiff_t>(s), rc.end());
        CHECK(is_real_nonzero(loop_product(R, rc)));
    }
}

TEST_CASE("derived linkages") {
    auto L = corpus_document("p4r-parallel-pairs").linkage;
    auto S = derived_linkage(L, DerivedKind::Spherical);
    CHECK(S.joints[0].axis.exact->is_zero());
    CHECK(joint_motion(S.joints[0], Param<Rational>(3)) == DQR(Rational(3)));
    for (std::size_t k = 1; k < 5; ++k) {
        CHECK(S.joints[k].axis.exact->dual.is_zero());
        CHECK(S.joints[k].axis.exact->primal == L.joints[k].axis.exact->primal);
    }
    CHECK_THROWS_AS(derived_linkage(L, DerivedKind::ReplaceHByR), std::invalid_argument);

    Linkage H({Joint::helical(exact_axis({"0", "0", "1"}, {"0", "0", "0"}), 1),
               Joint::revolute(exact_axis({"1", "0", "0"}, {"0", "0", "0"}))});
    auto Lp = derived_linkage(H, DerivedKind::ReplaceHByP);
    CHECK(Lp.joints[0].kind == JointKind::P);
    CHECK(*Lp.joints[0].axis.exact == DQR({}, {0, 0, 0, 1}));
    auto Lr = derived_linkage(H, DerivedKind::ReplaceHByR);
    CHECK(Lr.joints[0].kind == JointKind::R);
    CHECK(*Lr.joints[0].axis.exact == *H.joints[0].axis.exact);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(validate_joint(Joint::revolute(exact_axis({"1", "1", "0"}, {"0", "0", "0"}))),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_joint(Joint::revolute(exact_axis({"1", "0", "0"}, {"1", "0", "0"}))),
                    std::invalid_argument);
    CHECK_NOTHROW(validate_joint(Joint::revolute(exact_axis({"0", "1", "0"}, {"1", "0", "0"}))));
    CHECK_THROWS_AS(validate_joint(Joint::prismatic(Vec3<Rational>{0, 0, 0})), std::invalid_argument);
    auto h = exact_axis({"0", "0", "1"}, {"0", "1", "0"});
    Linkage deg({Joint::revolute(h), Joint::revolute(h), Joint::revolute(exact_axis({"1", "0", "0"}, {"0", "0", "0"}))});
    CHECK_THROWS_AS(validate_linkage(deg), std::invalid_argument);
}

TEST_CASE("home axes with identity links are the joint axes") {
    auto L = corpus_document("6r-two-bennett").linkage;
    auto H = home_axes(L);
    for (std::size_t k = 0; k < 6; ++k) CHECK(*H.axes[k].exact == *L.joints[k].axis.exact);
    CHECK(*H.total.exact == DQR::one());
}
