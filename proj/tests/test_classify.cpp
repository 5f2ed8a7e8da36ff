#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "overcon/classify.hpp"
#include "overcon/document.hpp"
#include "support.hpp"

using namespace overcon;
using namespace testsupport;

namespace {

Linkage fixture(const std::string& name) { return corpus_document(name).linkage; }

Linkage random_loop(std::mt19937_64& rng, std::size_t n) {
    std::vector<Joint> js;
    for (std::size_t k = 0; k < n; ++k) js.push_back(Joint::revolute(FixedElement::from_double(random_axis(rng))));
    return Linkage(js, "random");
}

Linkage rotate(const Linkage& L, std::size_t s) {
    std::vector<Joint> js;
    for (std::size_t k = 0; k < L.size(); ++k) js.push_back(L.joints[(k + s) % L.size()]);
    return Linkage(js, L.name);
}

Linkage reversed(const Linkage& L) {
    std::vector<Joint> js(L.joints.rbegin(), L.joints.rend());
    return Linkage(js, L.name);
}

FixedElement h1_prime() {
    return exact_axis({"101/117", "4/9", "-28/117"}, {"112/1521", "0", "404/1521"});
}

FixedElement h4_prime() {
    return exact_axis({"3301/4095", "86/315", "-430/819"}, {"240628/1863225", "274/1225", "117232/372645"});
}

}  // namespace

TEST_CASE("the first four joints of the 6R loop form a Bennett four-bar") {
    auto b = check_bennett_4r(fixture("bennett-4r"));
    CHECK(b.holds);
    CHECK(b.kind == "bennett");
    CHECK(b.exact);
}

TEST_CASE("spherical and planar four-bars pass as degenerate") {
    auto sph = fixture("spherical-6r");
    auto b = check_bennett_4r(Linkage({sph.joints[0], sph.joints[1], sph.joints[2], sph.joints[3]}));
    CHECK(b.holds);
    CHECK(b.kind == "spherical");
    CHECK(b.degenerate());
    auto pl = fixture("planar-6r");
    b = check_bennett_4r(Linkage({pl.joints[0], pl.joints[1], pl.joints[2], pl.joints[3]}));
    CHECK(b.kind == "planar");
}

TEST_CASE("random skew four-bars are not Bennett") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) CHECK_FALSE(check_bennett_4r(random_loop(rng, 4)).holds);
}

TEST_CASE("four-bar preconditions") {
    auto L = fixture("bennett-4r");
    L.joints[1] = L.joints[0];
    CHECK_THROWS_AS(check_bennett_4r(L), std::invalid_argument);
    CHECK_THROWS_AS(check_bennett_4r(fixture("spherical-6r")), std::invalid_argument);
}

TEST_CASE("freezing a free joint of the 6R loop yields a five-bar passing the necessary conditions") {
    const Linkage L = fixture("6r-two-bennett");
    auto e = mobility_estimate(L, 8, 3);
    REQUIRE(e.mobility);
    for (std::size_t k : {0u, 3u}) {
        int passed = 0;
        for (const auto& s : e.samples) {
            if (!s || !s->regular || s->null_dim != 2) continue;
            const Linkage F = freeze_joint<double>(L, k, s->config[k]);
            auto g = check_goldberg_5r(F);
            CHECK(g.strength == Strength::Necessary);
            if (g.verdict == GoldbergVerdict::PassesNecessary) ++passed;
            else MESSAGE("joint " << k << " value " << s->config[k].value);
        }
        CHECK(passed > 0);
    }
}

TEST_CASE("freezing the last 6R joint also freezes its neighbour") {
    const Linkage L = fixture("6r-two-bennett");
    auto e = mobility_estimate(L, 8, 3);
    const MobilitySample* s = nullptr;
    for (const auto& x : e.samples)
        if (x && x->regular && x->null_dim == 2) s = &*x;
    REQUIRE(s);
    auto f = mobility_estimate(freeze_joint<double>(L, 5, s->config[5]), 8, 4);
    REQUIRE(f.mobility);
    CHECK(*f.mobility == 1);
    CHECK(f.frozen_joints == std::vector<std::size_t>{4});
}

TEST_CASE("planar five-bars pass degenerately, random five-bars fail") {
    auto pl = fixture("planar-6r");
    auto g = check_goldberg_5r(Linkage({pl.joints[0], pl.joints[1], pl.joints[2], pl.joints[3], pl.joints[4]}));
    CHECK(g.verdict == GoldbergVerdict::PassesNecessary);
    CHECK(g.degenerate);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) CHECK(check_goldberg_5r(random_loop(rng, 5)).verdict == GoldbergVerdict::Fails);
}

TEST_CASE("6R mobility-2 cases") {
    auto r = classify_6r_mobility2(fixture("6r-two-bennett"));
    CHECK(r.match == SixRCase::TwoBennetts);
    CHECK(r.exact);
    REQUIRE(r.view);
    CHECK(r.bennett_quads == std::vector<std::size_t>{0, 3});
    for (const char* name : {"6r-two-bennett-iso0", "6r-two-bennett-iso3"}) {
        auto s = classify_6r_mobility2(fixture(name));
        CHECK_MESSAGE(s.match != SixRCase::NoMatch, name);
        CHECK(s.bennett_quads.empty());
        CHECK(std::find(s.evidence.begin(), s.evidence.end(),
                        "no Bennett 4R loop on any four consecutive joints") != s.evidence.end());
    }
    CHECK(classify_6r_mobility2(fixture("rigid-random-6r")).match == SixRCase::NoMatch);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 5; ++i) CHECK(classify_6r_mobility2(random_loop(rng, 6)).match == SixRCase::NoMatch);
}

TEST_CASE("6R verdict is invariant under relabelling and reversal") {
    for (const char* name : {"6r-two-bennett", "6r-two-bennett-iso0", "rigid-random-6r"}) {
        const Linkage L = fixture(name);
        const SixRCase want = classify_6r_mobility2(L).match;
        for (std::size_t s = 0; s < 6; ++s) {
            CHECK(classify_6r_mobility2(rotate(L, s)).match == want);
            CHECK(classify_6r_mobility2(reversed(rotate(L, s))).match == want);
        }
    }
}

TEST_CASE("subgroup check") {
    for (int n = 6; n <= 9; ++n) {
        CHECK(check_n_minus_3(fixture("planar-" + std::to_string(n) + "r")).verdict == SubgroupVerdict::SE2);
        auto s = check_n_minus_3(fixture("spherical-" + std::to_string(n) + "r"));
        CHECK(s.verdict == SubgroupVerdict::SO3);
        REQUIRE(s.center);
        CHECK(norm(*s.center) < 1e-12);
    }
    auto b = check_n_minus_3(fixture("bennett-4r"));
    CHECK(b.verdict == SubgroupVerdict::No);
    CHECK_FALSE(b.applies);
    CHECK(check_n_minus_3(fixture("p4r-parallel-pairs")).verdict == SubgroupVerdict::No);
    CHECK(check_n_minus_3(fixture("6r-two-bennett")).verdict == SubgroupVerdict::No);
}

TEST_CASE("P joints perpendicular to parallel R axes give SE2") {
    auto pl = fixture("planar-6r");
    auto js = pl.joints;
    js[2] = Joint::prismatic(Vec3<Rational>{Rational(1), Rational(2), Rational(0)});
    CHECK(check_n_minus_3(Linkage(js)).verdict == SubgroupVerdict::SE2);
    js[2] = Joint::prismatic(Vec3<Rational>{Rational(1), Rational(2), Rational(1)});
    CHECK(check_n_minus_3(Linkage(js)).verdict == SubgroupVerdict::No);
}

TEST_CASE("n-4 dispatch") {
    auto p = classify_n_minus_4(fixture("prrprr"));
    CHECK(p.matches);
    REQUIRE(p.match);
    CHECK(p.match->case_label == "two-p-joints");
    CHECK(p.predicted_mobility == 2);

    auto pl = classify_n_minus_4(fixture("planar-8r"));
    CHECK(pl.matches);
    CHECK(pl.predicted_mobility == 5);
    CHECK(pl.match->case_label == "SE2");

    auto e = classify_n_minus_4(fixture("6r-two-bennett"));
    CHECK(e.matches);
    CHECK(e.match->case_label == "two-bennetts");

    std::mt19937_64 rng(9);
    auto r = classify_n_minus_4(random_loop(rng, 7));
    CHECK_FALSE(r.matches);
    CHECK(r.mobility_bound == 1);

    auto rr = classify_n_minus_4(fixture("rigid-random-6r"));
    CHECK_FALSE(rr.matches);
    CHECK(rr.mobility_bound == 1);
    CHECK_THROWS(classify_n_minus_4(fixture("p4r-parallel-pairs")));
}

TEST_CASE("parallel R axes with two P joints give mobility n-4 for n > 6") {
    auto pl = fixture("planar-7r");
    auto js = pl.joints;
    js[1] = Joint::prismatic(Vec3<Rational>{Rational(1), Rational(0), Rational(1)});
    js[4] = Joint::prismatic(Vec3<Rational>{Rational(0), Rational(1), Rational(2)});
    auto v = classify_n_minus_4(Linkage(js));
    CHECK(v.matches);
    CHECK(v.predicted_mobility == 3);
    auto e = mobility_estimate(Linkage(js), 12, 2);
    REQUIRE(e.mobility);
    CHECK(*e.mobility == 3);
}

TEST_CASE("structure scan for mobility n-5") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 5; ++i) {
        const Linkage L = random_loop(rng, 7);
        auto r = necessary_n_minus_5(L);
        CHECK(r.violates);
        auto e = mobility_estimate(L, 6, 20 + i);
        if (e.mobility) CHECK(*e.mobility <= 1);
    }
    auto pl = necessary_n_minus_5(fixture("planar-7r"));
    CHECK_FALSE(pl.violates);
    CHECK(pl.structure.size() == 7);

    // the 6R loop with a generic seventh axis keeps its Bennett triples
    auto js = fixture("6r-two-bennett").joints;
    js.push_back(Joint::revolute(FixedElement::from_double(random_axis(rng))));
    auto r = necessary_n_minus_5(Linkage(js));
    CHECK_FALSE(r.violates);
    int triples = 0;
    for (const auto& s : r.structure)
        if (s.kind == StructureItem::Kind::BennettTriple) ++triples;
    CHECK(triples >= 4);
    CHECK_THROWS(necessary_n_minus_5(fixture("6r-two-bennett")));
}

TEST_CASE("isomeric replacement") {
    const Linkage L = fixture("6r-two-bennett");
    auto c1 = check_isomeric(L, 0, h1_prime());
    CHECK_MESSAGE(c1.valid, c1.reason);
    CHECK(c1.triple != BennettSign::No);
    auto c4 = check_isomeric(L, 3, h4_prime());
    CHECK_MESSAGE(c4.valid, c4.reason);
    const Linkage R1 = isomeric_replace(L, 0, h1_prime());
    CHECK(R1.joints[0].axis.exact == h1_prime().exact);
    std::mt19937_64 rng(13);
    CHECK_FALSE(check_isomeric(L, 0, FixedElement::from_double(random_axis(rng))).valid);
    CHECK_THROWS_AS(isomeric_replace(L, 0, FixedElement::from_double(random_axis(rng))), std::invalid_argument);
    CHECK_FALSE(check_isomeric(L, 0, L.joints[0].axis).valid);
}

TEST_CASE("isomeric linkages keep mobility two") {
    const Linkage L = fixture("6r-two-bennett");
    auto e = mobility_estimate(isomeric_replace(L, 0, h1_prime()), 12, 1);
    REQUIRE(e.mobility);
    CHECK(*e.mobility == 2);
    e = mobility_estimate(isomeric_replace(L, 3, h4_prime()), 12, 1);
    REQUIRE(e.mobility);
    CHECK(*e.mobility == 2);
}

TEST_CASE("consistency reports") {
    ConsistencyOptions opt;
    opt.samples = 12;
    auto p = consistency_check(fixture("p4r-parallel-pairs"), opt);
    CHECK(p.signature == "PRRRR");
    CHECK(p.estimated_mobility == 1);
    REQUIRE(p.matches.size() == 1);
    CHECK(p.matches[0].case_label == "parallel-pairs");
    CHECK(p.parallel_groups == std::vector<std::vector<std::size_t>>{{1, 2}, {3, 4}});
    CHECK(p.contradictions.empty());

    auto s = consistency_check(fixture("6r-two-bennett"), opt);
    CHECK(s.estimated_mobility == 2);
    REQUIRE(!s.matches.empty());
    CHECK(s.matches[0].case_label == "two-bennetts");
    CHECK(s.contradictions.empty());
    CHECK(s.bennett_triples.size() == 6);
    CHECK(!s.freeze_scan.empty());
    for (const auto& f : s.freeze_scan) {
        CHECK(f.mobility == 1);
        CHECK(f.co_frozen.size() <= 1);
    }

    auto sp = consistency_check(fixture("spherical-6r"), opt);
    CHECK(sp.estimated_mobility == 3);
    CHECK(sp.matches[0].case_label == "SO3");
    CHECK(sp.concurrency_point);
    CHECK(sp.contradictions.empty());
}

TEST_CASE("every fixture is consistent with its matched rules") {
    ConsistencyOptions opt;
    opt.samples = 10;
    opt.freeze_values = 1;
    for (const auto& name : corpus_names()) {
        const auto doc = corpus_document(name);
        auto r = consistency_check(doc.linkage, opt);
        REQUIRE_MESSAGE(r.estimated_mobility, name);
        CHECK_MESSAGE(*r.estimated_mobility <= static_cast<int>(doc.linkage.size()) - 3, name);
        CHECK_MESSAGE(r.contradictions.empty(), name);
        if (doc.expected.mobility) CHECK_MESSAGE(*r.estimated_mobility == *doc.expected.mobility, name);
        if (r.predicted_mobility) CHECK_MESSAGE(*r.predicted_mobility == *r.estimated_mobility, name);
        for (const auto& m : r.matches) CHECK_MESSAGE(!m.evidence.empty(), name);
    }
}

TEST_CASE("parallel and serial consistency checks agree") {
    ConsistencyOptions opt;
    opt.samples = 8;
    auto a = consistency_check(fixture("6r-two-bennett"), opt);
    opt.parallel = false;
    auto b = consistency_check(fixture("6r-two-bennett"), opt);
    CHECK(a.estimated_mobility == b.estimated_mobility);
    REQUIRE(a.freeze_scan.size() == b.freeze_scan.size());
    for (std::size_t i = 0; i < a.freeze_scan.size(); ++i) {
        CHECK(a.freeze_scan[i].value == b.freeze_scan[i].value);
        CHECK(a.freeze_scan[i].mobility == b.freeze_scan[i].mobility);
        CHECK(a.freeze_scan[i].co_frozen == b.freeze_scan[i].co_frozen);
    }
}
