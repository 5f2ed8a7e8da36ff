#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "overcon/bonds.hpp"
#include "overcon/document.hpp"
#include "overcon/geometry.hpp"
#include "support.hpp"

using namespace overcon;
using namespace testsupport;

namespace {

GaussRational gr(const char* s) { return parse_gauss_rational(s); }

ExactComplexConfiguration ec(std::initializer_list<const char*> ts) {
    ExactComplexConfiguration c;
    for (const char* t : ts) c.emplace_back(gr(t));
    return c;
}

// Points of the 6R family with t2 = -i, t6 = i (1-based) and t4 free.
ExactComplexConfiguration family_point(const char* t4) {
    return ec({"1/3-1/3i", "-i", "-1/2+i", t4, "-1-i", "i"});
}

ExactComplexConfiguration conj_config(const ExactComplexConfiguration& c) {
    ExactComplexConfiguration out;
    for (const auto& p : c) out.emplace_back(conj(p.value));
    return out;
}

using Idx = std::vector<std::size_t>;

}  // namespace

TEST_CASE("the P4R bond vanishes exactly and attaches to every joint") {
    const auto doc = corpus_document("p4r-parallel-pairs");
    const auto b = ec({"0", "i", "-i", "i", "-i"});
    CHECK(is_bond(doc.linkage, b));
    CHECK(attachment_set(doc.linkage, b) == Idx{0, 1, 2, 3, 4});
    CHECK(is_bond(doc.linkage, config_cast<Cplx>(b)));
    CHECK(is_chain(attachment_set(doc.linkage, b), 5));
}

TEST_CASE("norms of joint factors") {
    const auto doc = corpus_document("p4r-parallel-pairs");
    // N(t - h) = t^2 + 1 for R, N(t - eps p) = t^2 for P.
    for (const char* t : {"2", "1/3+i", "-i"}) {
        const GaussRational z = gr(t);
        auto nr = bond_motion(doc.linkage.joints[1], z).norm();
        CHECK(nr.a == z * z + GaussRational(1));
        CHECK(nr.b == GaussRational(0));
        auto np = bond_motion(doc.linkage.joints[0], z).norm();
        CHECK(np.a == z * z);
        CHECK(np.b == GaussRational(0));
    }
}

TEST_CASE("the 6R bond family vanishes for any t4") {
    const Linkage L = corpus_document("6r-two-bennett").linkage;
    for (const char* t4 : {"0", "1", "-5/2", "3/7-2i"}) {
        const auto b = family_point(t4);
        CHECK(is_bond(L, b));
        CHECK(attachment_set(L, b) == Idx{1, 5});
    }
}

TEST_CASE("every bundled bond is a bond and so is its conjugate") {
    for (const auto& name : corpus_names()) {
        const auto doc = corpus_document(name);
        for (const auto& b : doc.known_bonds) {
            CHECK_MESSAGE(is_bond(doc.linkage, b), name);
            CHECK_MESSAGE(is_bond(doc.linkage, conj_config(b)), name);
            CHECK(attachment_set(doc.linkage, b).size() >= 2);
        }
    }
}

TEST_CASE("real closed configurations are not bonds") {
    for (const auto& name : corpus_names()) {
        const auto doc = corpus_document(name);
        for (const auto& c : doc.known_configs) {
            bool finite = true;
            for (const auto& p : c) finite = finite && !p.infinite;
            if (!finite) continue;
            CHECK_FALSE(is_bond(doc.linkage, config_cast<GaussRational>(c)));
        }
    }
}

TEST_CASE("chains") {
    CHECK(is_chain({0, 1, 2}, 6));
    CHECK(is_chain({4, 5, 0}, 6));
    CHECK_FALSE(is_chain({1, 5}, 6));
    CHECK(chains_of({1, 5}, 6).size() == 2);
    CHECK(chains_of({0, 1, 2, 3}, 4).size() == 1);
}

TEST_CASE("pattern text") {
    auto p = parse_pattern("0, +i, -i, i, f");
    CHECK(p == std::vector<Slot>{Slot::Zero, Slot::PlusI, Slot::MinusI, Slot::PlusI, Slot::Free});
    CHECK(pattern_to_string(p) == "0,+i,-i,+i,f");
    CHECK_THROWS(parse_pattern("2"));
}

TEST_CASE("search recovers the P4R bond") {
    const Linkage L = corpus_document("p4r-parallel-pairs").linkage;
    auto found = search_bonds(L, parse_pattern("0,+i,-i,+i,-i"), 1);
    REQUIRE(found.size() == 1);
    REQUIRE(found[0].exact);
    const auto want = ec({"0", "i", "-i", "i", "-i"});
    for (std::size_t k = 0; k < want.size(); ++k) CHECK((*found[0].exact)[k].value == want[k].value);
    CHECK(found[0].attachment == Idx{0, 1, 2, 3, 4});
}

TEST_CASE("search with free slots on the P4R loop") {
    const Linkage L = corpus_document("p4r-parallel-pairs").linkage;
    auto found = search_bonds(L, parse_pattern("0,+i,f,f,-i"), 2);
    REQUIRE(!found.empty());
    for (const auto& b : found) {
        CHECK(is_bond(L, b.config));
        if (b.exact) CHECK(is_bond(L, *b.exact));
    }
}

TEST_CASE("search on the 6R family satisfies the family relations") {
    const Linkage L = corpus_document("6r-two-bennett").linkage;
    SolverOptions opt;
    opt.restarts = 24;
    auto found = search_bonds(L, parse_pattern("f,-i,f,f,f,+i"), 3, opt);
    REQUIRE(!found.empty());
    int exact = 0;
    for (const auto& b : found) {
        const auto& c = b.config;
        CHECK(is_bond(L, c));
        // t1 + t6/3 - 1/3 = 0, t3 = i - 1/2, t5 = -1 - i
        CHECK(std::abs(c[0].value + c[5].value / 3.0 - 1.0 / 3.0) < 1e-8);
        CHECK(std::abs(c[2].value - Cplx(-0.5, 1)) < 1e-8);
        CHECK(std::abs(c[4].value - Cplx(-1, -1)) < 1e-8);
        if (b.exact) {
            ++exact;
            CHECK(is_bond(L, *b.exact));
        }
    }
    CHECK(exact > 0);
}

TEST_CASE("parallel and serial bond searches agree") {
    const Linkage L = corpus_document("6r-two-bennett").linkage;
    SolverOptions opt;
    opt.restarts = 12;
    auto a = search_bonds(L, parse_pattern("f,-i,f,f,f,+i"), 4, opt);
    auto b = search_bonds_serial(L, parse_pattern("f,-i,f,f,f,+i"), 4, opt);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < L.size(); ++k) CHECK(a[i].config[k].value == b[i].config[k].value);
}

TEST_CASE("rigid 6R loops have no bonds") {
    const Linkage L = corpus_document("rigid-random-6r").linkage;
    SolverOptions opt;
    opt.restarts = 16;
    CHECK(search_bonds(L, parse_pattern("+i,-i,f,f,f,f"), 5, opt).empty());
    CHECK(search_bonds(L, parse_pattern("+i,f,f,-i,f,f"), 5, opt).empty());
}

TEST_CASE("bad patterns are rejected") {
    const Linkage L = corpus_document("p4r-parallel-pairs").linkage;
    CHECK_THROWS(search_bonds(L, parse_pattern("f,f,f,f,+i"), 1));
    CHECK_THROWS(search_bonds(L, parse_pattern("+i,f,f,f,-i"), 1));
    CHECK_THROWS(search_bonds(L, parse_pattern("0,0,f,f,-i"), 1));
}

TEST_CASE("bond set dimension is one less than the mobility") {
    const Linkage L47 = corpus_document("p4r-parallel-pairs").linkage;
    CHECK(bond_local_dimension(L47, config_cast<Cplx>(ec({"0", "i", "-i", "i", "-i"})), 1) == 0);
    const Linkage L59 = corpus_document("6r-two-bennett").linkage;
    CHECK(bond_local_dimension(L59, config_cast<Cplx>(family_point("1")), 1) == 1);
}

TEST_CASE("factor diagnosis of the P4R bond finds the parallel pairs") {
    const Linkage L = corpus_document("p4r-parallel-pairs").linkage;
    auto d = factor_diagnose(L, config_cast<Cplx>(ec({"0", "i", "-i", "i", "-i"})));
    CHECK(d.attachment == Idx{0, 1, 2, 3, 4});
    bool p12 = false, p34 = false;
    for (const auto& f : d.implied) {
        CHECK(f.confirmed);
        if (f.kind == ImpliedFact::Kind::Parallel && f.joints == Idx{1, 2}) p12 = true;
        if (f.kind == ImpliedFact::Kind::Parallel && f.joints == Idx{3, 4}) p34 = true;
    }
    CHECK(p12);
    CHECK(p34);
    CHECK_FALSE(d.primal_only);
    // the chain of attached joints contains a parallel pair
    const auto home = home_axes(L);
    CHECK(are_parallel(home.axes[1].approx, home.axes[2].approx));
}

TEST_CASE("factor diagnosis of the 6R bonds is confirmed by the geometry") {
    const auto doc = corpus_document("6r-two-bennett");
    for (const auto& b : doc.known_bonds) {
        auto d = factor_diagnose(doc.linkage, config_cast<Cplx>(b));
        CHECK_FALSE(d.minimal_windows.empty());
        for (const auto& f : d.implied) CHECK(f.confirmed);
    }
}

TEST_CASE("factor diagnosis of a spherical bond is primal only") {
    const auto sph = corpus_document("spherical-6r").linkage;
    std::vector<Joint> js = {sph.joints[0], sph.joints[0], sph.joints[2], sph.joints[3]};
    const Linkage L(js, "sph-4r");
    ComplexConfiguration c = {Cplx(0, 1), Cplx(0, -1), Cplx(0.3, 0.2), Cplx(-1.1, 0.4)};
    CHECK(is_bond(L, c));
    auto d = factor_diagnose(L, c);
    CHECK(d.primal_only);
    CHECK(d.pair_products[0] == FactorClass::Zero);
}
