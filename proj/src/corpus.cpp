#include "overcon/document.hpp"

namespace overcon {

FixedElement exact_axis(const std::array<const char*, 3>& p, const std::array<const char*, 3>& q) {
    Vec3<Rational> pv{parse_rational(p[0]), parse_rational(p[1]), parse_rational(p[2])};
    Vec3<Rational> qv{parse_rational(q[0]), parse_rational(q[1]), parse_rational(q[2])};
    return FixedElement::from_exact(DualQuaternion<Rational>::line(pv, qv));
}

namespace {

ExactConfiguration exact_config(std::initializer_list<const char*> ts) {
    ExactConfiguration c;
    for (const char* t : ts) {
        if (std::string(t) == "inf") c.push_back(Param<Rational>::at_infinity());
        else c.emplace_back(parse_rational(t));
    }
    return c;
}

ExactComplexConfiguration bond_config(std::initializer_list<const char*> ts) {
    ExactComplexConfiguration c;
    for (const char* t : ts) c.emplace_back(parse_gauss_rational(t));
    return c;
}

// Axis through the point c with direction D: moment c x D.
FixedElement axis_through(const Vec3<Rational>& c, const Vec3<Rational>& D) {
    return FixedElement::from_exact(DualQuaternion<Rational>::line(D, cross(c, D)));
}

Vec3<Rational> unit_dir(long a, long b, long c, long n) {
    return {Rational(a, n), Rational(b, n), Rational(c, n)};
}

std::vector<Joint> two_bennett_joints() {
    return {
        Joint::revolute(exact_axis({"1", "0", "0"}, {"0", "0", "0"})),
        Joint::revolute(exact_axis({"1/3", "2/3", "-2/3"}, {"4/9", "2/9", "4/9"})),
        Joint::revolute(exact_axis({"41/105", "88/105", "-8/21"}, {"4288/11025", "-16/11025", "872/2205"})),
        Joint::revolute(exact_axis({"33/35", "-6/35", "-2/7"}, {"68/1225", "274/1225", "12/245"})),
        Joint::revolute(
            exact_axis({"1093/1365", "-52/105", "92/273"}, {"313072/1863225", "-16/11025", "-149572/372645"})),
        Joint::revolute(exact_axis({"29/39", "-2/3", "2/39"}, {"340/1521", "2/9", "-536/1521"})),
    };
}

FixedElement iso_axis_0() {
    return exact_axis({"101/117", "4/9", "-28/117"}, {"112/1521", "0", "404/1521"});
}

FixedElement iso_axis_3() {
    return exact_axis({"3301/4095", "86/315", "-430/819"}, {"240628/1863225", "274/1225", "117232/372645"});
}

std::vector<ExactComplexConfiguration> two_bennett_bonds() {
    return {
        bond_config({"-1/2+1/2i", "-1/2", "0", "-i", "-1-i", "i"}),
        bond_config({"1/13-8/13i", "-i", "-1/2+i", "i", "-1", "0"}),
        bond_config({"1/3-1/3i", "-i", "-1/2+i", "0", "-1-i", "i"}),
        bond_config({"1/3-1/3i", "-i", "-1/2+i", "1", "-1-i", "i"}),
        bond_config({"1/3-1/3i", "-i", "-1/2+i", "-5/2", "-1-i", "i"}),
        bond_config({"-i", "-1/2-i", "i", "-2/5+4/5i", "-1", "0"}),
        bond_config({"i", "-1/2", "0", "-1/13-5/13i", "-i", "-1+i"}),
        bond_config({"0", "-1/2-i", "i", "1/3+1/3i", "-i", "-1+i"}),
    };
}

Joint p4r_prismatic() {
    return Joint::prismatic(Vec3<Rational>{Rational(0), Rational(1), Rational(1)});
}

LinkageDocument p4r_parallel_pairs() {
    LinkageDocument d;
    d.linkage = Linkage(
        {
            p4r_prismatic(),
            Joint::revolute(exact_axis({"0", "0", "1"}, {"0", "1", "0"})),
            Joint::revolute(exact_axis({"0", "0", "1"}, {"1", "0", "0"})),
            Joint::revolute(exact_axis({"0", "1", "0"}, {"1", "0", "2"})),
            Joint::revolute(exact_axis({"0", "1", "0"}, {"0", "0", "1"})),
        },
        "p4r-parallel-pairs");
    d.known_configs = {exact_config({"-1", "1", "-1", "1", "-1"}), exact_config({"-5/3", "2", "-2", "2", "-2"})};
    d.known_bonds = {bond_config({"0", "i", "-i", "i", "-i"})};
    d.expected = {1, "parallel-pairs"};
    return d;
}

LinkageDocument two_bennett() {
    LinkageDocument d;
    d.linkage = Linkage(two_bennett_joints(), "6r-two-bennett");
    d.known_configs = {exact_config({"0", "-3/2", "1", "4/7", "1", "-2"})};
    d.known_bonds = two_bennett_bonds();
    d.expected = {2, "two-bennetts"};
    return d;
}

LinkageDocument two_bennett_isomer(bool first) {
    LinkageDocument d;
    auto js = two_bennett_joints();
    if (first) js[0] = Joint::revolute(iso_axis_0());
    else js[3] = Joint::revolute(iso_axis_3());
    d.linkage = Linkage(std::move(js), first ? "6r-two-bennett-iso0" : "6r-two-bennett-iso3");
    d.expected = {2, "second-pattern"};
    return d;
}

LinkageDocument bennett_4r() {
    LinkageDocument d;
    auto js = two_bennett_joints();
    js.resize(4);
    d.linkage = Linkage(std::move(js), "bennett-4r");
    d.expected = {1, "bennett"};
    return d;
}

LinkageDocument planar(std::size_t n) {
    static const long pts[][2] = {{0, 0}, {3, 0}, {4, 2}, {2, 4}, {-1, 3}, {-2, 1}, {5, -1}, {1, -3}, {-3, -2}};
    std::vector<Joint> js;
    for (std::size_t k = 0; k < n; ++k)
        js.push_back(Joint::revolute(axis_through({Rational(pts[k][0]), Rational(pts[k][1]), Rational(0)},
                                                  {Rational(0), Rational(0), Rational(1)})));
    LinkageDocument d;
    d.linkage = Linkage(std::move(js), "planar-" + std::to_string(n) + "r");
    d.known_configs = {ExactConfiguration(n, Param<Rational>::at_infinity())};
    d.expected = {static_cast<int>(n) - 3, "planar"};
    return d;
}

LinkageDocument spherical(std::size_t n) {
    static const long dirs[][4] = {{2, 3, 6, 7},  {1, 4, 8, 9},   {2, 6, 9, 11}, {3, 4, 12, 13}, {1, 2, 2, 3},
                                   {2, 1, -2, 3}, {4, -4, 7, 9}, {2, 10, -11, 15}, {1, 12, 12, 17}, {8, -9, 12, 17}};
    std::vector<Joint> js;
    for (std::size_t k = 0; k < n; ++k)
        js.push_back(Joint::revolute(FixedElement::from_exact(DualQuaternion<Rational>::line(
            unit_dir(dirs[k][0], dirs[k][1], dirs[k][2], dirs[k][3]), {Rational(0), Rational(0), Rational(0)}))));
    LinkageDocument d;
    d.linkage = Linkage(std::move(js), "spherical-" + std::to_string(n) + "r");
    d.known_configs = {ExactConfiguration(n, Param<Rational>::at_infinity())};
    d.expected = {static_cast<int>(n) - 3, "spherical"};
    return d;
}

LinkageDocument prrprr() {
    LinkageDocument d;
    d.linkage = Linkage(
        {
            p4r_prismatic(),
            Joint::revolute(exact_axis({"0", "0", "1"}, {"0", "1", "0"})),
            Joint::revolute(exact_axis({"0", "0", "1"}, {"1", "0", "0"})),
            p4r_prismatic(),
            Joint::revolute(exact_axis({"0", "1", "0"}, {"1", "0", "2"})),
            Joint::revolute(exact_axis({"0", "1", "0"}, {"0", "0", "1"})),
        },
        "prrprr");
    d.known_configs = {exact_config({"-2", "1", "-1", "-2", "1", "-1"}),
                       exact_config({"-3", "1", "-1", "-3/2", "1", "-1"})};
    d.expected = {2, "two-p-joints"};
    return d;
}

LinkageDocument rigid_random_6r() {
    static const long dirs[][4] = {{2, 3, 6, 7}, {1, 4, -8, 9}, {-2, 6, 9, 11}, {3, -4, 12, 13}, {1, 2, -2, 3}, {4, 4, 7, 9}};
    static const long pts[][3] = {{0, 0, 0}, {1, 2, -1}, {3, -1, 2}, {-2, 1, 1}, {2, 3, -2}, {-1, -2, 3}};
    std::vector<Joint> js;
    for (std::size_t k = 0; k < 6; ++k)
        js.push_back(Joint::revolute(
            axis_through({Rational(pts[k][0]), Rational(pts[k][1]), Rational(pts[k][2])},
                         unit_dir(dirs[k][0], dirs[k][1], dirs[k][2], dirs[k][3]))));
    LinkageDocument d;
    d.linkage = Linkage(std::move(js), "rigid-random-6r");
    d.known_configs = {ExactConfiguration(6, Param<Rational>::at_infinity())};
    d.expected = {0, "none"};
    return d;
}

}  // namespace

std::vector<std::string> corpus_names() {
    std::vector<std::string> names = {"p4r-parallel-pairs", "6r-two-bennett", "6r-two-bennett-iso0",
                                      "6r-two-bennett-iso3", "bennett-4r"};
    for (int n = 6; n <= 9; ++n) names.push_back("planar-" + std::to_string(n) + "r");
    for (int n = 6; n <= 9; ++n) names.push_back("spherical-" + std::to_string(n) + "r");
    names.push_back("prrprr");
    names.push_back("rigid-random-6r");
    return names;
}

LinkageDocument corpus_document(const std::string& name) {
    if (name == "p4r-parallel-pairs") return p4r_parallel_pairs();
    if (name == "6r-two-bennett") return two_bennett();
    if (name == "6r-two-bennett-iso0") return two_bennett_isomer(true);
    if (name == "6r-two-bennett-iso3") return two_bennett_isomer(false);
    if (name == "bennett-4r") return bennett_4r();
    if (name == "prrprr") return prrprr();
    if (name == "rigid-random-6r") return rigid_random_6r();
    for (int n = 6; n <= 9; ++n) {
        if (name == "planar-" + std::to_string(n) + "r") return planar(static_cast<std::size_t>(n));
        if (name == "spherical-" + std::to_string(n) + "r") return spherical(static_cast<std::size_t>(n));
    }
    throw std::out_of_range("unknown example '" + name + "'");
}

}  // namespace overcon
