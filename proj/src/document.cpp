#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "overcon/document.hpp"

namespace overcon {

namespace {

std::string where(const std::string& source, const YAML::Mark& m, const std::string& field) {
    std::string s = source;
    if (m.line >= 0) s += ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
    if (!field.empty()) s += ": " + field;
    return s;
}

struct Reader {
    std::string source;

    [[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& what) const {
        throw DocumentError(where(source, n.Mark(), field), what);
    }

    std::string scalar(const YAML::Node& n, const std::string& field) const {
        if (!n.IsScalar()) fail(n, field, "expected a scalar");
        return n.Scalar();
    }

    YAML::Node sequence(const YAML::Node& n, const std::string& field) const {
        if (!n.IsSequence()) fail(n, field, "expected a list");
        return n;
    }

    void only_keys(const YAML::Node& n, const std::string& field, std::initializer_list<const char*> keys) const {
        if (!n.IsMap()) fail(n, field, "expected a mapping");
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& kv : n) {
            const std::string k = kv.first.Scalar();
            if (!allowed.count(k)) fail(kv.first, field.empty() ? k : field + "." + k, "unknown field");
        }
    }
};

// Integers and fractions are exact; anything with a decimal point or an
// exponent makes the element floating.
bool exact_text(const std::string& s) { return s.find_first_of(".eE") == std::string::npos; }

FixedElement element(const Reader& r, const YAML::Node& n, const std::string& field) {
    r.sequence(n, field);
    if (n.size() != 8) r.fail(n, field, "expected 8 coefficients, got " + std::to_string(n.size()));
    std::array<Rational, 8> q;
    std::array<double, 8> d{};
    bool exact = true;
    for (std::size_t k = 0; k < 8; ++k) {
        const std::string f = field + "[" + std::to_string(k) + "]";
        const std::string s = r.scalar(n[k], f);
        try {
            q[k] = parse_rational(s);
        } catch (const std::invalid_argument& e) {
            r.fail(n[k], f, e.what());
        }
        d[k] = q[k].convert_to<double>();
        exact = exact && exact_text(s);
    }
    if (exact) return FixedElement::from_exact(DualQuaternion<Rational>::from_coords(q));
    return FixedElement::from_double(DualQuaternion<double>::from_coords(d));
}

JointKind joint_kind(const Reader& r, const YAML::Node& n, const std::string& field) {
    const std::string s = r.scalar(n, field);
    if (s == "R") return JointKind::R;
    if (s == "P") return JointKind::P;
    if (s == "H") return JointKind::H;
    r.fail(n, field, "joint kind must be R, P or H, got '" + s + "'");
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

void emit_element(YAML::Emitter& out, const FixedElement& e) {
    out << YAML::Flow << YAML::BeginSeq;
    for (std::size_t k = 0; k < 8; ++k) {
        if (e.exact) out << to_string(e.exact->coord(k));
        else out << fmt_double(e.approx.coord(k));
    }
    out << YAML::EndSeq;
}

}  // namespace

LinkageDocument parse_document(const std::string& text, const std::string& source) {
    Reader r{source};
    YAML::Node loaded;
    try {
        loaded = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw DocumentError(where(source, e.mark, ""), e.msg);
    }
    const YAML::Node root = loaded;
    if (!root || root.IsNull()) throw DocumentError(source, "empty document");
    r.only_keys(root, "", {"name", "joints", "links", "known_configs", "known_bonds", "expected"});

    LinkageDocument doc;
    std::string name = root["name"] ? r.scalar(root["name"], "name") : std::string();
    if (!root["joints"]) r.fail(root, "joints", "missing field");
    const YAML::Node jn = r.sequence(root["joints"], "joints");
    if (jn.size() == 0) r.fail(jn, "joints", "no joints");

    std::vector<Joint> joints;
    for (std::size_t k = 0; k < jn.size(); ++k) {
        const std::string f = "joints[" + std::to_string(k) + "]";
        const YAML::Node j = jn[k];
        r.only_keys(j, f, {"kind", "coords", "pitch"});
        if (!j["kind"]) r.fail(j, f + ".kind", "missing field");
        if (!j["coords"]) r.fail(j, f + ".coords", "missing field");
        Joint joint;
        joint.kind = joint_kind(r, j["kind"], f + ".kind");
        joint.axis = element(r, j["coords"], f + ".coords");
        if (j["pitch"]) {
            if (joint.kind != JointKind::H) r.fail(j["pitch"], f + ".pitch", "pitch is only allowed on H joints");
            try {
                joint.pitch = parse_rational(r.scalar(j["pitch"], f + ".pitch"));
            } catch (const std::invalid_argument& e) {
                r.fail(j["pitch"], f + ".pitch", e.what());
            }
        } else if (joint.kind == JointKind::H) {
            r.fail(j, f + ".pitch", "H joints need a pitch");
        }
        try {
            validate_joint(joint);
        } catch (const std::invalid_argument& e) {
            r.fail(j, f, e.what());
        }
        joints.push_back(std::move(joint));
    }
    const std::size_t n = joints.size();

    if (root["links"]) {
        const YAML::Node ln = r.sequence(root["links"], "links");
        if (ln.size() != n) r.fail(ln, "links", "expected " + std::to_string(n) + " links, got " + std::to_string(ln.size()));
        std::vector<FixedElement> links;
        for (std::size_t k = 0; k < n; ++k) links.push_back(element(r, ln[k], "links[" + std::to_string(k) + "]"));
        doc.linkage = Linkage(std::move(joints), std::move(links), name);
    } else {
        doc.linkage = Linkage(std::move(joints), name);
    }
    try {
        validate_linkage(doc.linkage);
    } catch (const std::invalid_argument& e) {
        r.fail(root["joints"], "joints", e.what());
    }

    if (root["known_configs"]) {
        const YAML::Node cn = r.sequence(root["known_configs"], "known_configs");
        for (std::size_t i = 0; i < cn.size(); ++i) {
            const std::string f = "known_configs[" + std::to_string(i) + "]";
            r.sequence(cn[i], f);
            if (cn[i].size() != n) r.fail(cn[i], f, "expected " + std::to_string(n) + " parameters");
            ExactConfiguration c;
            for (std::size_t k = 0; k < n; ++k) {
                const std::string s = r.scalar(cn[i][k], f + "[" + std::to_string(k) + "]");
                if (s == "inf") {
                    c.push_back(Param<Rational>::at_infinity());
                    continue;
                }
                try {
                    c.emplace_back(parse_rational(s));
                } catch (const std::invalid_argument& e) {
                    r.fail(cn[i][k], f + "[" + std::to_string(k) + "]", e.what());
                }
            }
            doc.known_configs.push_back(std::move(c));
        }
    }

    if (root["known_bonds"]) {
        const YAML::Node bn = r.sequence(root["known_bonds"], "known_bonds");
        for (std::size_t i = 0; i < bn.size(); ++i) {
            const std::string f = "known_bonds[" + std::to_string(i) + "]";
            r.sequence(bn[i], f);
            if (bn[i].size() != n) r.fail(bn[i], f, "expected " + std::to_string(n) + " parameters");
            ExactComplexConfiguration c;
            for (std::size_t k = 0; k < n; ++k) {
                const std::string s = r.scalar(bn[i][k], f + "[" + std::to_string(k) + "]");
                try {
                    c.emplace_back(parse_gauss_rational(s));
                } catch (const std::invalid_argument& e) {
                    r.fail(bn[i][k], f + "[" + std::to_string(k) + "]", e.what());
                }
            }
            doc.known_bonds.push_back(std::move(c));
        }
    }

    if (root["expected"]) {
        const YAML::Node en = root["expected"];
        r.only_keys(en, "expected", {"mobility", "theorem_case"});
        if (en["mobility"]) {
            try {
                doc.expected.mobility = en["mobility"].as<int>();
            } catch (const YAML::Exception&) {
                r.fail(en["mobility"], "expected.mobility", "expected an integer");
            }
        }
        if (en["theorem_case"]) doc.expected.theorem_case = r.scalar(en["theorem_case"], "expected.theorem_case");
    }
    return doc;
}

LinkageDocument load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DocumentError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_document(ss.str(), path);
}

std::string dump_document(const LinkageDocument& doc) {
    const Linkage& L = doc.linkage;
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << L.name;
    out << YAML::Key << "joints" << YAML::Value << YAML::BeginSeq;
    for (const auto& j : L.joints) {
        out << YAML::BeginMap;
        out << YAML::Key << "kind" << YAML::Value << std::string(to_string(j.kind));
        out << YAML::Key << "coords" << YAML::Value;
        emit_element(out, j.axis);
        if (j.kind == JointKind::H) out << YAML::Key << "pitch" << YAML::Value << to_string(j.pitch);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    if (!L.identity_links()) {
        out << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
        for (const auto& l : L.links) emit_element(out, l);
        out << YAML::EndSeq;
    }
    if (!doc.known_configs.empty()) {
        out << YAML::Key << "known_configs" << YAML::Value << YAML::BeginSeq;
        for (const auto& c : doc.known_configs) {
            out << YAML::Flow << YAML::BeginSeq;
            for (const auto& p : c) out << (p.infinite ? std::string("inf") : to_string(p.value));
            out << YAML::EndSeq;
        }
        out << YAML::EndSeq;
    }
    if (!doc.known_bonds.empty()) {
        out << YAML::Key << "known_bonds" << YAML::Value << YAML::BeginSeq;
        for (const auto& c : doc.known_bonds) {
            out << YAML::Flow << YAML::BeginSeq;
            for (const auto& p : c) out << to_string(p.value);
            out << YAML::EndSeq;
        }
        out << YAML::EndSeq;
    }
    if (doc.expected.mobility || !doc.expected.theorem_case.empty()) {
        out << YAML::Key << "expected" << YAML::Value << YAML::BeginMap;
        if (doc.expected.mobility) out << YAML::Key << "mobility" << YAML::Value << *doc.expected.mobility;
        if (!doc.expected.theorem_case.empty())
            out << YAML::Key << "theorem_case" << YAML::Value << doc.expected.theorem_case;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace overcon
