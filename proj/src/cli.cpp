#include "overcon/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "overcon/bonds.hpp"
#include "overcon/classify.hpp"
#include "overcon/geometry.hpp"
#include "overcon/mobility.hpp"

namespace overcon {

using json = nlohmann::ordered_json;

LinkageDocument resolve_document(const std::string& arg) {
    if (std::filesystem::is_regular_file(arg)) return load_document(arg);
    std::string name = arg;
    if (name.rfind("examples/", 0) == 0) name = name.substr(9);
    const auto names = corpus_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw DocumentError(arg, "no such file or bundled example");
    return corpus_document(name);
}

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string cplx(const Cplx& z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
    return buf;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

// --- human rendering of a report: stable key/value text ---

std::string scalar_text(const json& v) {
    if (v.is_null()) return "none";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return num(v.get<double>());
    return v.dump();
}

bool flat(const json& v) {
    if (!v.is_array()) return !v.is_object();
    for (const auto& x : v)
        if (x.is_array() || x.is_object()) return false;
    return true;
}

void render(const json& j, int indent, std::ostream& o);

void render_value(const std::string& key, const json& v, int indent, std::ostream& o) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (v.is_array() && flat(v)) {
        o << pad << key << ": [";
        for (std::size_t i = 0; i < v.size(); ++i) o << (i ? ", " : "") << scalar_text(v[i]);
        o << "]\n";
    } else if (v.is_array()) {
        o << pad << key << ":" << (v.empty() ? " []" : "") << "\n";
        for (std::size_t i = 0; i < v.size(); ++i) render_value("[" + std::to_string(i) + "]", v[i], indent + 2, o);
    } else if (v.is_object()) {
        o << pad << key << ":\n";
        render(v, indent + 2, o);
    } else {
        o << pad << key << ": " << scalar_text(v) << "\n";
    }
}

void render(const json& j, int indent, std::ostream& o) {
    for (auto it = j.begin(); it != j.end(); ++it) render_value(it.key(), it.value(), indent, o);
}

// --- sections ---

json opt_int(const std::optional<int>& x) { return x ? json(*x) : json(nullptr); }

json dh_json(const Linkage& L, double tol) {
    const DHTable t = dh_table(L, tol);
    json rows = json::array();
    const std::size_t n = L.size();
    for (std::size_t k = 0; k < n; ++k) {
        json r;
        r["pair"] = {k, (k + 1) % n};
        if (!t.rows[k]) {
            r["kind"] = "involves a P joint";
            rows.push_back(r);
            continue;
        }
        const DHParams& p = *t.rows[k];
        r["alpha"] = p.alpha;
        r["c"] = p.c;
        r["d"] = p.d;
        r["b"] = p.parallel ? json(nullptr) : json(p.b);
        r["o"] = p.o_defined ? json(p.o) : json(nullptr);
        r["parallel"] = p.parallel;
        if (t.exact && (*t.exact)[k]) {
            const auto& e = *(*t.exact)[k];
            json x;
            x["c"] = to_string(e.c);
            x["b"] = e.parallel ? json(nullptr) : json(to_string(e.b));
            x["o"] = e.o_defined ? json(to_string(e.o)) : json(nullptr);
            r["exact"] = x;
        }
        rows.push_back(r);
    }
    json out;
    out["rows"] = rows;
    out["orientation"] = t.orientation;
    out["compatible_pairs"] = t.compatible_pairs;
    return out;
}

json mobility_json(const MobilityEstimate& e, int samples, std::uint64_t seed) {
    json out;
    out["samples"] = samples;
    out["seed"] = seed;
    out["mobility"] = opt_int(e.mobility);
    out["conclusive"] = !e.inconclusive();
    json h = json::object();
    for (const auto& [k, v] : e.histogram) h[std::to_string(k)] = v;
    out["histogram"] = h;
    out["found"] = e.found_count;
    out["regular"] = e.regular_count;
    out["frozen_joints"] = e.frozen_joints;
    json list = json::array();
    for (std::size_t i = 0; i < e.samples.size(); ++i) {
        json s;
        s["index"] = i;
        if (!e.samples[i]) {
            s["found"] = false;
            list.push_back(s);
            continue;
        }
        const MobilitySample& m = *e.samples[i];
        s["found"] = true;
        s["regular"] = m.regular;
        s["rank"] = m.rank;
        s["null_dim"] = m.null_dim;
        s["residual"] = m.residual_norm;
        std::vector<double> t;
        for (const auto& p : m.config) t.push_back(p.value);
        s["config"] = t;
        list.push_back(s);
    }
    out["sample_list"] = list;
    return out;
}

json view_json(const std::optional<LabelView>& v) { return v ? json(describe(*v)) : json(nullptr); }

json classify_json(const ClassificationReport& r, const LinkageDocument& doc, double tol) {
    json out;
    out["linkage"] = r.linkage_id;
    out["signature"] = r.signature;
    out["dh"] = dh_json(doc.linkage, tol);
    out["parallel_groups"] = r.parallel_groups;
    if (r.concurrency_point) {
        const auto& p = *r.concurrency_point;
        out["concurrency_point"] = {p[0], p[1], p[2]};
    } else {
        out["concurrency_point"] = nullptr;
    }
    json bt = json::array();
    for (const auto& s : r.bennett_triples) bt.push_back(describe(s));
    out["bennett_triples"] = bt;
    json ms = json::array();
    for (const auto& m : r.matches) {
        json x;
        x["rule"] = m.rule;
        x["case"] = m.case_label;
        x["strength"] = std::string(to_string(m.strength));
        x["stated_mobility"] = opt_int(m.stated_mobility);
        x["relabelling"] = view_json(m.view);
        x["evidence"] = m.evidence;
        ms.push_back(x);
    }
    out["matches"] = ms;
    out["mobility_bound"] = r.mobility_bound;
    out["bound_reasons"] = r.bound_reasons;
    out["predicted_mobility"] = opt_int(r.predicted_mobility);
    out["estimated_mobility"] = opt_int(r.estimated_mobility);
    json h = json::object();
    for (const auto& [k, v] : r.histogram) h[std::to_string(k)] = v;
    out["histogram"] = h;
    out["frozen_joints"] = r.frozen_joints;
    json fs = json::array();
    for (const auto& f : r.freeze_scan) {
        json x;
        x["joint"] = f.joint;
        x["value"] = f.value;
        x["mobility"] = opt_int(f.mobility);
        x["co_frozen"] = f.co_frozen;
        fs.push_back(x);
    }
    out["freeze_scan"] = fs;
    if (doc.expected.mobility || !doc.expected.theorem_case.empty()) {
        json e;
        e["mobility"] = opt_int(doc.expected.mobility);
        e["case"] = doc.expected.theorem_case;
        out["expected"] = e;
    }
    out["contradictions"] = r.contradictions;
    return out;
}

json diagnosis_json(const FactorDiagnosis& d) {
    json out;
    json pp = json::array();
    for (auto f : d.pair_products) pp.push_back(std::string(to_string(f)));
    out["pair_products"] = pp;
    json w = json::array();
    for (const auto& x : d.minimal_windows) w.push_back({x.start, x.length});
    out["minimal_windows"] = w;
    json im = json::array();
    for (const auto& f : d.implied) {
        json x;
        x["kind"] = f.kind == ImpliedFact::Kind::Parallel ? "parallel" : "bennett";
        x["joints"] = f.joints;
        x["confirmed"] = f.confirmed;
        x["source"] = f.source;
        im.push_back(x);
    }
    out["implied"] = im;
    out["primal_only"] = d.primal_only;
    return out;
}

bool exact_linkage(const Linkage& L) {
    for (const auto& j : L.joints)
        if (!j.axis.exact) return false;
    for (const auto& l : L.links)
        if (!l.exact) return false;
    return true;
}

struct Outcome {
    json section;
    int code = kExitOk;
};

Outcome run_bonds_verify(const LinkageDocument& doc, const std::vector<std::string>& given, double tol) {
    std::vector<ExactComplexConfiguration> bonds = doc.known_bonds;
    for (const auto& text : given) {
        ExactComplexConfiguration c;
        for (const auto& s : split_list(text)) c.emplace_back(parse_gauss_rational(s));
        bonds.push_back(std::move(c));
    }
    const Linkage& L = doc.linkage;
    const bool exact = exact_linkage(L);
    Outcome o;
    json list = json::array();
    for (const auto& b : bonds) {
        if (b.size() != L.size()) throw std::invalid_argument("bond length does not match joint count");
        const ComplexConfiguration cf = config_cast<Cplx>(b);
        json x;
        std::vector<std::string> t;
        for (const auto& p : b) t.push_back(to_string(p.value));
        x["config"] = t;
        const bool ok = exact ? is_bond(L, b) : is_bond(L, cf, tol);
        x["arithmetic"] = exact ? "exact" : "floating";
        x["is_bond"] = ok;
        const auto att = exact ? attachment_set(L, b) : attachment_set(L, cf, tol);
        x["attachment"] = att;
        json ch = json::array();
        for (const auto& c : chains_of(att, L.size())) ch.push_back({c.start, c.length});
        x["chains"] = ch;
        if (ok) x["diagnosis"] = diagnosis_json(factor_diagnose(L, cf, tol));
        else o.code = kExitInvalid;
        list.push_back(x);
    }
    o.section["bonds"] = list;
    return o;
}

Outcome run_bonds_search(const LinkageDocument& doc, const std::string& pattern, std::uint64_t seed, int restarts) {
    SolverOptions opt;
    if (restarts > 0) opt.restarts = restarts;
    const auto slots = parse_pattern(pattern);
    const auto found = search_bonds(doc.linkage, slots, seed, opt);
    Outcome o;
    o.section["pattern"] = pattern_to_string(slots);
    o.section["seed"] = seed;
    o.section["restarts"] = opt.restarts;
    json list = json::array();
    for (const auto& b : found) {
        json x;
        std::vector<std::string> t;
        for (const auto& p : b.config) t.push_back(cplx(p.value));
        x["config"] = t;
        if (b.exact) {
            std::vector<std::string> e;
            for (const auto& p : *b.exact) e.push_back(to_string(p.value));
            x["exact"] = e;
        } else {
            x["exact"] = nullptr;
        }
        x["attachment"] = b.attachment;
        x["residual"] = b.residual;
        list.push_back(x);
    }
    o.section["found"] = list;
    o.section["note"] = "search is not exhaustive";
    return o;
}

Outcome run_verify_config(const LinkageDocument& doc, const std::vector<std::string>& given, double tol) {
    std::vector<ExactConfiguration> configs = doc.known_configs;
    for (const auto& text : given) {
        ExactConfiguration c;
        for (const auto& s : split_list(text)) {
            if (s == "inf") c.push_back(Param<Rational>::at_infinity());
            else c.emplace_back(parse_rational(s));
        }
        configs.push_back(std::move(c));
    }
    const Linkage& L = doc.linkage;
    const bool exact = exact_linkage(L);
    Outcome o;
    json list = json::array();
    for (const auto& c : configs) {
        if (c.size() != L.size()) throw std::invalid_argument("configuration length does not match joint count");
        json x;
        std::vector<std::string> t;
        for (const auto& p : c) t.push_back(p.infinite ? "inf" : to_string(p.value));
        x["config"] = t;
        bool closed = false;
        if (exact) {
            const auto p = loop_product(L, c);
            closed = is_closed(L, c);
            x["arithmetic"] = "exact";
            x["product_scalar"] = to_string(p.coord(0));
        } else {
            const Configuration cd = config_cast<double>(c);
            closed = is_closed(L, cd, tol);
            x["arithmetic"] = "floating";
            x["residual"] = closure_residual(L, cd).norm();
        }
        x["closed"] = closed;
        if (!closed) o.code = kExitInvalid;
        list.push_back(x);
    }
    o.section["configs"] = list;
    return o;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Closed-loop linkage analysis: DH tables, mobility, classification and bonds."};
    app.name("overcon");
    app.fallthrough();
    app.require_subcommand(1);

    bool machine = false;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    app.add_flag("--machine", machine, "Print a single JSON document");
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--tol", tol, "Floating tolerance")->capture_default_str();

    std::string file, pattern, name;
    int samples = 20, freeze_values = 2, restarts = 0;
    std::vector<std::string> given;

    auto* dh = app.add_subcommand("dh", "DH table of the loop");
    dh->add_option("linkage", file, "Linkage file or examples/<name>")->required();

    auto* mob = app.add_subcommand("mobility", "Numerical mobility estimate");
    mob->add_option("linkage", file, "Linkage file or examples/<name>")->required();
    mob->add_option("--samples", samples, "Number of sampled configurations")->capture_default_str();

    auto* cls = app.add_subcommand("classify", "Classification report with consistency checks");
    cls->add_option("linkage", file, "Linkage file or examples/<name>")->required();
    cls->add_option("--samples", samples, "Number of sampled configurations")->capture_default_str();
    cls->add_option("--freeze-values", freeze_values, "Values per joint in the freeze scan")->capture_default_str();

    auto* bonds = app.add_subcommand("bonds", "Bond verification and search");
    bonds->require_subcommand(1);
    auto* bverify = bonds->add_subcommand("verify", "Check the document's bonds (and --bond values)");
    bverify->add_option("linkage", file)->required();
    bverify->add_option("--bond", given, "Comma separated Gaussian rationals");
    auto* bsearch = bonds->add_subcommand("search", "Search bonds with a slot pattern");
    bsearch->add_option("linkage", file)->required();
    bsearch->add_option("--pattern", pattern, "Slots f, +i, -i, 0 separated by commas")->required();
    bsearch->add_option("--restarts", restarts, "Solver restarts (default 50)");

    auto* vcfg = app.add_subcommand("verify-config", "Check closure of the document's configurations");
    vcfg->add_option("linkage", file)->required();
    vcfg->add_option("--config", given, "Comma separated rationals or inf");

    auto* ex = app.add_subcommand("examples", "Bundled fixtures");
    ex->require_subcommand(1);
    auto* exlist = ex->add_subcommand("list", "List bundled fixtures");
    auto* exdump = ex->add_subcommand("dump", "Print a bundled fixture as a linkage document");
    exdump->add_option("name", name)->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    std::string echo = "overcon";
    for (const auto& a : args) echo += " " + a;

    json report;
    report["command"] = echo;
    int code = kExitOk;
    try {
        if (*exdump) {
            std::string n = name;
            if (n.rfind("examples/", 0) == 0) n = n.substr(9);
            out << dump_document(corpus_document(n));
            return kExitOk;
        }
        if (*exlist) {
            json list = json::array();
            for (const auto& n : corpus_names()) {
                const auto d = corpus_document(n);
                json x;
                x["name"] = n;
                x["joints"] = joint_signature(d.linkage);
                x["expected_mobility"] = opt_int(d.expected.mobility);
                x["case"] = d.expected.theorem_case;
                list.push_back(x);
            }
            report["examples"] = list;
        } else {
            const LinkageDocument doc = resolve_document(file);
            report["linkage"] = doc.linkage.name;
            if (*dh) {
                report["dh"] = dh_json(doc.linkage, tol);
            } else if (*mob) {
                report["mobility"] = mobility_json(mobility_estimate(doc.linkage, samples, seed), samples, seed);
            } else if (*cls) {
                ConsistencyOptions opt;
                opt.samples = samples;
                opt.seed = seed;
                opt.tol = tol;
                opt.freeze_values = freeze_values;
                const ClassificationReport r = consistency_check(doc.linkage, opt);
                report["classification"] = classify_json(r, doc, tol);
                if (!r.contradictions.empty()) code = kExitContradiction;
            } else if (*bverify) {
                Outcome o = run_bonds_verify(doc, given, tol);
                report["bonds"] = o.section["bonds"];
                code = o.code;
            } else if (*bsearch) {
                Outcome o = run_bonds_search(doc, pattern, seed, restarts);
                report["bond_search"] = o.section;
                code = o.code;
            } else if (*vcfg) {
                Outcome o = run_verify_config(doc, given, tol);
                report["configs"] = o.section["configs"];
                code = o.code;
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    report["exit_status"] = code;
    if (machine) out << report.dump(2) << "\n";
    else render(report, 0, out);
    return code;
}

}  // namespace overcon
