#include "overcon/bonds.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "overcon/geometry.hpp"

namespace overcon {

double bond_scale(const Linkage& L, const ComplexConfiguration& c) {
    double s = 1.0;
    for (std::size_t k = 0; k < L.size(); ++k)
        s *= coord_norm(bond_motion(L.joints[k], c[k].value)) * coord_norm(L.links[k].approx);
    return s;
}

bool is_bond(const Linkage& L, const ExactComplexConfiguration& c) { return bond_product(L, c).is_zero(); }

bool is_bond(const Linkage& L, const ComplexConfiguration& c, double rel_tol) {
    return coord_norm(bond_product(L, c)) <= rel_tol * bond_scale(L, c);
}

std::vector<std::size_t> attachment_set(const Linkage& L, const ExactComplexConfiguration& c) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < L.size(); ++k)
        if (has_zero_norm(bond_motion(L.joints[k], c[k].value))) out.push_back(k);
    return out;
}

std::vector<std::size_t> attachment_set(const Linkage& L, const ComplexConfiguration& c, double tol) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < L.size(); ++k)
        if (has_zero_norm(bond_motion(L.joints[k], c[k].value), tol)) out.push_back(k);
    return out;
}

std::vector<Chain> chains_of(const std::vector<std::size_t>& indices, std::size_t n) {
    std::vector<bool> in(n, false);
    for (std::size_t k : indices) in.at(k) = true;
    if (std::all_of(in.begin(), in.end(), [](bool b) { return b; })) return n ? std::vector<Chain>{{0, n}} : std::vector<Chain>{};
    std::vector<Chain> out;
    for (std::size_t s = 0; s < n; ++s) {
        if (!in[s] || in[(s + n - 1) % n]) continue;
        std::size_t len = 0;
        while (in[(s + len) % n]) ++len;
        out.push_back({s, len});
    }
    return out;
}

bool is_chain(const std::vector<std::size_t>& indices, std::size_t n) { return chains_of(indices, n).size() == 1; }

std::vector<Slot> parse_pattern(std::string_view text) {
    std::vector<Slot> out;
    std::string s(text);
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char ch) { return std::isspace(ch); }),
                  tok.end());
        if (tok == "f" || tok == "*" || tok == "free") out.push_back(Slot::Free);
        else if (tok == "i" || tok == "+i") out.push_back(Slot::PlusI);
        else if (tok == "-i") out.push_back(Slot::MinusI);
        else if (tok == "0") out.push_back(Slot::Zero);
        else throw std::invalid_argument("bad pattern slot '" + tok + "'");
    }
    return out;
}

std::string pattern_to_string(const std::vector<Slot>& pattern) {
    std::string out;
    for (std::size_t k = 0; k < pattern.size(); ++k) {
        if (k) out += ",";
        switch (pattern[k]) {
            case Slot::Free: out += "f"; break;
            case Slot::PlusI: out += "+i"; break;
            case Slot::MinusI: out += "-i"; break;
            case Slot::Zero: out += "0"; break;
        }
    }
    return out;
}

Bond make_bond(const Linkage& L, const ExactComplexConfiguration& c) {
    Bond b;
    b.config = config_cast<Cplx>(c);
    b.exact = c;
    b.attachment = attachment_set(L, c);
    b.residual = 0;
    return b;
}

namespace {

using CDQ = DualQuaternion<Cplx>;

Eigen::Matrix<Cplx, 8, 1> product_vector(const Linkage& L, const ComplexConfiguration& c) {
    const auto p = bond_product(L, c).coords();
    Eigen::Matrix<Cplx, 8, 1> v;
    for (int k = 0; k < 8; ++k) v(k) = p[static_cast<std::size_t>(k)];
    return v;
}

/// Complex 8 x n Jacobian of the bond product (d(t - h)/dt = 1).
Eigen::MatrixXcd product_jacobian(const Linkage& L, const ComplexConfiguration& c) {
    const std::size_t n = L.size();
    std::vector<CDQ> factor(n);
    for (std::size_t k = 0; k < n; ++k)
        factor[k] = bond_motion(L.joints[k], c[k].value) * L.links[k].as<Cplx>();
    std::vector<CDQ> prefix(n + 1, CDQ::one()), suffix(n + 1, CDQ::one());
    for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] * factor[k];
    for (std::size_t k = n; k-- > 0;) suffix[k] = factor[k] * suffix[k + 1];
    Eigen::MatrixXcd J(8, static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const auto d = (prefix[k] * L.links[k].as<Cplx>() * suffix[k + 1]).coords();
        for (int m = 0; m < 8; ++m) J(m, static_cast<Eigen::Index>(k)) = d[static_cast<std::size_t>(m)];
    }
    return J;
}

Cplx slot_value(Slot s) {
    switch (s) {
        case Slot::PlusI: return {0, 1};
        case Slot::MinusI: return {0, -1};
        default: return {0, 0};
    }
}

double relative_residual(const Linkage& L, const ComplexConfiguration& c) {
    return coord_norm(bond_product(L, c)) / bond_scale(L, c);
}

/// Levenberg-Marquardt on the stacked real and imaginary parts over the slots
/// listed in `vars`.
bool solve_slots(const Linkage& L, ComplexConfiguration& c, const std::vector<std::size_t>& vars,
                 const SolverOptions& opt, Cplx shift = 0.0, double target = 1e-13) {
    auto res = [&](const ComplexConfiguration& x) {
        DualQuaternion<Cplx> p = bond_product(L, x);
        p.primal[0] -= shift;
        return coord_norm(p) / bond_scale(L, x);
    };
    double fn = res(c);
    if (!std::isfinite(fn)) return false;
    if (vars.empty()) return fn <= target;
    const Eigen::Index m = static_cast<Eigen::Index>(vars.size());
    double lambda = 1e-3;
    for (int it = 0; it < opt.max_iterations && fn > target; ++it) {
        const double scale = bond_scale(L, c);
        const Eigen::MatrixXcd Jc = product_jacobian(L, c) / scale;
        Eigen::Matrix<Cplx, 8, 1> F = product_vector(L, c);
        F(0) -= shift;
        F /= scale;
        Eigen::MatrixXd J(16, 2 * m);
        Eigen::VectorXd r(16);
        for (int i = 0; i < 8; ++i) {
            r(i) = F(i).real();
            r(i + 8) = F(i).imag();
            for (Eigen::Index k = 0; k < m; ++k) {
                const Cplx d = Jc(i, static_cast<Eigen::Index>(vars[static_cast<std::size_t>(k)]));
                J(i, 2 * k) = d.real();
                J(i, 2 * k + 1) = -d.imag();
                J(i + 8, 2 * k) = d.imag();
                J(i + 8, 2 * k + 1) = d.real();
            }
        }
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool accepted = false;
        while (lambda < 1e12) {
            Eigen::MatrixXd M = A;
            M.diagonal().array() += lambda;
            const Eigen::VectorXd delta = M.ldlt().solve(-g);
            ComplexConfiguration trial = c;
            for (Eigen::Index k = 0; k < m; ++k)
                trial[vars[static_cast<std::size_t>(k)]].value += Cplx(delta(2 * k), delta(2 * k + 1));
            const double tn = res(trial);
            if (std::isfinite(tn) && tn < fn) {
                c = std::move(trial);
                fn = tn;
                lambda = std::max(lambda / 3, 1e-15);
                accepted = true;
                break;
            }
            lambda *= 4;
        }
        if (!accepted) break;
    }
    return fn <= target;
}

bool rationalize_config(const ComplexConfiguration& c, ExactComplexConfiguration& out,
                        std::vector<std::size_t>* failed = nullptr) {
    out.clear();
    bool ok = true;
    for (std::size_t k = 0; k < c.size(); ++k) {
        Rational re, im;
        const bool a = rationalize(c[k].value.real(), 1000, 1e-6, re);
        const bool b = rationalize(c[k].value.imag(), 1000, 1e-6, im);
        if (!a || !b) {
            ok = false;
            if (failed) failed->push_back(k);
        }
        out.emplace_back(GaussRational(re, im));
    }
    return ok;
}

Cplx snap(Cplx z) { return {std::round(z.real() * 16) / 16, std::round(z.imag() * 16) / 16}; }

/// Tries to turn a floating bond into an exact one. Slots that do not
/// rationalize are pinned to a nearby rational and the rest re-solved, which
/// handles positive dimensional bond families.
std::optional<ExactComplexConfiguration> exact_recheck(const Linkage& L, ComplexConfiguration c,
                                                       std::vector<std::size_t> free, const SolverOptions& opt) {
    bool has_exact = true;
    for (const auto& j : L.joints) has_exact = has_exact && j.axis.has_exact();
    for (const auto& l : L.links) has_exact = has_exact && l.has_exact();
    if (!has_exact) return std::nullopt;
    for (std::size_t round = 0; round <= free.size(); ++round) {
        ExactComplexConfiguration ex;
        std::vector<std::size_t> failed;
        if (rationalize_config(c, ex, &failed)) {
            if (is_bond(L, ex)) return ex;
            return std::nullopt;
        }
        auto it = std::find_if(free.begin(), free.end(),
                               [&](std::size_t k) { return std::find(failed.begin(), failed.end(), k) != failed.end(); });
        if (it == free.end()) return std::nullopt;
        c[*it].value = snap(c[*it].value);
        free.erase(it);
        if (!solve_slots(L, c, free, opt)) return std::nullopt;
    }
    return std::nullopt;
}

std::vector<std::size_t> all_slots(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = k;
    return v;
}

}  // namespace

bool in_configuration_closure(const Linkage& L, const ComplexConfiguration& c, std::uint64_t seed) {
    const std::size_t n = L.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const double scale = bond_scale(L, c);
    SolverOptions opt;
    opt.max_iterations = 400;
    const std::vector<std::size_t> vars = all_slots(n);
    auto dist = [&](const ComplexConfiguration& z) {
        double d = 0;
        for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(z[k].value - c[k].value));
        return d;
    };
    const double taus[] = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    for (int attempt = 0; attempt < 10; ++attempt) {
        ComplexConfiguration z = c;
        const double radius = attempt < 2 ? 1e-3 : attempt < 4 ? 1e-2 : attempt < 7 ? 5e-2 : 0.2;
        for (auto& p : z) p.value += radius * Cplx(g(rng), g(rng));
        bool ok = true;
        for (double tau : taus) {
            if (!solve_slots(L, z, vars, opt, Cplx(tau * scale, 0), 1e-3 * tau)) {
                ok = false;
                break;
            }
        }
        if (ok) return dist(z) < 0.1;
    }
    return false;
}

namespace {

/// Damped Newton on the projective closure equations P_j / P_0 = 0 (j = 1..7)
/// over the listed slots.
bool solve_closure(const Linkage& L, ComplexConfiguration& c, const std::vector<std::size_t>& vars,
                   const SolverOptions& opt) {
    // attainable accuracy degrades as P_0 shrinks near the zero locus
    auto target_at = [&](const ComplexConfiguration& x) {
        return 1e-12 + 1e-14 * bond_scale(L, x) / std::abs(product_vector(L, x)(0));
    };
    auto eval = [&](const ComplexConfiguration& x, Eigen::Matrix<Cplx, 7, 1>& F) {
        const Eigen::Matrix<Cplx, 8, 1> P = product_vector(L, x);
        if (std::abs(P(0)) == 0.0) return false;
        F = P.tail<7>() / P(0);
        return F.allFinite();
    };
    Eigen::Matrix<Cplx, 7, 1> F;
    if (!eval(c, F)) return false;
    double fn = F.norm();
    const Eigen::Index m = static_cast<Eigen::Index>(vars.size());
    if (m == 0) return fn <= target_at(c);
    double lambda = 1e-3;
    for (int it = 0; it < opt.max_iterations && fn > 1e-12; ++it) {
        const Eigen::Matrix<Cplx, 8, 1> P = product_vector(L, c);
        const Eigen::MatrixXcd Jp = product_jacobian(L, c);
        Eigen::MatrixXd J(14, 2 * m);
        Eigen::VectorXd r(14);
        for (int i = 0; i < 7; ++i) {
            r(i) = F(i).real();
            r(i + 7) = F(i).imag();
            for (Eigen::Index k = 0; k < m; ++k) {
                const Eigen::Index col = static_cast<Eigen::Index>(vars[static_cast<std::size_t>(k)]);
                const Cplx d = (Jp(i + 1, col) * P(0) - P(i + 1) * Jp(0, col)) / (P(0) * P(0));
                J(i, 2 * k) = d.real();
                J(i, 2 * k + 1) = -d.imag();
                J(i + 7, 2 * k) = d.imag();
                J(i + 7, 2 * k + 1) = d.real();
            }
        }
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd grad = J.transpose() * r;
        bool accepted = false;
        while (lambda < 1e12) {
            Eigen::MatrixXd M = A;
            M.diagonal().array() += lambda;
            const Eigen::VectorXd delta = M.ldlt().solve(-grad);
            ComplexConfiguration trial = c;
            for (Eigen::Index k = 0; k < m; ++k)
                trial[vars[static_cast<std::size_t>(k)]].value += Cplx(delta(2 * k), delta(2 * k + 1));
            Eigen::Matrix<Cplx, 7, 1> Ft;
            if (eval(trial, Ft) && Ft.norm() < fn) {
                c = std::move(trial);
                F = Ft;
                fn = Ft.norm();
                lambda = std::max(lambda / 3, 1e-15);
                accepted = true;
                break;
            }
            lambda *= 4;
        }
        if (!accepted) break;
    }
    return fn <= target_at(c);
}

/// Approaches a bond with the given pattern from inside the configuration
/// set: up to `mobility` pattern slots are pinned at shrinking offsets from
/// their targets while the remaining slots keep the loop closed. `c` holds the
/// start values of the free slots.
std::optional<ComplexConfiguration> approach_bond(const Linkage& L, const std::vector<Slot>& pattern,
                                                  ComplexConfiguration c, std::mt19937_64& rng,
                                                  const SolverOptions& opt, int mobility) {
    const std::size_t n = pattern.size();
    std::normal_distribution<double> g;
    std::vector<std::size_t> free_slots, pinned, moving;
    std::vector<Cplx> offset(n);
    int to_pin = mobility;
    for (std::size_t k = 0; k < n; ++k) {
        if (pattern[k] == Slot::Free) {
            free_slots.push_back(k);
            moving.push_back(k);
            continue;
        }
        const double re = g(rng);
        const double im = g(rng);
        offset[k] = Cplx(re, im) / std::hypot(re, im);
        if (to_pin > 0) {
            pinned.push_back(k);
            --to_pin;
        } else {
            moving.push_back(k);
        }
        c[k].value = slot_value(pattern[k]) + 0.1 * offset[k];
    }
    SolverOptions path = opt;
    path.max_iterations = std::max(opt.max_iterations, 400);
    ComplexConfiguration prev;
    double reached = 1;
    for (double sigma = 0.1; sigma > 1e-5; sigma *= 0.5) {
        ComplexConfiguration trial = c;
        for (std::size_t k : pinned) trial[k].value = slot_value(pattern[k]) + sigma * offset[k];
        if (!solve_closure(L, trial, moving, path)) break;
        prev = std::move(c);
        c = std::move(trial);
        reached = sigma;
    }
    if (reached > 2e-3) return std::nullopt;
    // Richardson step toward sigma = 0 from the last two levels
    for (std::size_t k : moving) c[k].value = 2.0 * c[k].value - prev[k].value;
    for (std::size_t k = 0; k < n; ++k) {
        if (pattern[k] == Slot::Free) continue;
        if (std::abs(c[k].value - slot_value(pattern[k])) > 1e-2) return std::nullopt;
        c[k].value = slot_value(pattern[k]);
    }
    if (!solve_slots(L, c, free_slots, opt)) return std::nullopt;
    if (!is_bond(L, c)) return std::nullopt;
    return c;
}

std::vector<std::size_t> free_slots_of(const std::vector<Slot>& pattern) {
    std::vector<std::size_t> v;
    for (std::size_t k = 0; k < pattern.size(); ++k)
        if (pattern[k] == Slot::Free) v.push_back(k);
    return v;
}

std::optional<Bond> one_search(const Linkage& L, const std::vector<Slot>& pattern, std::uint64_t seed,
                               const SolverOptions& opt, int mobility) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-opt.start_range, opt.start_range);
    ComplexConfiguration start(pattern.size());
    for (std::size_t k = 0; k < pattern.size(); ++k) {
        if (pattern[k] != Slot::Free) continue;
        const double re = dist(rng);
        const double im = dist(rng);
        start[k].value = Cplx(re, im);
    }
    auto c = approach_bond(L, pattern, start, rng, opt, mobility);
    if (!c) return std::nullopt;
    Bond b;
    b.config = *c;
    b.residual = relative_residual(L, *c);
    b.exact = exact_recheck(L, *c, free_slots_of(pattern), opt);
    if (b.exact && !in_configuration_closure(L, config_cast<Cplx>(*b.exact), seed ^ 0x2545f491ULL))
        b.exact.reset();
    if (b.exact) {
        b.config = config_cast<Cplx>(*b.exact);
        b.residual = 0;
        b.attachment = attachment_set(L, *b.exact);
    } else {
        b.attachment = attachment_set(L, *c);
    }
    return b;
}

void check_pattern(const Linkage& L, const std::vector<Slot>& pattern) {
    if (pattern.size() != L.size()) throw std::invalid_argument("pattern length does not match joint count");
    std::size_t fixed = 0;
    for (std::size_t k = 0; k < pattern.size(); ++k) {
        if (pattern[k] == Slot::Free) continue;
        ++fixed;
        if (pattern[k] == Slot::Zero && L.joints[k].kind != JointKind::P)
            throw std::invalid_argument("slot 0 only annihilates P joints");
        if ((pattern[k] == Slot::PlusI || pattern[k] == Slot::MinusI) && L.joints[k].kind != JointKind::R)
            throw std::invalid_argument("slots +-i only annihilate R joints");
    }
    if (fixed < 2) throw std::invalid_argument("bond search needs at least two non-free slots");
    for (const auto& j : L.joints)
        if (j.kind == JointKind::H) throw std::invalid_argument("bonds of H joints are not supported");
}

/// Mobility used to decide how many pattern slots to pin; an inconclusive
/// estimate pins them all.
int search_mobility(const Linkage& L, std::uint64_t seed) {
    const MobilityEstimate e = mobility_estimate_serial(L, 8, seed);
    return e.mobility ? *e.mobility : static_cast<int>(L.size());
}

bool same_point(const ComplexConfiguration& a, const ComplexConfiguration& b) {
    for (std::size_t k = 0; k < a.size(); ++k)
        if (std::abs(a[k].value - b[k].value) > 1e-6) return false;
    return true;
}

std::vector<Bond> merge(std::vector<std::optional<Bond>> found) {
    std::vector<Bond> out;
    for (auto& b : found) {
        if (!b) continue;
        bool dup = false;
        for (const auto& o : out)
            if (same_point(o.config, b->config)) dup = true;
        if (!dup) out.push_back(std::move(*b));
    }
    return out;
}

}  // namespace

std::vector<Bond> search_bonds(const Linkage& L, const std::vector<Slot>& pattern, std::uint64_t seed,
                               const SolverOptions& opt) {
    check_pattern(L, pattern);
    const int m = search_mobility(L, seed);
    if (m == 0) return {};
    std::vector<std::optional<Bond>> found(static_cast<std::size_t>(opt.restarts));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < opt.restarts; ++i)
        found[static_cast<std::size_t>(i)] =
            one_search(L, pattern, derive_seed(seed, static_cast<std::uint64_t>(i)), opt, m);
    return merge(std::move(found));
}

std::vector<Bond> search_bonds_serial(const Linkage& L, const std::vector<Slot>& pattern, std::uint64_t seed,
                                      const SolverOptions& opt) {
    check_pattern(L, pattern);
    const int m = search_mobility(L, seed);
    if (m == 0) return {};
    std::vector<std::optional<Bond>> found(static_cast<std::size_t>(opt.restarts));
    for (int i = 0; i < opt.restarts; ++i)
        found[static_cast<std::size_t>(i)] =
            one_search(L, pattern, derive_seed(seed, static_cast<std::uint64_t>(i)), opt, m);
    return merge(std::move(found));
}

int bond_local_dimension(const Linkage& L, const ComplexConfiguration& c, std::uint64_t seed, int trials) {
    const std::size_t n = L.size();
    std::vector<Slot> pattern(n, Slot::Free);
    for (std::size_t k : attachment_set(L, c)) {
        if (L.joints[k].kind == JointKind::P) pattern[k] = Slot::Zero;
        else pattern[k] = c[k].value.imag() > 0 ? Slot::PlusI : Slot::MinusI;
    }
    const int mobility = search_mobility(L, seed);
    if (mobility == 0) return 0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Eigen::VectorXcd> secants;
    for (int t = 0; t < trials; ++t) {
        ComplexConfiguration start = c;
        for (std::size_t k = 0; k < n; ++k) {
            const double re = g(rng);
            const double im = g(rng);
            if (pattern[k] == Slot::Free) start[k].value += 0.02 * Cplx(re, im);
        }
        auto z = approach_bond(L, pattern, start, rng, {}, mobility);
        if (!z) continue;
        Eigen::VectorXcd d(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) d(static_cast<Eigen::Index>(k)) = (*z)[k].value - c[k].value;
        // keep nearby limits only; curvature limits secant accuracy to ~|d|
        if (d.norm() > 1e-6 && d.norm() < 0.1) secants.push_back(d / d.norm());
    }
    if (secants.empty()) return 0;
    Eigen::MatrixXcd S(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(secants.size()));
    for (std::size_t k = 0; k < secants.size(); ++k) S.col(static_cast<Eigen::Index>(k)) = secants[k];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > 0.2 * s(0)) ++rank;
    return rank;
}

std::string_view to_string(FactorClass f) {
    switch (f) {
        case FactorClass::Zero: return "ZERO";
        case FactorClass::EpsMultiple: return "EPS_MULTIPLE";
        case FactorClass::Generic: return "GENERIC";
    }
    return "?";
}

FactorDiagnosis factor_diagnose(const Linkage& L, const ComplexConfiguration& c, double tol) {
    const std::size_t n = L.size();
    FactorDiagnosis out;
    out.attachment = attachment_set(L, c, tol);
    if (n == 0) return out;
    const HomeAxes home = home_axes(L);
    // Axes for indices 0..2n-1; the second lap is conjugated by the total link.
    std::vector<DualQuaternion<double>> axis(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        axis[k] = home.axes[k].approx;
        axis[k + n] = conjugate_by(home.total, home.axes[k]).approx;
    }
    std::vector<CDQ> f(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) f[i] = CDQ(c[i % n].value) - dq_cast<Cplx>(axis[i]);

    auto classify = [&](const CDQ& p, double scale) {
        if (is_negligible(p, scale, tol)) return FactorClass::Zero;
        if (is_eps_multiple(p, scale, tol)) return FactorClass::EpsMultiple;
        return FactorClass::Generic;
    };
    auto is_r = [&](std::size_t i) { return L.joints[i % n].kind == JointKind::R; };
    auto attached = [&](std::size_t i) {
        return std::find(out.attachment.begin(), out.attachment.end(), i % n) != out.attachment.end();
    };
    auto add_fact = [&](ImpliedFact::Kind kind, std::vector<std::size_t> idx, bool confirmed, std::string src) {
        std::vector<std::size_t> joints;
        for (std::size_t i : idx) joints.push_back(i % n);
        for (const auto& e : out.implied)
            if (e.kind == kind && e.joints == joints) return;
        out.implied.push_back({kind, std::move(joints), confirmed, std::move(src)});
    };
    auto parallel = [&](std::size_t a, std::size_t b) { return are_parallel(axis[a], axis[b], 1e-9); };
    auto bennett = [&](std::size_t a) {
        return is_bennett_triple(axis[a], axis[a + 1], axis[a + 2], 1e-9) != BennettSign::No;
    };

    out.primal_only = true;
    for (std::size_t k = 0; k < n; ++k)
        if (!is_eps_multiple(CDQ(f[k].dual, Quaternion<Cplx>()), coord_norm(f[k]), tol)) out.primal_only = false;

    if (n >= 2) {
        for (std::size_t k = 0; k < n; ++k) {
            const CDQ p = f[k] * f[k + 1];
            const FactorClass cls = classify(p, coord_norm(f[k]) * coord_norm(f[k + 1]));
            out.pair_products.push_back(cls);
            if (cls != FactorClass::Generic && is_r(k) && is_r(k + 1) && attached(k) && attached(k + 1))
                add_fact(ImpliedFact::Kind::Parallel, {k, k + 1}, parallel(k, k + 1), "pair");
        }
    }

    if (n >= 3) {
        for (std::size_t s = 0; s < n; ++s) {
            if (!(attached(s) && attached(s + 1) && attached(s + 2))) continue;
            const AbcCase cs = abc_case(f[s], f[s + 1], f[s + 2], tol);
            if (cs == AbcCase::NotApplicable) continue;
            out.triple_cases.emplace_back(s, cs);
            if (cs == AbcCase::AbZero && is_r(s) && is_r(s + 1))
                add_fact(ImpliedFact::Kind::Parallel, {s, s + 1}, parallel(s, s + 1), "AB_ZERO");
            if (cs == AbcCase::BcZero && is_r(s + 1) && is_r(s + 2))
                add_fact(ImpliedFact::Kind::Parallel, {s + 1, s + 2}, parallel(s + 1, s + 2), "BC_ZERO");
            if (cs == AbcCase::BothEps && is_r(s) && is_r(s + 1) && is_r(s + 2))
                add_fact(ImpliedFact::Kind::Bennett, {s, s + 1, s + 2}, bennett(s), "BOTH_EPS");
        }
    }

    for (std::size_t len = 2; len <= n; ++len) {
        for (std::size_t s = 0; s < n; ++s) {
            bool contains_smaller = false;
            for (const auto& w : out.minimal_windows) {
                const std::size_t off = (w.start + n - s) % n;
                if (w.length < len && off + w.length <= len) contains_smaller = true;
            }
            if (contains_smaller) continue;
            CDQ p = CDQ::one();
            double scale = 1;
            for (std::size_t i = s; i < s + len; ++i) {
                p = p * f[i];
                scale *= coord_norm(f[i]);
            }
            if (!is_negligible(p, scale, tol)) continue;
            out.minimal_windows.push_back({s, len});
            if (len == 3 && is_r(s) && is_r(s + 1) && is_r(s + 2))
                add_fact(ImpliedFact::Kind::Bennett, {s, s + 1, s + 2}, bennett(s) || parallel(s, s + 1) ||
                                                                          parallel(s + 1, s + 2),
                         "window");
        }
    }
    return out;
}

}  // namespace overcon
