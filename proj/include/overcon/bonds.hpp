#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "overcon/abc.hpp"
#include "overcon/linkage.hpp"
#include "overcon/mobility.hpp"

namespace overcon {

/// Motion factor t - h of an R/P joint at a complex (or exact) parameter.
/// Unlike joint_motion, P joints accept t = 0. H joints are rejected; use the
/// R or P surrogate from derived_linkage instead.
template <class S>
DualQuaternion<S> bond_motion(const Joint& j, const S& t) {
    if (j.kind == JointKind::H) throw std::domain_error("bonds of H joints are not supported");
    return DualQuaternion<S>(t) - j.axis.as<S>();
}

/// Loop product with every parameter finite (P joints allowed at 0).
template <class S>
DualQuaternion<S> bond_product(const Linkage& L, const BasicConfiguration<S>& c) {
    if (c.size() != L.size()) throw std::invalid_argument("configuration length does not match joint count");
    DualQuaternion<S> prod = DualQuaternion<S>::one();
    for (std::size_t k = 0; k < L.size(); ++k) {
        if (c[k].infinite) throw std::invalid_argument("bond parameters must be finite");
        prod = prod * bond_motion(L.joints[k], c[k].value) * L.links[k].template as<S>();
    }
    return prod;
}

/// Product of the factor 8-norms; reference scale for floating zero tests.
double bond_scale(const Linkage& L, const ComplexConfiguration& c);

/// All eight coordinates of the loop product vanish.
bool is_bond(const Linkage& L, const ExactComplexConfiguration& c);
bool is_bond(const Linkage& L, const ComplexConfiguration& c, double rel_tol = 1e-9);

/// Joints whose motion factor has zero norm.
std::vector<std::size_t> attachment_set(const Linkage& L, const ExactComplexConfiguration& c);
std::vector<std::size_t> attachment_set(const Linkage& L, const ComplexConfiguration& c, double tol = 1e-9);

/// Numerical test that a zero-product point is a limit of complex
/// configurations: product = tau for shrinking tau must stay solvable with
/// solutions converging to c. Zero-product points off the configuration
/// closure exist even for rigid loops.
bool in_configuration_closure(const Linkage& L, const ComplexConfiguration& c, std::uint64_t seed = 1);

/// Maximal runs of cyclically consecutive indices in a sorted index set.
struct Chain {
    std::size_t start = 0;
    std::size_t length = 0;
};
std::vector<Chain> chains_of(const std::vector<std::size_t>& indices, std::size_t n);
/// One cyclic run (the full index set counts).
bool is_chain(const std::vector<std::size_t>& indices, std::size_t n);

enum class Slot { Free, PlusI, MinusI, Zero };

/// Comma separated slots: "f" (or "*"), "+i" (or "i"), "-i", "0".
std::vector<Slot> parse_pattern(std::string_view text);
std::string pattern_to_string(const std::vector<Slot>& pattern);

struct Bond {
    ComplexConfiguration config;
    std::optional<ExactComplexConfiguration> exact;  // set when rationalized and rechecked exactly
    std::vector<std::size_t> attachment;
    double residual = 0;  // |product| / bond_scale
};

/// Complex damped Newton on the eight product coordinates, free slots only,
/// with the restart and seeding policy of the real solver. Zero-product
/// points failing in_configuration_closure are dropped. Results are
/// deduplicated and ordered by start index. Completeness is not claimed.
std::vector<Bond> search_bonds(const Linkage& L, const std::vector<Slot>& pattern, std::uint64_t seed,
                               const SolverOptions& opt = {});
std::vector<Bond> search_bonds_serial(const Linkage& L, const std::vector<Slot>& pattern, std::uint64_t seed,
                                      const SolverOptions& opt = {});

/// Packs a verified exact bond.
Bond make_bond(const Linkage& L, const ExactComplexConfiguration& c);

/// Estimated local dimension of the bond set at c: bonds with the same
/// attachment are approached from starts near c and the rank of the secants
/// to nearby limits is returned (0 when every limit is c itself).
int bond_local_dimension(const Linkage& L, const ComplexConfiguration& c, std::uint64_t seed, int trials = 12);

enum class FactorClass { Zero, EpsMultiple, Generic };
std::string_view to_string(FactorClass f);

struct VanishingWindow {
    std::size_t start = 0;
    std::size_t length = 0;  // indices start, start+1, ... mod n
};

struct ImpliedFact {
    enum class Kind { Parallel, Bennett } kind;
    std::vector<std::size_t> joints;
    bool confirmed = false;  // the geometric predicate holds on the home-frame axes
    std::string source;      // "pair", "AB_ZERO", "BC_ZERO", "BOTH_EPS", "window"
};

struct FactorDiagnosis {
    std::vector<std::size_t> attachment;
    std::vector<FactorClass> pair_products;  // factor k times factor k+1, cyclic
    std::vector<VanishingWindow> minimal_windows;
    std::vector<std::pair<std::size_t, AbcCase>> triple_cases;  // by start index, norm-zero triples only
    std::vector<ImpliedFact> implied;
    bool primal_only = false;  // every factor has zero dual part
};

/// Splits the bond product over home-frame factors t_k - e_k and explains the
/// vanishing through pair products and the abc case analysis.
FactorDiagnosis factor_diagnose(const Linkage& L, const ComplexConfiguration& c, double tol = 1e-9);

}  // namespace overcon
