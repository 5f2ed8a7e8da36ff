#pragma once

#include <string_view>

#include "overcon/dual_quaternion.hpp"

namespace overcon {

/// Which annihilation pattern explains abc = 0 for norm-zero complex dual
/// quaternions a, b, c (none of them a multiple of eps).
enum class AbcCase { AbZero, BcZero, BothEps, NotApplicable };

constexpr std::string_view to_string(AbcCase c) {
    switch (c) {
        case AbcCase::AbZero: return "AB_ZERO";
        case AbcCase::BcZero: return "BC_ZERO";
        case AbcCase::BothEps: return "BOTH_EPS";
        case AbcCase::NotApplicable: return "NOT_APPLICABLE";
    }
    return "?";
}

/// NotApplicable signals violated preconditions (abc != 0, a nonzero norm, or
/// an eps-multiple input); for valid inputs one of the three cases must hold.
/// Floating tolerances are relative to the product of the factors' 8-norms.
template <class S>
AbcCase abc_case(const DualQuaternion<S>& a, const DualQuaternion<S>& b, const DualQuaternion<S>& c,
                 double tol = 1e-9) {
    const double na = coord_norm(a), nb = coord_norm(b), nc = coord_norm(c);
    if (!has_zero_norm(a, tol) || !has_zero_norm(b, tol) || !has_zero_norm(c, tol)) return AbcCase::NotApplicable;
    if (is_eps_multiple(a, na, tol) || is_eps_multiple(b, nb, tol) || is_eps_multiple(c, nc, tol))
        return AbcCase::NotApplicable;
    const DualQuaternion<S> ab = a * b;
    const DualQuaternion<S> bc = b * c;
    if (!is_negligible(ab * c, na * nb * nc, tol)) return AbcCase::NotApplicable;
    if (is_negligible(ab, na * nb, tol)) return AbcCase::AbZero;
    if (is_negligible(bc, nb * nc, tol)) return AbcCase::BcZero;
    if (is_eps_multiple(ab, na * nb, tol) && is_eps_multiple(bc, nb * nc, tol)) return AbcCase::BothEps;
    return AbcCase::NotApplicable;
}

}  // namespace overcon
