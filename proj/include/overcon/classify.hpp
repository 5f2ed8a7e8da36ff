#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "overcon/geometry.hpp"
#include "overcon/linkage.hpp"
#include "overcon/mobility.hpp"

namespace overcon {

/// How much a passed check tells about mobility.
enum class Strength { Necessary, Sufficient, NecessaryAndSufficient };
std::string_view to_string(Strength s);

/// Relabelling under which a DH pattern was matched: the loop is read from
/// joint `shift`, optionally backwards, with flips[k] reversing axis k.
struct LabelView {
    std::size_t shift = 0;
    bool reversed = false;
    std::vector<bool> flips;
};

std::string describe(const LabelView& v);

/// Four-bar loop check: equal Bennett ratios, opposite cosines equal, zero
/// offsets. Planar and spherical loops pass as degenerate.
struct BennettCheck {
    bool holds = false;
    std::string kind;  // "bennett", "planar", "spherical" or "none"
    std::optional<LabelView> view;
    bool exact = false;  // decided in rational arithmetic
    std::vector<std::string> evidence;

    bool degenerate() const { return kind == "planar" || kind == "spherical"; }
};

/// Requires 4 R joints with no consecutive pair on one line.
BennettCheck check_bennett_4r(const Linkage& L, double tol = 1e-9);
/// Same check on four axes given in one frame, closed as a loop in that order.
BennettCheck check_bennett_loop(const std::vector<FixedElement>& axes, double tol = 1e-9);

enum class GoldbergVerdict { PassesNecessary, Fails };
std::string_view to_string(GoldbergVerdict v);

/// Printed partial conditions only: b1 = b2 = b3 = b4, c1 = c4,
/// o2 = o3 = o4 = 0 under some relabelling.
struct GoldbergCheck {
    GoldbergVerdict verdict = GoldbergVerdict::Fails;
    Strength strength = Strength::Necessary;
    bool degenerate = false;  // all axes parallel
    std::optional<LabelView> view;
    bool exact = false;
    std::vector<std::string> evidence;
};

/// Requires 5 R joints.
GoldbergCheck check_goldberg_5r(const Linkage& L, double tol = 1e-9);

enum class SixRCase { TwoBennetts, SecondPattern, NoMatch };
std::string_view to_string(SixRCase c);

struct SixRResult {
    SixRCase match = SixRCase::NoMatch;
    std::optional<LabelView> view;
    bool equal_ratios = false;  // for some relabelling
    bool zero_offsets = false;
    bool exact = false;
    std::vector<std::size_t> bennett_quads;  // starts s with joints s..s+3 a Bennett loop
    std::vector<std::string> evidence;
};

/// Equal Bennett ratios and zero offsets, then the cosine patterns
/// c1=c4, c2=c6, c3=c5 (two stacked Bennett loops) or c1=c4, c2=c5, c3=c6,
/// over all cyclic shifts, both orientations and all axis flips.
/// Requires 6 R joints.
SixRResult classify_6r_mobility2(const Linkage& L, double tol = 1e-9);

enum class SubgroupVerdict { SE2, SO3, No };
std::string_view to_string(SubgroupVerdict v);

struct SubgroupCheck {
    SubgroupVerdict verdict = SubgroupVerdict::No;
    bool applies = true;  // false for n = 4, where mobility n-3 has other sources
    std::optional<Vec3<double>> center;  // SO3
    std::vector<std::string> evidence;
};

/// SE2: all R axes parallel and every P direction perpendicular to them.
/// SO3: all R axes through one point and no P joints. H joints give No.
SubgroupCheck check_n_minus_3(const Linkage& L, double tol = 1e-9);

/// One applicable rule: a theorem case, the mobility it is about and how
/// conclusive the match is.
struct MatchedCase {
    std::string rule;
    std::string case_label;
    std::optional<LabelView> view;
    Strength strength = Strength::Necessary;
    std::optional<int> stated_mobility;
    std::vector<std::string> evidence;
};

struct NMinus4Verdict {
    bool matches = false;  // L satisfies the geometric conditions for mobility >= n-4
    std::optional<MatchedCase> match;
    std::optional<int> predicted_mobility;
    int mobility_bound = 0;  // upper bound implied by the dispatched theorems
    std::vector<std::string> evidence;
};

/// Requires n >= 6.
NMinus4Verdict classify_n_minus_4(const Linkage& L, double tol = 1e-9);

struct StructureItem {
    enum class Kind { Parallel, Concurrent, BennettTriple } kind;
    std::vector<std::size_t> joints;
    BennettSign sign = BennettSign::No;  // triples only
};
std::string describe(const StructureItem& s);

struct NMinus5Result {
    bool violates = false;  // no structure: mobility n-5 (indeed > n-6) is ruled out
    std::vector<StructureItem> structure;
};

/// Scans neighbouring axis pairs for parallelism or concurrency and all
/// cyclically consecutive triples for the Bennett condition. Requires nR with
/// n >= 7.
NMinus5Result necessary_n_minus_5(const Linkage& L, double tol = 1e-9);

struct IsomericCheck {
    bool valid = false;
    BennettSign triple = BennettSign::No;
    std::optional<BennettCheck> loop;
    std::string reason;
};

/// h_new is given in the frame of joint k. Valid when (h_{k-1}, h_k, h_{k+1})
/// is a Bennett triple and (h_{k-1}, h_k, h_{k+1}, h_new) closes to a
/// non-degenerate Bennett loop with h_new distinct from h_k.
IsomericCheck check_isomeric(const Linkage& L, std::size_t k, const FixedElement& h_new, double tol = 1e-9);
/// Throws std::invalid_argument when check_isomeric fails.
Linkage isomeric_replace(const Linkage& L, std::size_t k, const FixedElement& h_new, double tol = 1e-9);

/// One joint frozen at one value taken from a regular closed configuration.
struct FreezeEntry {
    std::size_t joint = 0;
    double value = 0;
    std::optional<int> mobility;
    std::vector<std::size_t> co_frozen;  // original labels
};

struct ConsistencyOptions {
    int samples = 16;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    bool freeze_scan = true;
    int freeze_values = 2;
    int freeze_samples = 8;
    bool parallel = true;
};

struct ClassificationReport {
    std::string linkage_id;
    std::string signature;  // joint kinds, e.g. "PRRRR"
    DHTable dh;
    std::vector<std::vector<std::size_t>> parallel_groups;  // R/H joints, groups of two or more
    std::optional<Vec3<double>> concurrency_point;
    std::vector<StructureItem> bennett_triples;
    std::vector<MatchedCase> matches;
    int mobility_bound = 0;
    std::vector<std::string> bound_reasons;
    std::optional<int> predicted_mobility;
    std::optional<int> estimated_mobility;
    std::map<int, int> histogram;
    std::vector<std::size_t> frozen_joints;
    std::vector<FreezeEntry> freeze_scan;
    std::vector<std::string> contradictions;
};

/// Runs the numeric mobility estimate, every applicable checker and a
/// freeze-scan, and flags numeric results that a matched rule forbids.
ClassificationReport consistency_check(const Linkage& L, const ConsistencyOptions& opt = {});

std::string joint_signature(const Linkage& L);

}  // namespace overcon
