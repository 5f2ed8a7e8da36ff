#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "overcon/linkage.hpp"

namespace overcon {

struct ExpectedFacts {
    std::optional<int> mobility;
    std::string theorem_case;
};

/// A linkage together with the reference data shipped alongside it.
struct LinkageDocument {
    Linkage linkage;
    std::vector<ExactConfiguration> known_configs;
    std::vector<ExactComplexConfiguration> known_bonds;
    ExpectedFacts expected;
};

/// Load/parse failure carrying the offending location.
class DocumentError : public std::runtime_error {
public:
    DocumentError(const std::string& where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what) {}
};

LinkageDocument parse_document(const std::string& text, const std::string& source = "<input>");
LinkageDocument load_document(const std::string& path);
std::string dump_document(const LinkageDocument& doc);

/// Names of the bundled fixtures, in listing order.
std::vector<std::string> corpus_names();
/// Throws std::out_of_range for unknown names.
LinkageDocument corpus_document(const std::string& name);

/// Builds an exact axis h = p + eps q from pure vector parts given as text.
FixedElement exact_axis(const std::array<const char*, 3>& p, const std::array<const char*, 3>& q);

}  // namespace overcon
