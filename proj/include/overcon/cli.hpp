#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "overcon/document.hpp"

namespace overcon {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitContradiction = 3;

/// An existing file path, or a bundled fixture given as "examples/<name>" or
/// "<name>".
LinkageDocument resolve_document(const std::string& arg);

/// Runs one command line (program name excluded). Reports go to out,
/// diagnostics to err. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace overcon
