#pragma once

#include <iosfwd>

namespace crocopat {

inline constexpr const char* kVersion = "1.0.0";

/// The whole tool: options, RSF from `in`, program execution. Returns the
/// process exit status.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace crocopat
