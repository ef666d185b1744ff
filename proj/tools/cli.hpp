#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "incite/error.hpp"

namespace incite::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitAuth = 3;
inline constexpr int kExitRateLimit = 4;

int exit_code(ErrorKind kind);

/// Entry point behind the `incite` binary. `args` excludes argv[0].
/// `interactive` enables the numbered picker on `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err, bool interactive);

}  // namespace incite::cli
