#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace confcurve::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNonConvergence = 3;

/// Runs the command line `args` (program name first). Results go to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace confcurve::cli
