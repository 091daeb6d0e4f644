#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mist::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one `mist` invocation. `args` excludes the program name.
/// Relative output paths resolve under $MIST_OUTPUT_ROOT when it is set.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Static SVG scatter of 2-D points, one color per label, with a legend.
std::string scatter_svg(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<int>& labels,
                        const std::string& title);

}  // namespace mist::cli
