#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace slicesim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slicesim::cli
