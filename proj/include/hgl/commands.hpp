#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hgl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCertificateFail = 3;

/// Dispatch one `hgl` invocation. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hgl
