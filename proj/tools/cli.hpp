#pragma once

#include <string>
#include <vector>

namespace fsgnn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitTrialFailure = 1;
inline constexpr int kExitInputError = 2;

/// Entry point shared by the executable and the integration tests.
int run_cli(const std::vector<std::string>& args);

} // namespace fsgnn::cli
