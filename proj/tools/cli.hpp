#pragma once

#include <string>
#include <vector>

namespace sfde::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Entry point shared by main() and the integration tests.
/// Exit codes: 0 success, 1 validation/config error, 2 numeric blow-up.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

/// The bundled trivially-checkable example suite; prints one line per check.
int selftest();

} // namespace sfde::cli
