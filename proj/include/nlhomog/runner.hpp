#ifndef NLHOMOG_RUNNER_HPP
#define NLHOMOG_RUNNER_HPP

#include <string>

#include "nlhomog/config.hpp"

namespace nlhomog {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes shared by the runner and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitOracleMismatch = 4;

// Executes the configured study and writes its artifacts under out_dir.
// Throws the library error types; the CLI maps them to exit codes.
int run_study(const RunConfig& cfg, const std::string& out_dir, int threads, bool verbose);

}  // namespace nlhomog

#endif
