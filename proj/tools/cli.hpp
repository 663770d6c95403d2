#pragma once

#include <functional>
#include <iosfwd>

#include "gemmlab/harness.hpp"
#include "gemmlab/kernels.hpp"
#include "gemmlab/matrix.hpp"

namespace gemmlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Environment variables consulted for defaults; explicit flags win.
inline constexpr const char* kOutputDirEnv = "GEMMLAB_OUTPUT_DIR";
inline constexpr const char* kSeedEnv = "GEMMLAB_SEED";

// Test seams. corrupt_result sees every product `verify` is about to compare
// against the naive reference.
struct Hooks {
  std::function<void(const KernelVariant&, Matrix&)> corrupt_result;
  HarnessHooks harness;
};

/// Entry point shared by main() and the tests. Returns the process exit code:
/// 0 success, 1 runtime or verification failure, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const Hooks& hooks = {});

}  // namespace gemmlab::cli
