#pragma once

namespace rootlap {

/// Entry point behind the `rootlap` binary. Returns the process exit code:
/// 0 on success, 1 when a mathematical assertion failed, 2 on usage or
/// configuration errors.
int run_cli(int argc, const char* const* argv);

}  // namespace rootlap
