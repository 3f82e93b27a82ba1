#pragma once

namespace tsc::cli {

/// Full command-line surface. Returns the process exit code:
/// 0 success, 1 validation/configuration error, 2 runtime failure.
int run(int argc, char** argv);

}  // namespace tsc::cli
