#pragma once

namespace lflx {

/// Entry point behind tools/main.cpp, exposed for tests.
/// Exit codes: 0 success, 1 numerical/runtime failure, 2 usage or config error.
int cli_main(int argc, const char* const* argv);

}  // namespace lflx
