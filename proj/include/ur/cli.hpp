#pragma once

#include <iosfwd>

namespace ur {

// Full command-line tool entry point, streams injected for testing.
// Returns the process exit code: 0 all certified inequalities hold,
// 1 input or usage error, 2 at least one certified inequality fails.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ur
