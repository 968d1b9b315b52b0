#pragma once

#include <iosfwd>

namespace tensiform {

/// Exit codes: 0 success, 1 solver non-convergence, 2 input error.
int cli_main(int argc, const char* const* argv);
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tensiform
