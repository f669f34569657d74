#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maqa {

// Entry point behind the `maqa` binary; separated for testability.
// Exit codes: 0 success, 1 usage error, 2 input error, 3 resource or
// convergence error.
int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace maqa
