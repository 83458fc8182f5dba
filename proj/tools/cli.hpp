#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pap::cli {

// exit codes: 0 ok, 1 assertion failure, 2 invalid config or budget error
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// args without the program name
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pap::cli
