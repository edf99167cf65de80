#pragma once

#include <string>
#include <vector>

namespace ctbg {

// Exit codes: 0 success, 1 check failure, 2 numerical error, 3 bad
// configuration or command line.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // without program name

}  // namespace ctbg
