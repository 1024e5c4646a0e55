#ifndef DYNER_CLI_CLI_HPP
#define DYNER_CLI_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace dyner::cli {

/// Full command line (args[0] is the program name).  Returns the exit status:
/// 0 on success, 2 for ConfigInvalid, 1 for any other failure, with an error
/// JSON object written to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dyner::cli

#endif  // DYNER_CLI_CLI_HPP
