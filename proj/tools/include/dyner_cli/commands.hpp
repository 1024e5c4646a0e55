#ifndef DYNER_CLI_COMMANDS_HPP
#define DYNER_CLI_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "dyner_cli/config.hpp"
#include "dyner_cli/output.hpp"

namespace dyner::cli {

const std::vector<std::string>& command_names();

/// Reference situations: "A" (two-regime switching) and "B"
/// (uniform resampling rates).
struct ReproduceOptions {
  std::string situation = "B";
  int edges = 45;
};

/// Runs one subcommand, writing its outputs into `out` and one summary line
/// per task to `summary`.
void run_command(const ExperimentConfig& config, const ReproduceOptions& reproduce,
                 OutputDir& out, std::ostream& summary);

}  // namespace dyner::cli

#endif  // DYNER_CLI_COMMANDS_HPP
