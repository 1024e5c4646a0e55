#include "dyner_cli/cli.hpp"

#include <fstream>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dyner_cli/commands.hpp"

namespace dyner::cli {

using nlohmann::json;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::string> out;
  std::optional<int> bins;
  ReproduceOptions reproduce;
};

json load_config(const std::string& path, const std::string& command) {
  if (path.empty()) {
    if (command == "reproduce-paper") return json{{"schema", kSchema}};
    throw ConfigError("", "--config is required for " + command);
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
}

void report_error(std::ostream& err, const std::string& code, const std::string& message,
                  const std::optional<std::string>& pointer, const std::string& inner = {}) {
  json e = {{"code", code}, {"message", message}};
  if (pointer) e["pointer"] = *pointer;
  if (!inner.empty()) e["inner"] = inner;
  err << json{{"error", e}}.dump() << '\n';
}

int execute(const std::string& command, const Overrides& o, std::ostream& out) {
  ExperimentConfig config = parse_config(load_config(o.config_path, command), command);
  if (o.seed) config.run.seed = *o.seed;
  if (o.reps) config.run.replications = *o.reps;
  if (o.out) config.run.out = *o.out;
  if (o.bins) config.run.bins = *o.bins;
  if (config.run.replications < 1) throw ConfigError("/run/replications", "--reps must be >= 1");
  if (config.run.bins < 0) throw ConfigError("/run/bins", "--bins must be >= 0");

  OutputDir dir(config.run.out);
  run_command(config, o.reproduce, dir, out);
  json meta = {{"schema", kSchema},
               {"command", command},
               {"seed", config.run.seed},
               {"replications", config.run.replications}};
  if (config.model) meta["model"] = model_type(*config.model);
  if (command == "reproduce-paper") {
    meta["situation"] = o.reproduce.situation;
    meta["N"] = o.reproduce.edges;
  }
  dir.write_index(meta);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic Erdos-Renyi graph experiments", "dyner"};
  app.require_subcommand(1);
  Overrides o;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::string out_dir;
  int bins = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Experiment config (JSON)");
    sub->add_option("--seed", seed, "Root seed (overrides run.seed)");
    sub->add_option("--reps", reps, "Replications (overrides run.replications)");
    sub->add_option("--out", out_dir, "Output directory (overrides run.out)");
    sub->add_option("--bins", bins, "Histogram bins, 0 for Freedman-Diaconis");
  };
  const std::map<std::string, std::string> about{
      {"moments", "Closed-form stationary moments"},
      {"stationary", "Stationary distribution of the edge count"},
      {"transient", "Distribution of (Y(t), X(t)) at given times"},
      {"simulate", "Monte Carlo ensemble with summary statistics"},
      {"diffusion", "Diffusion-limit coefficients and an OU sample path"},
      {"ldp", "Large-deviation rates and path costs"},
      {"reproduce-paper", "Reference situation A or B: analytics vs simulation"}};
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    add_common(sub);
    if (name == "reproduce-paper") {
      sub->add_option("--situation", o.reproduce.situation, "A or B")
          ->check(CLI::IsMember({"A", "B"}));
      sub->add_option("--N", o.reproduce.edges, "Number of potential edges")
          ->check(CLI::PositiveNumber);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "ConfigInvalid", e.what(), std::nullopt);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  if (sub->count("--seed")) o.seed = seed;
  if (sub->count("--reps")) o.reps = reps;
  if (sub->count("--out")) o.out = out_dir;
  if (sub->count("--bins")) o.bins = bins;

  try {
    return execute(command, o, out);
  } catch (const ConfigError& e) {
    report_error(err, std::string(to_string(e.code())), e.what(), e.pointer());
    return 2;
  } catch (const Error& e) {
    const int status = e.code() == ErrorCode::kConfigInvalid ? 2 : 1;
    report_error(err, std::string(to_string(e.code())), e.what(), std::nullopt);
    return status;
  } catch (const std::exception& e) {
    report_error(err, "Internal", e.what(), std::nullopt, typeid(e).name());
    return 1;
  }
}

}  // namespace dyner::cli
