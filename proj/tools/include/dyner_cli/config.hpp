#ifndef DYNER_CLI_CONFIG_HPP
#define DYNER_CLI_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dyner/errors.hpp"
#include "dyner/regime_analytics.hpp"
#include "dyner/resample_analytics.hpp"

namespace dyner::cli {

inline constexpr const char* kSchema = "dyner/1";

/// ConfigInvalid with a JSON pointer to the offending (or first missing) field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& pointer, const std::string& what)
      : Error(ErrorCode::kConfigInvalid, what), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct RegimeSpec {
  RegimeModel model;
  Scaling scaling = Scaling::kScaled;
};

struct ResampleSpec {
  ResampleModel model;
};

struct ScaledResampleSpec {
  ScaledResampleLaw law;
  int edges = 1;
};

struct ContinuousSpec {
  ContinuousResampleSpec spec;
  int edges = 1;
};

using ModelSpec =
    std::variant<RegimeSpec, ResampleSpec, ScaledResampleSpec, ContinuousSpec>;

std::string model_type(const ModelSpec& model);
int model_edges(const ModelSpec& model);

struct RunSpec {
  std::uint64_t seed = 1;
  std::size_t replications = 10000;
  std::string out = "out";
  int bins = 0;  // 0: Freedman-Diaconis
};

struct ExperimentConfig {
  std::optional<ModelSpec> model;  // absent only for reproduce-paper
  std::string task;
  nlohmann::json params = nlohmann::json::object();  // the task block
  RunSpec run;
};

/// Validates `doc`; `command` is the subcommand the config is run under and
/// must agree with task.type when that is present.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& command);

// Typed readers on the task block; pointer names the block for messages.
double param_double(const nlohmann::json& block, const std::string& pointer,
                    const std::string& key, std::optional<double> fallback = {});
int param_int(const nlohmann::json& block, const std::string& pointer,
              const std::string& key, std::optional<int> fallback = {});
std::vector<double> param_doubles(const nlohmann::json& block,
                                  const std::string& pointer, const std::string& key,
                                  std::optional<std::vector<double>> fallback = {});
std::string param_string(const nlohmann::json& block, const std::string& pointer,
                         const std::string& key,
                         std::optional<std::string> fallback = {});

}  // namespace dyner::cli

#endif  // DYNER_CLI_CONFIG_HPP
