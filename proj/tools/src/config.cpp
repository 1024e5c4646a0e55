#include "dyner_cli/config.hpp"

#include <cmath>

namespace dyner::cli {

using nlohmann::json;

namespace {

const json& field(const json& block, const std::string& pointer,
                  const std::string& key) {
  if (!block.is_object() || !block.contains(key)) {
    throw ConfigError(pointer + "/" + key, "missing field " + pointer + "/" + key);
  }
  return block.at(key);
}

double as_double(const json& value, const std::string& pointer) {
  if (!value.is_number()) throw ConfigError(pointer, pointer + " must be a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw ConfigError(pointer, pointer + " must be finite");
  return x;
}

int as_int(const json& value, const std::string& pointer) {
  if (!value.is_number_integer()) {
    throw ConfigError(pointer, pointer + " must be an integer");
  }
  return value.get<int>();
}

std::vector<double> as_doubles(const json& value, const std::string& pointer) {
  if (!value.is_array()) throw ConfigError(pointer, pointer + " must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(as_double(value[i], pointer + "/" + std::to_string(i)));
  }
  return out;
}

Vector as_vector(const json& value, const std::string& pointer) {
  const std::vector<double> xs = as_doubles(value, pointer);
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

Matrix as_matrix(const json& value, const std::string& pointer) {
  if (!value.is_array() || value.empty()) {
    throw ConfigError(pointer, pointer + " must be a nonempty array of rows");
  }
  const auto d = static_cast<Eigen::Index>(value.size());
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const std::string row = pointer + "/" + std::to_string(i);
    const Vector r = as_vector(value[static_cast<std::size_t>(i)], row);
    if (r.size() != d) throw ConfigError(row, row + " must have " + std::to_string(d) + " entries");
    m.row(i) = r.transpose();
  }
  return m;
}

// Rethrows library validation failures as ConfigInvalid at `pointer`.
template <typename F>
auto at_pointer(const std::string& pointer, F&& build) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(pointer, std::string(to_string(e.code())) + ": " + e.what());
  }
}

std::pair<double, double> uniform_range(const json& value, const std::string& pointer) {
  const std::vector<double> r = as_doubles(field(value, pointer, "uniform"), pointer + "/uniform");
  if (r.size() != 2) throw ConfigError(pointer + "/uniform", "uniform needs [lo, hi]");
  return {r[0], r[1]};
}

// {"atoms": [{first, second, weight}]}, {first: {"uniform": [a, b]}, second:
// {"uniform": [c, d]}} (independent) or {first: x, second: y} (point mass).
PairLaw parse_pair_law(const json& value, const std::string& pointer,
                       const std::string& first, const std::string& second) {
  if (!value.is_object()) throw ConfigError(pointer, pointer + " must be an object");
  return at_pointer(pointer, [&] {
    if (value.contains("atoms")) {
      const json& atoms = value.at("atoms");
      const std::string base = pointer + "/atoms";
      if (!atoms.is_array() || atoms.empty()) {
        throw ConfigError(base, base + " must be a nonempty array");
      }
      std::vector<PairAtom> out;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string at = base + "/" + std::to_string(i);
        out.push_back({as_double(field(atoms[i], at, first), at + "/" + first),
                       as_double(field(atoms[i], at, second), at + "/" + second),
                       as_double(field(atoms[i], at, "weight"), at + "/weight")});
      }
      return PairLaw::atoms(out);
    }
    const json& a = field(value, pointer, first);
    const json& b = field(value, pointer, second);
    if (a.is_number() && b.is_number()) {
      return PairLaw::point(as_double(a, pointer + "/" + first),
                            as_double(b, pointer + "/" + second));
    }
    const auto [a_lo, a_hi] = uniform_range(a, pointer + "/" + first);
    const auto [b_lo, b_hi] = uniform_range(b, pointer + "/" + second);
    return PairLaw::independent_uniform(a_lo, a_hi, b_lo, b_hi);
  });
}

int parse_edges(const json& model) {
  const int n = as_int(field(model, "/model", "N"), "/model/N");
  if (n < 1) throw ConfigError("/model/N", "/model/N must be >= 1");
  return n;
}

double parse_delta(const json& model) {
  const double delta = model.contains("delta") ? as_double(model.at("delta"), "/model/delta") : 1.0;
  if (!(delta > 0.0)) throw ConfigError("/model/delta", "/model/delta must be > 0");
  return delta;
}

ModelSpec parse_model(const json& model) {
  const std::string type = param_string(model, "/model", "type");
  if (type == "regime") {
    const Matrix q = as_matrix(field(model, "/model", "Q"), "/model/Q");
    const Vector lambda = as_vector(field(model, "/model", "lambda"), "/model/lambda");
    const Vector mu = as_vector(field(model, "/model", "mu"), "/model/mu");
    const int n = parse_edges(model);
    const double delta = parse_delta(model);
    bool scaled = true;
    if (model.contains("scaled")) {
      if (!model.at("scaled").is_boolean()) throw ConfigError("/model/scaled", "/model/scaled must be a boolean");
      scaled = model.at("scaled").get<bool>();
    }
    const Generator chain = at_pointer("/model/Q", [&] { return validate_generator(q); });
    return at_pointer("/model", [&] {
      return RegimeSpec{RegimeModel(chain, lambda, mu, n, delta),
                        scaled ? Scaling::kScaled : Scaling::kUnscaled};
    });
  }
  if (type == "resample") {
    const int n = parse_edges(model);
    const json& atoms = field(model, "/model", "atoms");
    if (!atoms.is_array() || atoms.empty()) {
      throw ConfigError("/model/atoms", "/model/atoms must be a nonempty array");
    }
    std::vector<TransitionAtom> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string at = "/model/atoms/" + std::to_string(i);
      out.push_back({as_double(field(atoms[i], at, "p"), at + "/p"),
                     as_double(field(atoms[i], at, "r"), at + "/r"),
                     as_double(field(atoms[i], at, "weight"), at + "/weight")});
    }
    return at_pointer("/model/atoms", [&] {
      return ResampleSpec{ResampleModel(TransitionLaw(out), n)};
    });
  }
  const int nodes = model.contains("nodes") ? as_int(model.at("nodes"), "/model/nodes") : 64;
  if (type == "resample-scaled") {
    const int n = parse_edges(model);
    const double delta = parse_delta(model);
    const PairLaw law = parse_pair_law(field(model, "/model", "eta_zeta"),
                                       "/model/eta_zeta", "eta", "zeta");
    return at_pointer("/model", [&] {
      return ScaledResampleSpec{ScaledResampleLaw(law, delta, nodes), n};
    });
  }
  if (type == "resample-ct") {
    const int n = parse_edges(model);
    const PairLaw law = parse_pair_law(field(model, "/model", "lambda_mu"),
                                       "/model/lambda_mu", "lambda", "mu");
    const double period = model.contains("period")
                              ? as_double(model.at("period"), "/model/period")
                              : std::pow(double(n), -parse_delta(model));
    if (!(period > 0.0)) throw ConfigError("/model/period", "/model/period must be > 0");
    return ContinuousSpec{{law, period, nodes}, n};
  }
  throw ConfigError("/model/type",
                    "/model/type must be regime, resample, resample-scaled or resample-ct");
}

}  // namespace

std::string model_type(const ModelSpec& model) {
  switch (model.index()) {
    case 0: return "regime";
    case 1: return "resample";
    case 2: return "resample-scaled";
    default: return "resample-ct";
  }
}

int model_edges(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RegimeSpec>) return m.model.edges();
        else if constexpr (std::is_same_v<T, ResampleSpec>) return m.model.edges;
        else return m.edges;
      },
      model);
}

double param_double(const json& block, const std::string& pointer,
                    const std::string& key, std::optional<double> fallback) {
  if (fallback && (!block.is_object() || !block.contains(key))) return *fallback;
  return as_double(field(block, pointer, key), pointer + "/" + key);
}

int param_int(const json& block, const std::string& pointer, const std::string& key,
              std::optional<int> fallback) {
  if (fallback && (!block.is_object() || !block.contains(key))) return *fallback;
  return as_int(field(block, pointer, key), pointer + "/" + key);
}

std::vector<double> param_doubles(const json& block, const std::string& pointer,
                                  const std::string& key,
                                  std::optional<std::vector<double>> fallback) {
  if (fallback && (!block.is_object() || !block.contains(key))) return *fallback;
  return as_doubles(field(block, pointer, key), pointer + "/" + key);
}

std::string param_string(const json& block, const std::string& pointer,
                         const std::string& key, std::optional<std::string> fallback) {
  if (fallback && (!block.is_object() || !block.contains(key))) return *fallback;
  const json& value = field(block, pointer, key);
  if (!value.is_string()) throw ConfigError(pointer + "/" + key, pointer + "/" + key + " must be a string");
  return value.get<std::string>();
}

ExperimentConfig parse_config(const json& doc, const std::string& command) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  const std::string schema = param_string(doc, "", "schema");
  if (schema != kSchema) {
    throw ConfigError("/schema", "unsupported schema '" + schema + "', expected " + kSchema);
  }
  ExperimentConfig config;
  config.task = command;
  if (command != "reproduce-paper" || doc.contains("model")) {
    config.model = parse_model(field(doc, "", "model"));
  }
  if (command != "reproduce-paper" || doc.contains("task")) {
    const json& task = field(doc, "", "task");
    if (!task.is_object()) throw ConfigError("/task", "/task must be an object");
    const std::string type = param_string(task, "/task", "type");
    if (type != command) {
      throw ConfigError("/task/type", "task type '" + type + "' does not match subcommand '" + command + "'");
    }
    config.params = task;
  }
  if (doc.contains("run")) {
    const json& run = doc.at("run");
    if (!run.is_object()) throw ConfigError("/run", "/run must be an object");
    if (run.contains("seed")) {
      if (!run.at("seed").is_number_unsigned()) throw ConfigError("/run/seed", "/run/seed must be a nonnegative integer");
      config.run.seed = run.at("seed").get<std::uint64_t>();
    }
    if (run.contains("replications")) {
      const int reps = as_int(run.at("replications"), "/run/replications");
      if (reps < 1) throw ConfigError("/run/replications", "/run/replications must be >= 1");
      config.run.replications = static_cast<std::size_t>(reps);
    }
    config.run.out = param_string(run, "/run", "out", config.run.out);
    config.run.bins = param_int(run, "/run", "bins", 0);
    if (config.run.bins < 0) throw ConfigError("/run/bins", "/run/bins must be >= 0");
  }
  return config;
}

}  // namespace dyner::cli
