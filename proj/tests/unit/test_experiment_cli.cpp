#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "dyner_cli/cli.hpp"
#include "dyner_cli/output.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
  json error;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dyner");
  std::ostringstream out, err;
  Run r;
  r.status = dyner::cli::run_cli(args, out, err);
  r.out = out.str();
  if (!err.str().empty()) r.error = json::parse(err.str()).at("error");
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dyner_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump();
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), {}};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

json two_regime_model(int n) {
  return {{"type", "regime"},
          {"Q", {{-2.0, 2.0}, {3.0, -3.0}}},
          {"lambda", {0.3, 0.5}},
          {"mu", {1.0, 0.1}},
          {"N", n}};
}

json uniform_rates_model(int n) {
  return {{"type", "resample-ct"},
          {"N", n},
          {"lambda_mu", {{"lambda", {{"uniform", {0.0, 5.0}}}}, {"mu", {{"uniform", {0.0, 3.0}}}}}}};
}

json config(json model, json task) {
  return {{"schema", "dyner/1"}, {"model", std::move(model)}, {"task", std::move(task)}};
}

}  // namespace

TEST_CASE("sha256 matches the standard test vector") {
  CHECK(dyner::cli::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("moments on the uniform-rate resampling model") {
  const fs::path dir = scratch("moments");
  const auto cfg = write_config(dir, config(uniform_rates_model(45), {{"type", "moments"}}));
  const Run r = run({"moments", "--config", cfg, "--out", (dir / "out").string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("moments:") != std::string::npos);
  const json m = read_json(dir / "out" / "moments.json");
  // Embedded at period 1/N: E Lambda / (E Lambda + E M) = 2.5 / 4.
  CHECK(m.at("mean").get<double>() / 45.0 == doctest::Approx(0.625).epsilon(0.01));
  CHECK(m.at("N") == 45);
  const json index = read_json(dir / "out" / "index.json");
  CHECK(index.at("command") == "moments");
  CHECK(index.at("files").size() == 1);
}

TEST_CASE("scaled resampling moments report the limit coefficients") {
  const fs::path dir = scratch("scaled_moments");
  const json model = {{"type", "resample-scaled"},
                      {"N", 45},
                      {"eta_zeta", {{"eta", {{"uniform", {0.0, 5.0}}}}, {"zeta", {{"uniform", {0.0, 3.0}}}}}}};
  const auto cfg = write_config(dir, config(model, {{"type", "moments"}}));
  REQUIRE(run({"moments", "--config", cfg, "--out", (dir / "out").string()}).status == 0);
  const json m = read_json(dir / "out" / "moments.json");
  CHECK(m.at("rhoBar").get<double>() == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(m.at("v").get<double>() == doctest::Approx(0.0732421875).epsilon(1e-9));
  CHECK(m.at("entries").is_array());
}

TEST_CASE("config errors exit with status 2 and a JSON pointer") {
  const fs::path dir = scratch("errors");
  SUBCASE("empty config") {
    const auto cfg = write_config(dir, json::object());
    const Run r = run({"moments", "--config", cfg, "--out", (dir / "out").string()});
    CHECK(r.status == 2);
    CHECK(r.error.at("code") == "ConfigInvalid");
    CHECK(r.error.at("pointer") == "/schema");
  }
  SUBCASE("wrong schema") {
    const auto cfg = write_config(dir, {{"schema", "other/9"}});
    const Run r = run({"moments", "--config", cfg});
    CHECK(r.status == 2);
    CHECK(r.error.at("pointer") == "/schema");
  }
  SUBCASE("task type disagrees with the subcommand") {
    const auto cfg = write_config(dir, config(two_regime_model(5), {{"type", "simulate"}}));
    const Run r = run({"moments", "--config", cfg, "--out", (dir / "out").string()});
    CHECK(r.status == 2);
    CHECK(r.error.at("pointer") == "/task/type");
  }
  SUBCASE("generator rows must sum to zero") {
    json model = two_regime_model(5);
    model["Q"] = {{-2.0, 1.0}, {3.0, -3.0}};
    const auto cfg = write_config(dir, config(model, {{"type", "moments"}}));
    const Run r = run({"moments", "--config", cfg, "--out", (dir / "out").string()});
    CHECK(r.status == 2);
    CHECK(r.error.at("pointer") == "/model/Q");
  }
  SUBCASE("missing model field") {
    json model = two_regime_model(5);
    model.erase("mu");
    const auto cfg = write_config(dir, config(model, {{"type", "moments"}}));
    const Run r = run({"moments", "--config", cfg});
    CHECK(r.status == 2);
    CHECK(r.error.at("pointer") == "/model/mu");
  }
  SUBCASE("missing --config") {
    const Run r = run({"moments"});
    CHECK(r.status == 2);
  }
  SUBCASE("unknown subcommand") {
    const Run r = run({"frobnicate"});
    CHECK(r.status == 2);
  }
  SUBCASE("unparsable JSON") {
    const fs::path p = dir / "bad.json";
    std::ofstream(p) << "{ not json";
    const Run r = run({"moments", "--config", p.string()});
    CHECK(r.status == 2);
  }
  SUBCASE("transient needs a regime model") {
    const auto cfg = write_config(dir, config(uniform_rates_model(5), {{"type", "transient"}, {"times", {1.0}}}));
    const Run r = run({"transient", "--config", cfg, "--out", (dir / "out").string()});
    CHECK(r.status == 2);
    CHECK(r.error.at("pointer") == "/model/type");
  }
  SUBCASE("moment inversion beyond its limit is a library error") {
    const auto cfg = write_config(
        dir, config(two_regime_model(60), {{"type", "stationary"}, {"method", "moments"}}));
    const Run r = run({"stationary", "--config", cfg, "--out", (dir / "out").string()});
    CHECK(r.status == 1);
    CHECK(r.error.contains("code"));
  }
}

TEST_CASE("stationary methods agree and transient approaches them") {
  const fs::path dir = scratch("stationary");
  for (std::string method : {"generator", "moments"}) {
    const auto cfg = write_config(
        dir, config(two_regime_model(12), {{"type", "stationary"}, {"method", method}}));
    REQUIRE(run({"stationary", "--config", cfg, "--out", (dir / method).string()}).status == 0);
  }
  const json a = read_json(dir / "generator" / "stationary.json");
  const json b = read_json(dir / "moments" / "stationary.json");
  CHECK(a.at("mean").get<double>() == doctest::Approx(b.at("mean").get<double>()).epsilon(1e-10));
  CHECK(a.at("variance").get<double>() ==
        doctest::Approx(b.at("variance").get<double>()).epsilon(1e-9));

  const auto cfg = write_config(
      dir, config(two_regime_model(12), {{"type", "transient"}, {"times", {0.5, 5.0, 30.0}}}));
  REQUIRE(run({"transient", "--config", cfg, "--out", (dir / "t").string()}).status == 0);
  std::istringstream csv(slurp(dir / "t" / "transient_moments.csv"));
  std::string line, last;
  std::getline(csv, line);
  CHECK(line == "t,mean,var");
  while (std::getline(csv, line)) last = line;
  const double mean = std::stod(last.substr(last.find(',') + 1));
  CHECK(mean == doctest::Approx(a.at("mean").get<double>()).epsilon(1e-6));
}

TEST_CASE("same seed gives byte-identical outputs") {
  const fs::path dir = scratch("determinism");
  const auto cfg = write_config(
      dir, config(two_regime_model(20), {{"type", "simulate"}, {"times", {1.0, 2.0, 4.0}}}));
  for (std::string name : {"a", "b"}) {
    REQUIRE(run({"simulate", "--config", cfg, "--seed", "7", "--reps", "300", "--out",
                 (dir / name).string()})
                .status == 0);
  }
  REQUIRE(run({"simulate", "--config", cfg, "--seed", "8", "--reps", "300", "--out",
               (dir / "c").string()})
              .status == 0);
  const json index = read_json(dir / "a" / "index.json");
  REQUIRE(index.at("files").size() >= 3);
  CHECK(index.at("seed") == 7);
  CHECK(index.at("replications") == 300);
  for (const auto& f : index.at("files")) {
    const std::string name = f.at("name");
    CAPTURE(name);
    const std::string bytes = slurp(dir / "a" / name);
    CHECK(bytes == slurp(dir / "b" / name));
    CHECK(f.at("sha256") == dyner::cli::sha256_hex(bytes));
    CHECK(f.at("bytes") == bytes.size());
  }
  CHECK(slurp(dir / "a" / "index.json") == slurp(dir / "b" / "index.json"));
  CHECK(slurp(dir / "a" / "stats.csv") != slurp(dir / "c" / "stats.csv"));
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    CHECK(entry.path().extension() != ".tmp");
  }
}

TEST_CASE("run block values are overridden by flags") {
  const fs::path dir = scratch("overrides");
  json doc = config(two_regime_model(10), {{"type", "simulate"}});
  doc["run"] = {{"seed", 3}, {"replications", 50}, {"out", (dir / "from_config").string()}};
  const auto cfg = write_config(dir, doc);
  REQUIRE(run({"simulate", "--config", cfg}).status == 0);
  CHECK(read_json(dir / "from_config" / "index.json").at("replications") == 50);
  REQUIRE(run({"simulate", "--config", cfg, "--reps", "20", "--out", (dir / "flag").string()})
              .status == 0);
  const json index = read_json(dir / "flag" / "index.json");
  CHECK(index.at("replications") == 20);
  CHECK(index.at("seed") == 3);
}

TEST_CASE("diffusion and ldp tasks write their tables") {
  const fs::path dir = scratch("limits");
  auto cfg = write_config(dir, config(two_regime_model(30), {{"type", "diffusion"}}));
  REQUIRE(run({"diffusion", "--config", cfg, "--out", (dir / "d").string()}).status == 0);
  const json d = read_json(dir / "d" / "diffusion.json");
  CHECK(d.at("rate").get<double>() == doctest::Approx(1.02));
  // Stationary limit variance is rho (1 - rho) + v.
  const double rho = d.at("rhoBar").get<double>();
  CHECK(d.at("sigma2Infinity").get<double>() ==
        doctest::Approx(rho * (1 - rho) + d.at("v").get<double>()).epsilon(1e-9));
  CHECK(fs::exists(dir / "d" / "ou_path.csv"));

  // Sitting at the stationary fraction under the stationary occupation is free.
  const double rho_bar = 0.38 / 1.02;
  cfg = write_config(dir, config(two_regime_model(30),
                                 {{"type", "ldp"},
                                  {"resolution", 20},
                                  {"path", {{"horizon", 2.0}, {"values", std::vector<double>(5, rho_bar)}}}}));
  REQUIRE(run({"ldp", "--config", cfg, "--out", (dir / "l").string()}).status == 0);
  const json l = read_json(dir / "l" / "ldp.json");
  CHECK(std::abs(l.at("costAtPi").get<double>()) < 1e-12);
  CHECK(l.at("costMinimum").get<double>() <= l.at("costAtPi").get<double>() + 1e-12);
  CHECK(fs::exists(dir / "l" / "optimal_profile.csv"));
}

TEST_CASE("reproduce-paper compares reference constants") {
  const fs::path dir = scratch("reproduce");
  SUBCASE("two-regime situation stays unreconciled") {
    const Run r = run({"reproduce-paper", "--situation", "A", "--reps", "400", "--out",
                       (dir / "A").string()});
    REQUIRE(r.status == 0);
    const json c = read_json(dir / "A" / "comparison.json");
    CHECK(c.at("status") == "unreconciled");
    CHECK(c.at("recomputed").at("meanCoefficient").get<double>() ==
          doctest::Approx(0.372549).epsilon(1e-6));
    CHECK(r.out.find("unreconciled") != std::string::npos);
  }
  SUBCASE("uniform-rate situation reconciles and looks normal") {
    const Run r = run({"reproduce-paper", "--situation", "B", "--reps", "4000", "--out",
                       (dir / "B").string()});
    REQUIRE(r.status == 0);
    const json c = read_json(dir / "B" / "comparison.json");
    CHECK(c.at("status") == "reconciled");
    CHECK(c.at("ks").get<double>() < 0.05);
    CHECK(std::abs(c.at("simulated").at("meanZ").get<double>()) < 4.0);
    CHECK(std::abs(c.at("simulated").at("varianceZ").get<double>()) < 4.0);
    for (std::string f : {"moments.json", "histogram.csv", "path.csv", "comparison.json", "index.json"}) {
      CHECK(fs::exists(dir / "B" / f));
    }
  }
  SUBCASE("bad situation is rejected") {
    CHECK(run({"reproduce-paper", "--situation", "C"}).status == 2);
  }
}
