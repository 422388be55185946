#include <filesystem>

#include "doctest.h"
#include "mdd/experiment.hpp"

using namespace mdd;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

const char* kMinimal = R"({
  "schema": 1,
  "distribution": {"family": "explicit", "params": {"L": 2, "V": 2, "weights": [1, 0, 0, 1]}},
  "strategy": {"kind": "ar"},
  "eval": {"mode": "exact"},
  "seed": 1
})";

}  // namespace

TEST_CASE("minimal config runs to one exact row") {
  const auto cfg = parse_config(kMinimal);
  const auto result = run_experiment(cfg, kMinimal);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].report.kl.value == 0.0);
  CHECK(result.rows[0].report.iterations.value == 2.0);
  const auto csv = to_csv(result);
  CHECK(csv.rfind("strategy,eta,s_max,L,V,H_nats,epsilon,kl,kl_stderr,e_iters,e_iters_stderr,bound_kl_theorem,"
                  "bound_kl_eq34,bound_iters,mode,perms,samples,seed,pass\n",
                  0) == 0);
  CHECK(csv.find("\nar,0,1,2,2,") != std::string::npos);
  CHECK(result.pass());
}

TEST_CASE("epsilon produces theorem rows") {
  const std::string text = R"({"schema": 1,
    "distribution": {"family": "product", "params": {"marginals": [[0.5,0.5],[0.5,0.5],[0.5,0.5],[0.5,0.5]]}},
    "eval": {"epsilon": 0.12}})";
  const auto result = run_experiment(parse_config(text), text);
  REQUIRE(result.rows.size() == 2);
  CHECK(result.rows[0].report.label == "theorem1");
  CHECK(result.rows[1].report.label == "theorem2");
  for (const auto& row : result.rows) {
    for (const auto& c : row.report.checks) CHECK(c.pass);
  }
}

TEST_CASE("config diagnostics name the field") {
  CHECK(field_of(R"({"schema": 1, "distribution": {"family": "explicit", "params": {}}, "strategy": {"kind": "ar"}, "colour": 3})") == "colour");
  CHECK(field_of(R"({"schema": 1, "distribution": {"family": "explicit", "params": {"L": 1, "V": 2}}, "strategy": {"kind": "ar"}})") ==
        "distribution.params.weights");
  CHECK(field_of(R"({"schema": 1, "distribution": {"family": "zipf", "params": {}}, "strategy": {"kind": "ar"}})") == "distribution.family");
  CHECK(field_of(R"({"schema": 1, "distribution": {"family": "markov", "params": {"L": 2, "init": [1, 0], "transition": [[1, 0], [0, 1]], "x": 1}}, "strategy": {"kind": "ar"}})") ==
        "distribution.params.x");
  CHECK(field_of(R"({"schema": 1, "distribution": {"family": "explicit", "params": {"L": 1, "V": 2, "weights": [1, 1]}}, "strategy": [{"kind": "ar"}, {"kind": "max_entropy", "eta": 0.1}]})") ==
        "strategy[1].s_max");
  CHECK(field_of(R"({"schema": 1, "distribution": {"family": "explicit", "params": {"L": 1, "V": 2, "weights": [1, 1]}}, "strategy": {"kind": "ar"}, "eval": {"mode": "fast"}})") ==
        "eval.mode");
  CHECK(field_of(R"({"schema": 2, "distribution": {}, "strategy": {"kind": "ar"}})") == "schema");
  CHECK(field_of(R"({"schema": 1, "distribution": {"family": "explicit", "params": {"L": 1, "V": 2, "weights": [1, 1]}}})") == "strategy");
}

TEST_CASE("syntax errors report line and column") {
  try {
    parse_config("{\n  \"schema\": 1,\n  \"seed\": ,\n}");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
}

TEST_CASE("schedule mismatch is a config error on the strategy") {
  const std::string text = R"({"schema": 1,
    "distribution": {"family": "markov", "params": {"L": 4, "init": [0.5, 0.5], "transition": [[0.9, 0.1], [0.1, 0.9]]}},
    "strategy": {"kind": "uniform", "schedule": [2, 1]}})";
  const auto cfg = parse_config(text);
  try {
    run_experiment(cfg, text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "strategy");
    CHECK(std::string(e.what()).find("schedule") != std::string::npos);
  }
}

TEST_CASE("reruns reproduce identical payloads") {
  const std::string text = R"({"schema": 1,
    "distribution": [{"family": "dirichlet", "params": {"L": 4, "V": 2, "concentration": 0.5}},
                     {"family": "near_deterministic", "params": {"template": [0, 1, 1, 0, 1], "flip_prob": 0.1}}],
    "strategy": [{"kind": "entropy_sum", "eta": 0.4}, {"kind": "max_entropy", "eta": 0.3, "s_max": 2}],
    "eval": {"mode": "mc", "n_samples": 500, "epsilon": [0.2]},
    "seed": 99})";
  auto cfg = parse_config(text);
  cfg.eval.threads = 1;
  const auto a = to_csv(run_experiment(cfg, text));
  cfg.eval.threads = 4;
  const auto b = to_csv(run_experiment(cfg, text));
  CHECK(a == b);
  const auto j = nlohmann::json::parse(to_json(run_experiment(cfg, text)));
  CHECK(j["rows"].size() == 8);
  CHECK(j["provenance"]["tool_version"] == tool_version());
  CHECK(j["provenance"].contains("config_hash"));
  for (const auto& row : j["rows"]) CHECK(row["seed"] == 99);
}

TEST_CASE("family listing") {
  const auto j = families_json();
  const auto dumped = j.dump();
  CHECK(nlohmann::json::parse(dumped) == j);
  for (const char* name : {"explicit", "product", "markov", "near_deterministic", "dirichlet"}) {
    CHECK(dumped.find(name) != std::string::npos);
    CHECK(families_text().find(name) != std::string::npos);
  }
}

TEST_CASE("shipped configs parse") {
  for (const auto& entry : std::filesystem::directory_iterator(MDD_CONFIG_DIR)) {
    INFO(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()));
  }
}
