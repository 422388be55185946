#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "mdd/error.hpp"
#include "mdd/experiment.hpp"
#include "mdd/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::size_t> cap_seqs;
  std::optional<std::size_t> cap_perms;
};

int write_output(const std::string& path, const std::string& payload) {
  if (path == "-") {
    std::cout << payload;
    return kOk;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: output.path: cannot write " << path << "\n";
    return kConfigError;
  }
  out << payload;
  return kOk;
}

int cmd_run(const RunArgs& args, unsigned threads) {
  std::string text;
  mdd::ExperimentConfig cfg;
  try {
    std::ifstream in(args.config);
    if (!in) throw mdd::ConfigError("", "cannot read config file " + args.config);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    cfg = mdd::parse_config(text);
    if (args.seed) cfg.eval.seed = *args.seed;
    if (args.out) cfg.output_path = *args.out;
    if (args.format) cfg.format = *args.format;
    if (args.cap_seqs) cfg.eval.caps.max_sequences = *args.cap_seqs;
    if (args.cap_perms) cfg.eval.caps.max_permutations = *args.cap_perms;
    if (cfg.format != "csv" && cfg.format != "json") throw mdd::ConfigError("--format", "expected csv or json");
  } catch (const mdd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  cfg.eval.threads = threads;

  mdd::RunResult result;
  try {
    result = mdd::run_experiment(cfg, text);
  } catch (const mdd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const mdd::Error& e) {
    std::cerr << "error (" << mdd::to_string(e.code()) << "): " << e.what() << "\n";
    return e.code() == mdd::ErrorCode::CapExceeded ? kConfigError : kFailure;
  }

  const int io = write_output(cfg.output_path, cfg.format == "json" ? mdd::to_json(result) : mdd::to_csv(result));
  if (io != kOk) return io;
  for (const auto& row : result.rows) {
    for (const auto& c : row.report.checks) {
      if (!c.pass) {
        std::cerr << "bound violated: " << row.distribution << " " << row.report.label << " " << c.name
                  << " value=" << c.value << " bound=" << c.bound << "\n";
      }
    }
  }
  return result.pass() ? kOk : kFailure;
}

const char* category_name(mdd::PropertyCategory c) {
  switch (c) {
    case mdd::PropertyCategory::Identity: return "identity";
    case mdd::PropertyCategory::Structural: return "structural";
    case mdd::PropertyCategory::Theorem: return "theorem";
  }
  return "?";
}

int cmd_verify(const std::string& suite_name, std::uint64_t seed, unsigned threads) {
  mdd::VerifyConfig cfg;
  cfg.seed = seed;
  cfg.threads = threads;
  const auto suite = suite_name == "lemmas"     ? mdd::Suite::Lemmas
                     : suite_name == "theorems" ? mdd::Suite::Theorems
                                                : mdd::Suite::All;
  std::vector<mdd::PropertyResult> results;
  try {
    results = mdd::run_suite(suite, cfg);
  } catch (const std::exception& e) {
    std::cerr << "verify aborted: " << e.what() << "\n";
    return kFailure;
  }

  std::printf("%-34s %-10s %8s %6s %-9s %12s %8s  %s\n", "property", "category", "cases", "viol", "metric", "worst",
              "sec", "status");
  const mdd::PropertyResult* first_failure = nullptr;
  for (const auto& r : results) {
    std::printf("%-34s %-10s %8zu %6zu %-9s %12.3e %8.2f  %s\n", r.name.c_str(), category_name(r.category), r.cases,
                r.violations, r.metric.c_str(), r.worst, r.seconds, r.passed ? "PASS" : "FAIL");
    if (!r.passed && !first_failure) first_failure = &r;
  }
  std::printf("%zu property groups, seed %llu\n", results.size(), static_cast<unsigned long long>(seed));
  if (first_failure) {
    std::fprintf(stderr, "FAILED: %s: %s\n", first_failure->name.c_str(), first_failure->first_failure.c_str());
    return kFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-based masked diffusion decoding on exact discrete distributions"};
  app.require_subcommand(1);
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  std::string fault = "none";
  app.add_option("--inject-fault", fault)->check(CLI::IsMember({"none", "strict", "unfrozen"}))->group("");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "evaluate the experiment grid described by a JSON config");
  run->add_option("config", run_args.config, "config path")->required();
  run->add_option("--seed", run_args.seed, "override the config seed");
  run->add_option("--out", run_args.out, "output path, - for stdout");
  run->add_option("--format", run_args.format, "csv or json");
  run->add_option("--cap-seqs", run_args.cap_seqs, "max V^L table entries");
  run->add_option("--cap-perms", run_args.cap_perms, "max permutations to enumerate");
  run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  std::string suite = "all";
  std::uint64_t verify_seed = mdd::VerifyConfig{}.seed;
  auto* verify = app.add_subcommand("verify", "run the property battery and print residuals and slacks");
  verify->add_option("--suite", suite)->check(CLI::IsMember({"lemmas", "theorems", "all"}));
  verify->add_option("--seed", verify_seed);
  verify->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--inject-fault", fault)->check(CLI::IsMember({"none", "strict", "unfrozen"}))->group("");

  std::string families_format = "text";
  auto* families = app.add_subcommand("families", "list distribution families and their parameters");
  families->add_option("--format", families_format)->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (fault == "strict") mdd::set_fault_for_testing(mdd::Fault::NonStrictThreshold);
  if (fault == "unfrozen") mdd::set_fault_for_testing(mdd::Fault::UnfrozenContext);

  if (*run) return cmd_run(run_args, threads);
  if (*verify) return cmd_verify(suite, verify_seed, threads);
  if (families_format == "json") {
    std::cout << mdd::families_json().dump(2) << "\n";
  } else {
    std::cout << mdd::families_text();
  }
  return kOk;
}
