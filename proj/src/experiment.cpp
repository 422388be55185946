#include "mdd/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mdd/error.hpp"
#include "mdd/parallel.hpp"

namespace mdd {

using nlohmann::json;

namespace {

std::string at_index(const std::string& field, std::size_t i) { return field + "[" + std::to_string(i) + "]"; }

void reject_unknown_keys(const json& obj, const std::string& field, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!keys.contains(key)) {
      std::string list;
      for (const auto& k : keys) list += (list.empty() ? "" : ", ") + k;
      throw ConfigError(field.empty() ? key : field + "." + key, "unknown key (expected one of: " + list + ")");
    }
  }
}

const json& require(const json& obj, const std::string& field, const char* key) {
  if (!obj.contains(key)) throw ConfigError(field.empty() ? key : field + "." + key, "missing required key");
  return obj.at(key);
}

void require_object(const json& v, const std::string& field) {
  if (!v.is_object()) throw ConfigError(field, "expected an object");
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t as_unsigned(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(field, "expected a non-negative integer");
}

int as_positive_int(const json& v, const std::string& field) {
  const auto n = as_integer(v, field);
  if (n <= 0 || n > 1'000'000'000) throw ConfigError(field, "expected a positive integer");
  return static_cast<int>(n);
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_number_array(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], at_index(field, i)));
  return out;
}

std::vector<TokenId> as_token_array(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of token ids");
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto t = as_integer(v[i], at_index(field, i));
    if (t < 0 || t > 1'000'000) throw ConfigError(at_index(field, i), "token id out of range");
    out.push_back(static_cast<TokenId>(t));
  }
  return out;
}

/// Accepts either a single object or an array of objects.
std::vector<std::pair<const json*, std::string>> one_or_many(const json& v, const std::string& field) {
  std::vector<std::pair<const json*, std::string>> out;
  if (v.is_array()) {
    if (v.empty()) throw ConfigError(field, "expected at least one entry");
    for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(&v[i], at_index(field, i));
  } else {
    out.emplace_back(&v, field);
  }
  return out;
}

struct FamilySchema {
  const char* name;
  const char* description;
  std::vector<std::pair<const char*, const char*>> params;  // key -> type, "?" suffix marks optional
};

const std::vector<FamilySchema>& family_schemas() {
  static const std::vector<FamilySchema> schemas{
      {"explicit",
       "joint table over V^L sequences, position 0 most significant",
       {{"L", "positive integer"}, {"V", "integer >= 2"}, {"weights", "array of V^L non-negative numbers"}}},
      {"product",
       "independent tokens",
       {{"marginals", "array of L probability vectors of equal length V"}}},
      {"markov",
       "first-order chain",
       {{"L", "positive integer"}, {"init", "probability vector of length V"},
        {"transition", "V x V row-stochastic matrix (array of rows)"}}},
      {"near_deterministic",
       "binary tokens flipped independently away from a template",
       {{"template", "array of L bits"}, {"flip_prob", "number in [0, 0.5)"}}},
      {"dirichlet",
       "table drawn from a symmetric Dirichlet",
       {{"L", "positive integer"}, {"V", "integer >= 2"}, {"concentration", "positive number"},
        {"seed?", "non-negative integer (defaults to the experiment seed)"}}},
  };
  return schemas;
}

DistributionConfig parse_distribution(const json& v, const std::string& field) {
  require_object(v, field);
  reject_unknown_keys(v, field, {"family", "name", "params"});
  DistributionConfig d;
  d.family = as_string(require(v, field, "family"), field + ".family");
  const FamilySchema* schema = nullptr;
  for (const auto& s : family_schemas()) {
    if (d.family == s.name) schema = &s;
  }
  if (!schema) throw ConfigError(field + ".family", "unknown family '" + d.family + "' (see `mdd families`)");
  d.name = v.contains("name") ? as_string(v.at("name"), field + ".name") : d.family;
  d.params = require(v, field, "params");
  require_object(d.params, field + ".params");
  std::set<std::string> allowed;
  for (const auto& [key, type] : schema->params) {
    std::string k = key;
    const bool optional = k.back() == '?';
    if (optional) k.pop_back();
    allowed.insert(k);
    if (!optional && !d.params.contains(k)) throw ConfigError(field + ".params." + k, "missing required key");
  }
  for (const auto& [key, value] : d.params.items()) {
    if (!allowed.contains(key)) throw ConfigError(field + ".params." + key, "unknown parameter for family " + d.family);
  }
  return d;
}

StrategySpec parse_strategy(const json& v, const std::string& field) {
  require_object(v, field);
  const auto kind = as_string(require(v, field, "kind"), field + ".kind");
  if (kind == "ar") {
    reject_unknown_keys(v, field, {"kind"});
    return StrategySpec::ar();
  }
  if (kind == "entropy_sum") {
    reject_unknown_keys(v, field, {"kind", "eta"});
    return StrategySpec::entropy_sum(as_number(require(v, field, "eta"), field + ".eta"));
  }
  if (kind == "max_entropy") {
    reject_unknown_keys(v, field, {"kind", "eta", "s_max"});
    return StrategySpec::max_entropy(as_number(require(v, field, "eta"), field + ".eta"),
                                     as_positive_int(require(v, field, "s_max"), field + ".s_max"));
  }
  if (kind == "uniform") {
    reject_unknown_keys(v, field, {"kind", "schedule"});
    const auto& s = require(v, field, "schedule");
    if (!s.is_array()) throw ConfigError(field + ".schedule", "expected an array of batch sizes");
    std::vector<int> schedule;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto n = as_integer(s[i], at_index(field + ".schedule", i));
      if (n < 0 || n > 1'000'000) throw ConfigError(at_index(field + ".schedule", i), "batch size out of range");
      schedule.push_back(static_cast<int>(n));
    }
    return StrategySpec::uniform(std::move(schedule));
  }
  throw ConfigError(field + ".kind", "unknown strategy kind '" + kind + "' (ar, uniform, entropy_sum, max_entropy)");
}

std::string hex_hash(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016zx", std::hash<std::string>{}(text));
  return buf;
}

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string row_strategy(const EvalReport& r) {
  return r.label == "strategy" ? r.strategy.name() : r.label + ":" + r.strategy.name();
}

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("", "JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                              ": " + e.what());
  }
  require_object(root, "(root)");
  reject_unknown_keys(root, "", {"schema", "distribution", "strategy", "eval", "seed", "output", "caps"});

  ExperimentConfig cfg;
  cfg.schema = static_cast<int>(as_integer(require(root, "", "schema"), "schema"));
  if (cfg.schema != 1) throw ConfigError("schema", "unsupported schema version " + std::to_string(cfg.schema));

  for (const auto& [v, field] : one_or_many(require(root, "", "distribution"), "distribution")) {
    cfg.distributions.push_back(parse_distribution(*v, field));
  }
  if (root.contains("strategy")) {
    for (const auto& [v, field] : one_or_many(root.at("strategy"), "strategy")) {
      cfg.strategies.push_back(parse_strategy(*v, field));
    }
  }
  if (root.contains("seed")) cfg.eval.seed = as_unsigned(root.at("seed"), "seed");

  if (root.contains("eval")) {
    const auto& e = root.at("eval");
    require_object(e, "eval");
    reject_unknown_keys(e, "eval", {"mode", "n_perms", "n_samples", "epsilon"});
    if (e.contains("mode")) {
      const auto mode = as_string(e.at("mode"), "eval.mode");
      if (mode == "exact") {
        cfg.eval.mode = EvalMode::Exact;
      } else if (mode == "mc") {
        cfg.eval.mode = EvalMode::MonteCarlo;
      } else {
        throw ConfigError("eval.mode", "expected \"exact\" or \"mc\"");
      }
    }
    if (e.contains("n_perms")) cfg.eval.n_perms = static_cast<std::size_t>(as_positive_int(e.at("n_perms"), "eval.n_perms"));
    if (e.contains("n_samples")) {
      cfg.eval.n_samples = static_cast<std::size_t>(as_positive_int(e.at("n_samples"), "eval.n_samples"));
    }
    if (e.contains("epsilon")) {
      const auto& eps = e.at("epsilon");
      cfg.epsilons = eps.is_array() ? as_number_array(eps, "eval.epsilon")
                                    : std::vector<double>{as_number(eps, "eval.epsilon")};
      for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
        if (!(cfg.epsilons[i] > 0.0) || !std::isfinite(cfg.epsilons[i])) {
          throw ConfigError(eps.is_array() ? at_index("eval.epsilon", i) : "eval.epsilon", "must be positive");
        }
      }
    }
  }
  if (cfg.strategies.empty() && cfg.epsilons.empty()) {
    throw ConfigError("strategy", "missing; give a strategy or eval.epsilon");
  }

  if (root.contains("output")) {
    const auto& o = root.at("output");
    require_object(o, "output");
    reject_unknown_keys(o, "output", {"path", "format"});
    if (o.contains("path")) cfg.output_path = as_string(o.at("path"), "output.path");
    if (o.contains("format")) cfg.format = as_string(o.at("format"), "output.format");
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("output.format", "expected \"csv\" or \"json\"");
  }
  if (root.contains("caps")) {
    const auto& c = root.at("caps");
    require_object(c, "caps");
    reject_unknown_keys(c, "caps", {"seqs", "perms"});
    if (c.contains("seqs")) cfg.eval.caps.max_sequences = as_unsigned(c.at("seqs"), "caps.seqs");
    if (c.contains("perms")) cfg.eval.caps.max_permutations = as_unsigned(c.at("perms"), "caps.perms");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

NamedDist build_distribution(const DistributionConfig& d, const Caps& caps, std::uint64_t seed,
                             const std::string& field) {
  const auto& p = d.params;
  const std::string pf = field + ".params";
  try {
    if (d.family == "explicit") {
      const int L = as_positive_int(p.at("L"), pf + ".L");
      const int V = as_positive_int(p.at("V"), pf + ".V");
      auto w = as_number_array(p.at("weights"), pf + ".weights");
      const std::size_t n = table_size(L, V, caps.max_sequences);
      if (w.size() != n) {
        throw ConfigError(pf + ".weights", "expected V^L = " + std::to_string(n) + " entries, got " +
                                               std::to_string(w.size()));
      }
      return {d.name, build_explicit(L, V, std::move(w), caps)};
    }
    if (d.family == "product") {
      const auto& m = p.at("marginals");
      if (!m.is_array() || m.empty()) throw ConfigError(pf + ".marginals", "expected a non-empty array");
      std::vector<CategoricalDist> marginals;
      for (std::size_t i = 0; i < m.size(); ++i) {
        marginals.push_back({as_number_array(m[i], at_index(pf + ".marginals", i))});
      }
      return {d.name, make_product(marginals, caps)};
    }
    if (d.family == "markov") {
      const int L = as_positive_int(p.at("L"), pf + ".L");
      const CategoricalDist init{as_number_array(p.at("init"), pf + ".init")};
      const auto& t = p.at("transition");
      if (!t.is_array()) throw ConfigError(pf + ".transition", "expected an array of rows");
      std::vector<double> flat;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto row = as_number_array(t[i], at_index(pf + ".transition", i));
        if (row.size() != init.size()) {
          throw ConfigError(at_index(pf + ".transition", i), "row length must equal the length of init");
        }
        flat.insert(flat.end(), row.begin(), row.end());
      }
      if (t.size() != init.size()) throw ConfigError(pf + ".transition", "expected V rows");
      return {d.name, make_markov_chain(init, flat, L, caps)};
    }
    if (d.family == "near_deterministic") {
      const auto templ = as_token_array(p.at("template"), pf + ".template");
      return {d.name, make_near_deterministic(templ, as_number(p.at("flip_prob"), pf + ".flip_prob"), caps)};
    }
    if (d.family == "dirichlet") {
      const int L = as_positive_int(p.at("L"), pf + ".L");
      const int V = as_positive_int(p.at("V"), pf + ".V");
      const double conc = as_number(p.at("concentration"), pf + ".concentration");
      const std::uint64_t s = p.contains("seed") ? as_unsigned(p.at("seed"), pf + ".seed") : seed;
      return {d.name, make_random_dirichlet(L, V, conc, s, caps)};
    }
  } catch (const Error& e) {
    throw ConfigError(pf, e.what());
  }
  throw ConfigError(field + ".family", "unknown family '" + d.family + "'");
}

bool RunResult::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const RunRow& r) { return r.report.pass(); });
}

RunResult run_experiment(const ExperimentConfig& config, const std::string& config_text) {
  const auto start = std::chrono::steady_clock::now();

  struct Cell {
    std::size_t dist;
    std::optional<StrategySpec> strategy;
    double epsilon = 0.0;
    int theorem = 0;
  };
  std::vector<NamedDist> dists;
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < config.distributions.size(); ++d) {
    const std::string field = config.distributions.size() > 1 ? at_index("distribution", d) : "distribution";
    dists.push_back(build_distribution(config.distributions[d], config.eval.caps, config.eval.seed, field));
    const int L = dists.back().dist.length();
    for (std::size_t s = 0; s < config.strategies.size(); ++s) {
      try {
        config.strategies[s].validate(L);
      } catch (const Error& e) {
        const std::string sf = config.strategies.size() > 1 ? at_index("strategy", s) : "strategy";
        throw ConfigError(sf, std::string(e.what()) + " (distribution '" + dists.back().name + "', L=" +
                                  std::to_string(L) + ")");
      }
      cells.push_back({d, config.strategies[s], 0.0, 0});
    }
    for (double eps : config.epsilons) {
      cells.push_back({d, std::nullopt, eps, 1});
      cells.push_back({d, std::nullopt, eps, 2});
    }
  }

  std::vector<std::shared_ptr<const Oracle>> oracles;
  for (const auto& d : dists) oracles.push_back(std::make_shared<const Oracle>(d.dist));

  EvalOptions options = config.eval;
  const unsigned threads = options.threads;
  // Cells run concurrently; a lone cell gets the whole pool instead.
  options.threads = cells.size() > 1 ? 1 : threads;

  RunResult result;
  auto reports = parallel_map(cells.size(), threads, [&](std::size_t i) {
    const Cell& c = cells[i];
    const Oracle& oracle = *oracles[c.dist];
    if (c.theorem == 1) return certify_theorem1(oracle, c.epsilon, options);
    if (c.theorem == 2) return certify_theorem2(oracle, c.epsilon, options);
    return evaluate_strategy(oracle, *c.strategy, options);
  });
  for (std::size_t i = 0; i < cells.size(); ++i) {
    result.rows.push_back({dists[cells[i].dist].name, std::move(reports[i])});
  }
  result.config_hash = hex_hash(config_text);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

const char* const kCsvColumns[19] = {"strategy", "eta",   "s_max",  "L",        "V",
                                     "H_nats",   "epsilon", "kl",   "kl_stderr", "e_iters",
                                     "e_iters_stderr", "bound_kl_theorem", "bound_kl_eq34", "bound_iters",
                                     "mode",     "perms", "samples", "seed",     "pass"};

std::string to_csv(const RunResult& result) {
  std::string out;
  for (std::size_t i = 0; i < std::size(kCsvColumns); ++i) out += (i ? "," : "") + std::string(kCsvColumns[i]);
  out += '\n';
  for (const auto& row : result.rows) {
    const auto& r = row.report;
    const bool has_s_max = r.strategy.kind != StrategyKind::EntropySum;
    const double iter_bound = std::isnan(r.theorem_iter_bound) ? r.iter_bound : r.theorem_iter_bound;
    const std::vector<std::string> fields{
        row_strategy(r),
        num(r.strategy.eta),
        has_s_max ? std::to_string(r.strategy.s_max) : "",
        std::to_string(r.length),
        std::to_string(r.vocab),
        num(r.data_entropy),
        r.epsilon ? num(*r.epsilon) : "",
        num(r.kl.value),
        num(r.kl.std_error),
        num(r.iterations.value),
        num(r.iterations.std_error),
        num(r.theorem_kl_bound),
        num(r.internal_kl_bound),
        num(iter_bound),
        r.mode == EvalMode::Exact ? "exact" : "mc",
        std::to_string(r.perms_evaluated),
        std::to_string(r.samples_drawn),
        std::to_string(r.seed),
        r.pass() ? "true" : "false",
    };
    for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
    out += '\n';
  }
  return out;
}

std::string to_json(const RunResult& result) {
  json rows = json::array();
  for (const auto& row : result.rows) {
    const auto& r = row.report;
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
    json strategy = {{"kind", r.strategy.name()}};
    if (r.strategy.kind == StrategyKind::EntropySum || r.strategy.kind == StrategyKind::MaxEntropy) {
      strategy["eta"] = r.strategy.eta;
    }
    if (r.strategy.kind == StrategyKind::MaxEntropy) strategy["s_max"] = r.strategy.s_max;
    if (r.strategy.kind == StrategyKind::UniformSchedule) strategy["schedule"] = r.strategy.schedule;
    rows.push_back({
        {"distribution", row.distribution},
        {"label", r.label},
        {"strategy", strategy},
        {"L", r.length},
        {"V", r.vocab},
        {"H_nats", r.data_entropy},
        {"epsilon", r.epsilon ? json(*r.epsilon) : json(nullptr)},
        {"kl", r.kl.value},
        {"kl_stderr", r.kl.std_error},
        {"e_iters", r.iterations.value},
        {"e_iters_stderr", r.iterations.std_error},
        {"bound_kl_theorem", nullable(r.theorem_kl_bound)},
        {"bound_kl_eq34", nullable(r.internal_kl_bound)},
        {"bound_iters_theorem", nullable(r.theorem_iter_bound)},
        {"bound_iters_strategy", nullable(r.iter_bound)},
        {"degenerate_entropy", r.degenerate_entropy},
        {"checks", checks},
        {"mode", r.mode == EvalMode::Exact ? "exact" : "mc"},
        {"perms", r.perms_evaluated},
        {"samples", r.samples_drawn},
        {"seed", r.seed},
        {"pass", r.pass()},
    });
  }
  const json doc = {
      {"rows", rows},
      {"provenance", {{"config_hash", result.config_hash}, {"tool_version", tool_version()}, {"wall_seconds", result.wall_seconds}}},
  };
  return doc.dump(2) + "\n";
}

std::string families_text() {
  std::string out;
  for (const auto& f : family_schemas()) {
    out += std::string(f.name) + " - " + f.description + "\n";
    for (const auto& [key, type] : f.params) out += "    " + std::string(key) + ": " + type + "\n";
  }
  return out;
}

json families_json() {
  json out = json::array();
  for (const auto& f : family_schemas()) {
    json params = json::object();
    for (const auto& [key, type] : f.params) {
      std::string k = key;
      const bool optional = k.back() == '?';
      if (optional) k.pop_back();
      params[k] = {{"type", type}, {"required", !optional}};
    }
    out.push_back({{"family", f.name}, {"description", f.description}, {"params", params}});
  }
  return out;
}

const char* tool_version() { return "0.1.0"; }

}  // namespace mdd
