#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "dnfw/dnfw.hpp"

namespace {

using namespace dnfw;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open '" + path + "'");
  return in;
}

TruthTable load_table(const std::string& path) {
  auto in = open_input(path);
  return read_table(in);
}

nlohmann::json load_json(const std::string& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw config_error("'" + path + "': " + e.what());
  }
}

// "gen:<file.json>" or "gen:{...}" selects a generator; anything else is a
// language file.
LanguageModel load_lang_arg(const std::string& arg, std::optional<std::uint64_t> seed) {
  if (arg.rfind("gen:", 0) != 0) {
    auto in = open_input(arg);
    return read_language(in, "file:" + arg);
  }
  const std::string body = arg.substr(4);
  nlohmann::json j;
  if (!body.empty() && body.front() == '{') {
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw config_error(std::string("--lang: ") + e.what());
    }
  } else {
    j = load_json(body);
  }
  if (seed && !j.contains("seed")) j["seed"] = *seed;
  return generate(gen_spec_from_json(j));
}

struct StrategyFlags {
  std::string preset;
  std::optional<int> block, free;
  std::string stake;

  void add(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "desk | paper-default")->check(CLI::IsMember({"desk", "paper-default"}));
    cmd->add_option("--block", block, "block size b");
    cmd->add_option("--free", free, "free bits k");
    cmd->add_option("--stake", stake, "constant per-length stake a/b");
  }

  bool given() const { return !preset.empty() || block || free || !stake.empty(); }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    if (block || free) {
      j["block"] = block.value_or(4);
      j["free"] = free.value_or(2);
    } else {
      j["preset"] = preset.empty() ? "desk" : preset;
    }
    if (!stake.empty()) j["stake"] = stake;
    return j;
  }

  BettorParams params() const {
    auto j = json();
    if (j.contains("preset") && j.contains("stake")) {
      auto p = params_from_json({{"preset", j["preset"]}});
      const Capital s = parse_capital(stake);
      if (s <= 0) throw config_error("--stake must be positive");
      p.stake = [s](int) { return s; };
      p.name += ",stake=" + to_string(s);
      return p;
    }
    return params_from_json(j);
  }
};

int cmd_width(const std::string& file, bool witnesses) {
  const auto f = load_table(file);
  const auto r = dnf_width(f);
  std::cout << "width=" << r.width << '\n';
  if (witnesses)
    for (const auto& [v, t] : r.witness_terms) std::cout << BitString(f.arity(), v).str() << ' ' << t.str() << '\n';
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& lang_arg, std::optional<int> max_length,
                 const std::vector<int>& lengths, const StrategyFlags& sf, const std::string& out,
                 const std::string& format, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg;
  LanguageModel lang;
  if (!config_path.empty()) {
    cfg = load_config(config_path);
    if (seed && cfg.language_spec) cfg.language_spec->seed = *seed;
  }
  if (!lang_arg.empty())
    lang = load_lang_arg(lang_arg, seed);
  else if (!config_path.empty())
    lang = load_language(cfg);
  else
    throw config_error("simulate: give --lang or --config");
  if (max_length) cfg.max_length = *max_length;
  else if (config_path.empty()) throw config_error("simulate: --max-length is required without --config");
  if (!lengths.empty()) cfg.lengths = lengths;
  if (sf.given()) cfg.strategy = sf.json();
  const auto params = sf.given() ? sf.params() : params_from_json(cfg.strategy);
  if (cfg.max_length < 0 || cfg.max_length > kMaxTableArity) throw config_error("--max-length must be in [0, 24]");

  const auto result = run_experiment(lang, params, cfg.max_length, cfg.lengths);
  if (!out.empty()) cfg.out_dir = out;
  if (!out.empty() || (!config_path.empty() && format.empty())) {
    write_outputs(cfg, result);
    std::cerr << "wrote " << (std::filesystem::path(cfg.out_dir) / cfg.report_file).string() << ", "
              << cfg.trace_file << ", " << cfg.summary_file << '\n';
  } else if (format == "csv") {
    write_trace_csv(std::cout, result.trace);
  } else {
    std::cout << report_json_text(result.report);
  }
  return 0;
}

int cmd_betset(int n, const StrategyFlags& sf, const std::string& format) {
  const auto params = sf.params();
  const auto s = bet_set(n, params);
  if (format == "json") {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["strategy"] = params.name;
    j["size"] = s.size();
    auto arr = nlohmann::ordered_json::array();
    for (auto v : s.values) arr.push_back(BitString(n, v).str());
    j["strings"] = arr;
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  for (auto v : s.values) std::cout << segment_start(n) + v << ' ' << BitString(n, v).str() << '\n';
  std::cout << "size=" << s.size() << '\n';
  return 0;
}

int cmd_verify(std::size_t count, int min_len, int max_len, const StrategyFlags& sf, std::uint64_t seed) {
  if (min_len < 0 || min_len > max_len || max_len > 16) throw config_error("verify: need 0 <= min <= max <= 16");
  const auto params = sf.params();
  WidthBettor bettor(params);
  const auto res = check_averaging(bettor, sample_prefixes(count, min_len, max_len, params, seed));
  if (res.ok) {
    std::cout << "averaging ok: " << res.checked << " prefixes, " << params.name << '\n';
    return 0;
  }
  const auto& f = *res.first_failure;
  std::cout << "averaging FAILED at prefix " << f.prefix_index << ": d=" << to_string(f.parent)
            << " d0=" << to_string(f.child0) << " d1=" << to_string(f.child1) << '\n';
  return kExitFailure;
}

int cmd_gen(const std::string& spec_path, const std::string& out, std::optional<std::uint64_t> seed) {
  auto j = load_json(spec_path);
  if (seed) j["seed"] = *seed;
  const auto lang = generate(gen_spec_from_json(j));
  if (out.empty() || out == "-") {
    write_language(std::cout, lang);
  } else {
    std::ostringstream os;
    write_language(os, lang);
    write_text_file(out, os.str());
  }
  return 0;
}

NdQueryMachine load_machine(const std::string& file, std::optional<int> arity) {
  auto in = open_input(file);
  return read_machine(in, arity);
}

int cmd_machine_to_dnf(const std::string& file, std::optional<int> arity) {
  const auto m = load_machine(file, arity);
  const auto d = to_dnf(m);
  for (const auto& t : d.terms) std::cout << t.str() << '\n';
  std::cout << "terms=" << d.terms.size() << " width=" << d.width() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DNF width, width betting and query machines"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::optional<std::uint64_t> seed;
  std::string out, format;
  app.add_option("--seed", seed, "seed for generators and samplers");
  app.add_option("--out,-o", out, "output file or directory");
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  std::string file;
  bool witnesses = false;
  auto* width = app.add_subcommand("width", "exact DNF width of a truth table");
  width->add_option("tablefile", file)->required();
  width->add_flag("--witnesses", witnesses, "print a minimum-width implicant per true point");

  auto* depth = app.add_subcommand("depth", "decision-tree depth of a truth table");
  depth->add_option("tablefile", file)->required();

  std::string config, lang;
  std::optional<int> max_length;
  std::vector<int> lengths;
  StrategyFlags sf;
  auto* simulate = app.add_subcommand("simulate", "run the width bettor on a language");
  simulate->add_option("--config", config, "experiment JSON");
  simulate->add_option("--lang", lang, "language file, or gen:<spec.json | inline JSON>");
  simulate->add_option("--max-length", max_length);
  simulate->add_option("--lengths", lengths, "lengths to report (default all)");
  sf.add(simulate);

  int n = 0;
  auto* betset = app.add_subcommand("betset", "strings the bettor may ever bet on at length n");
  betset->add_option("-n", n)->required()->check(CLI::Range(1, 30));
  sf.add(betset);

  std::size_t count = 1000;
  int min_len = 4, max_len = 12;
  auto* verify = app.add_subcommand("verify", "check the averaging condition on sampled prefixes");
  verify->add_option("--count", count);
  verify->add_option("--min-length", min_len);
  verify->add_option("--max-length", max_len);
  sf.add(verify);

  auto* gen = app.add_subcommand("gen", "materialize a generator spec as a language file");
  gen->add_option("spec", file)->required();

  std::optional<int> arity;
  auto* to_dnf_cmd = app.add_subcommand("machine-to-dnf", "one term per accepting path");
  to_dnf_cmd->add_option("machinefile", file)->required();
  to_dnf_cmd->add_option("--arity", arity);
  auto* table_cmd = app.add_subcommand("machine-table", "truth table of the accepted set");
  table_cmd->add_option("machinefile", file)->required();
  table_cmd->add_option("--arity", arity);

  SelfCheckOptions sc;
  auto* self = app.add_subcommand("self-check", "run the invariant suite");
  self->add_flag("--mutate-step", sc.mutate_step, "plant a non-fair step rule");
  self->add_flag("--mutate-width", sc.mutate_width, "plant an off-by-one width");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*width) return cmd_width(file, witnesses);
    if (*depth) {
      std::cout << "depth=" << decision_tree_depth(load_table(file)) << '\n';
      return 0;
    }
    if (*simulate) return cmd_simulate(config, lang, max_length, lengths, sf, out, format, seed);
    if (*betset) return cmd_betset(n, sf, format);
    if (*verify) return cmd_verify(count, min_len, max_len, sf, seed.value_or(1));
    if (*gen) return cmd_gen(file, out, seed);
    if (*to_dnf_cmd) return cmd_machine_to_dnf(file, arity);
    if (*table_cmd) {
      write_table(std::cout, accepted_set(load_machine(file, arity)));
      return 0;
    }
    if (*self) {
      sc.seed = seed.value_or(1);
      return print_self_check(std::cout, self_check(sc)) ? 0 : kExitFailure;
    }
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const unsupported_size& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}
