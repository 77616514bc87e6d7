#pragma once

// Experiment configs, per-length reports and output writers.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnfw/boolfn.hpp"
#include "dnfw/langgen.hpp"
#include "dnfw/martingale.hpp"
#include "dnfw/width_bettor.hpp"

namespace dnfw {

/// Raised for malformed configs and command lines; maps to exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::optional<std::string> language_file;
  std::optional<GenSpec> language_spec;
  nlohmann::ordered_json strategy = {{"preset", "desk"}};
  int max_length = 12;
  std::vector<int> lengths;  ///< reported lengths; empty means 0..max_length
  std::string out_dir = ".";
  std::string report_file = "report.json";
  std::string trace_file = "trace.csv";
  std::string summary_file = "summary.csv";
  std::uint64_t seed = 0;
};

/// Strategy JSON: {"preset": "desk" | "paper-default"} or
/// {"block": b, "free": k, "stake": "a/b", "initial": "c"}.
inline BettorParams params_from_json(const nlohmann::json& j) {
  if (j.contains("preset")) {
    const auto name = j.at("preset").get<std::string>();
    if (name == "desk") return BettorParams::desk();
    if (name == "paper-default") return BettorParams::paper_default();
    throw config_error("unknown strategy preset '" + name + "'");
  }
  if (!j.contains("block") || !j.contains("free")) throw config_error("strategy needs \"preset\" or \"block\"+\"free\"");
  std::optional<Capital> stake;
  if (j.contains("stake")) stake = parse_capital(j.at("stake").get<std::string>());
  const Capital initial = j.contains("initial") ? parse_capital(j.at("initial").get<std::string>()) : Capital(4);
  try {
    return BettorParams::fixed(j.at("block").get<int>(), j.at("free").get<int>(), stake, initial);
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    const auto& lang = j.at("language");
    if (lang.contains("file"))
      c.language_file = lang.at("file").get<std::string>();
    else
      c.language_spec = gen_spec_from_json(lang);
    c.seed = j.value("seed", std::uint64_t{0});
    if (c.language_spec && !lang.contains("seed")) c.language_spec->seed = c.seed;
    if (j.contains("strategy")) c.strategy = j.at("strategy");
    c.max_length = j.at("max_length").get<int>();
    if (j.contains("lengths")) c.lengths = j.at("lengths").get<std::vector<int>>();
    if (j.contains("out")) {
      const auto& o = j.at("out");
      c.out_dir = o.value("dir", c.out_dir);
      c.report_file = o.value("report", c.report_file);
      c.trace_file = o.value("trace", c.trace_file);
      c.summary_file = o.value("summary", c.summary_file);
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  if (c.max_length < 0 || c.max_length > kMaxTableArity) throw config_error("config: max_length must be in [0, 24]");
  params_from_json(c.strategy);  // validate early
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config '" + path + "': " + e.what());
  }
  auto c = config_from_json(j);
  // relative paths inside a config are relative to the config itself
  const auto base = std::filesystem::path(path).parent_path();
  const auto rebase = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).string();
  };
  if (c.language_file) rebase(*c.language_file);
  if (c.language_spec)
    for (auto& m : c.language_spec->machines) rebase(m.file);
  return c;
}

inline LanguageModel load_language(const ExperimentConfig& c) {
  if (c.language_file) {
    std::ifstream in(*c.language_file);
    if (!in) throw config_error("cannot open language file '" + *c.language_file + "'");
    return read_language(in, "file:" + *c.language_file);
  }
  if (!c.language_spec) throw config_error("config: no language");
  return generate(*c.language_spec);
}

// --- report --------------------------------------------------------------

struct WinningPot {
  Subcube cube;
  Capital initial;
  Capital final;
  Capital factor() const { return final / initial; }
};

struct LengthRecord {
  int n = 0;
  BettingCase observed_case = BettingCase::none;
  BettingCase predicted_case = BettingCase::none;
  std::optional<std::uint64_t> witness_index;  ///< global index of w
  std::optional<WinningPot> winning;
  int pots = 0;
  int pots_grown = 0;
  Capital predicted;
  Capital observed;
  bool match = false;
};

struct Report {
  std::string language;
  std::string strategy;
  int max_length = 0;
  Capital initial;
  Capital final;
  Capital max;
  std::vector<LengthRecord> lengths;

  bool all_match() const {
    for (const auto& r : lengths)
      if (!r.match) return false;
    return true;
  }
};

/// Free positions shown as '*', fixed ones as their bit.
inline std::string cube_pattern(const Subcube& c) {
  std::string s(static_cast<std::size_t>(c.ambient()), '*');
  for (int p = 1; p <= c.ambient(); ++p) {
    const auto bit = position_mask(c.ambient(), p);
    if (c.fixed_mask() & bit) s[static_cast<std::size_t>(p - 1)] = (c.fixed_values() & bit) ? '1' : '0';
  }
  return s;
}

inline LengthRecord make_length_record(int n, const WidthBettor& bettor, const Trace& trace,
                                       const LanguageModel& lang) {
  LengthRecord r;
  r.n = n;
  const auto* seg = trace.segment(n);
  if (seg == nullptr) throw std::invalid_argument("report: length " + std::to_string(n) + " not in trace");
  r.observed = seg->gain();

  const auto prediction = predict_length(lang.slice_or_empty(n), bettor.params());
  r.predicted_case = prediction.kind;
  r.predicted = prediction.gain;

  if (const auto* st = bettor.state(n); st != nullptr && st->active) {
    r.observed_case = st->witness ? BettingCase::witness : BettingCase::all_absent;
    if (st->witness) r.witness_index = segment_start(n) + *st->witness;
    r.pots = static_cast<int>(st->pots.size());
    for (const auto& pot : st->pots) {
      if (pot.pot <= pot.initial) continue;
      ++r.pots_grown;
      if (!r.winning || pot.pot / pot.initial > r.winning->factor()) r.winning = WinningPot{pot.cube, pot.initial, pot.pot};
    }
  }
  r.match = r.predicted == r.observed;
  return r;
}

struct ExperimentResult {
  Report report;
  Trace trace;
};

/// Σ 2·α_n over the active lengths up to max_length must fit in the initial
/// capital, otherwise a losing run could demand more than the bettor holds.
inline void check_stake_budget(const BettorParams& params, int max_length) {
  Capital risked = 0;
  for (int n = 0; n <= max_length; ++n)
    if (params.active(n)) risked += 2 * params.stake(n);
  if (risked > params.initial_capital)
    throw config_error("strategy risks " + to_string(risked) + " up to length " + std::to_string(max_length) +
                       " but starts with " + to_string(params.initial_capital));
}

inline ExperimentResult run_experiment(const LanguageModel& lang, const BettorParams& params, int max_length,
                                       std::vector<int> lengths = {}) {
  check_stake_budget(params, max_length);
  WidthBettor bettor(params);
  ExperimentResult out;
  out.trace = run(bettor, lang, max_length);
  if (lengths.empty())
    for (int n = 0; n <= max_length; ++n) lengths.push_back(n);

  auto& rep = out.report;
  rep.language = lang.provenance();
  rep.strategy = params.name;
  rep.max_length = max_length;
  rep.initial = out.trace.initial;
  rep.final = out.trace.capital(out.trace.steps.size());
  rep.max = out.trace.max_capital();
  for (int n : lengths) {
    if (n < 0 || n > max_length) throw config_error("reported length " + std::to_string(n) + " outside 0..max_length");
    rep.lengths.push_back(make_length_record(n, bettor, out.trace, lang));
  }
  return out;
}

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  return run_experiment(load_language(c), params_from_json(c.strategy), c.max_length, c.lengths);
}

inline nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["language"] = r.language;
  j["strategy"] = r.strategy;
  j["max_length"] = r.max_length;
  j["capital_initial"] = to_string(r.initial);
  j["capital_final"] = to_string(r.final);
  j["capital_max"] = to_string(r.max);
  j["all_match"] = r.all_match();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& l : r.lengths) {
    nlohmann::ordered_json e;
    e["n"] = l.n;
    e["case"] = to_string(l.observed_case);
    e["predicted_case"] = to_string(l.predicted_case);
    e["witness_index"] = l.witness_index ? nlohmann::ordered_json(*l.witness_index) : nlohmann::ordered_json(nullptr);
    if (l.winning) {
      nlohmann::ordered_json w;
      w["pattern"] = cube_pattern(l.winning->cube);
      w["free_positions"] = mask_positions(l.n, l.winning->cube.free_mask());
      w["initial"] = to_string(l.winning->initial);
      w["final"] = to_string(l.winning->final);
      w["factor"] = to_string(l.winning->factor());
      e["winning_subcube"] = w;
    } else {
      e["winning_subcube"] = nullptr;
    }
    e["pots"] = l.pots;
    e["pots_grown"] = l.pots_grown;
    e["predicted_gain"] = to_string(l.predicted);
    e["observed_gain"] = to_string(l.observed);
    e["match"] = l.match;
    arr.push_back(e);
  }
  j["lengths"] = arr;
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

inline std::string report_json_text(const Report& r) { return to_json(r).dump(2) + "\n"; }

inline std::string trace_csv_text(const Trace& t) {
  std::ostringstream os;
  write_trace_csv(os, t);
  return os.str();
}

inline std::string summary_csv_text(const Trace& t) {
  std::ostringstream os;
  write_summary_csv(os, t);
  return os.str();
}

/// Writes report, trace and summary under c.out_dir.
inline void write_outputs(const ExperimentConfig& c, const ExperimentResult& r) {
  const std::filesystem::path dir(c.out_dir);
  write_text_file(dir / c.report_file, report_json_text(r.report));
  write_text_file(dir / c.trace_file, trace_csv_text(r.trace));
  write_text_file(dir / c.summary_file, summary_csv_text(r.trace));
}

}  // namespace dnfw
