#pragma once

// Invariant suite behind `dnfw self-check`, plus the prefix sampler shared by
// the averaging checks. Planted faults let the suite prove it can fail.

#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "dnfw/boolfn.hpp"
#include "dnfw/langgen.hpp"
#include "dnfw/machines.hpp"
#include "dnfw/martingale.hpp"
#include "dnfw/width.hpp"
#include "dnfw/width_bettor.hpp"

namespace dnfw {

/// A slice drawn from a mix of generators so sampled prefixes hit both
/// betting phases and planted wins, not just random noise.
inline TruthTable mixed_slice(int n, const BettorParams& params, std::mt19937_64& rng) {
  const std::uint64_t seed = rng();
  switch (rng() % 5) {
    case 0: return TruthTable(n);
    case 1: return random_table(n, 0.5, seed);
    case 2: return planted_width_table(n, n / 2, 1 + static_cast<int>(rng() % 3), seed);
    default: {
      if (params.active(n)) {
        const int b = params.block_size(n), k = params.free_bits(n);
        const auto v = rng() % static_cast<std::uint64_t>(n);
        const bool final_block = (rng() % 4) == 0;
        try {
          return gen_theorem_case2(n, b, k, v, seed, final_block).language.slice_or_empty(n);
        } catch (const std::invalid_argument&) {
          // infeasible parameters at this length
        }
      }
      return random_table(n, 0.5, seed);
    }
  }
}

/// `count` characteristic prefixes whose next string has length in
/// [min_len, max_len], each cut from a freshly mixed language.
inline std::vector<std::vector<std::uint8_t>> sample_prefixes(std::size_t count, int min_len, int max_len,
                                                              const BettorParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int len = min_len + static_cast<int>(rng() % static_cast<std::uint64_t>(max_len - min_len + 1));
    LanguageModel lang;
    for (int m = 0; m <= len; ++m) lang.set_slice(mixed_slice(m, params, rng));
    const std::uint64_t cut = segment_start(len) + rng() % (std::uint64_t{1} << len);
    out.push_back(lang.characteristic_prefix(cut));
  }
  return out;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelfCheckOptions {
  bool mutate_step = false;   ///< winning bets pay one extra unit
  bool mutate_width = false;  ///< width reported one too large
  std::uint64_t seed = 1;
};

inline std::vector<CheckResult> self_check(const SelfCheckOptions& opt = {}) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(opt.seed);

  const auto width_of = [&](const TruthTable& f) { return dnf_width(f).width + (opt.mutate_width ? 1 : 0); };

  {
    CheckResult r{"width oracle agreement", true, ""};
    std::size_t tested = 0;
    auto check = [&](const TruthTable& f) {
      const int w = width_of(f);
      for (int t = 0; t <= f.arity(); ++t)
        if ((w <= t) != width_at_most_by_cover(f, t)) {
          r.passed = false;
          r.detail = "disagreement on n=" + std::to_string(f.arity()) + " table " + f.bits();
          return;
        }
      ++tested;
    };
    for (int n = 0; n <= 3 && r.passed; ++n)
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << (1U << n)) && r.passed; ++code)
        check(TruthTable::from_predicate(n, [&](std::uint64_t v) { return (code >> v) & 1U; }));
    for (int n = 4; n <= 7 && r.passed; ++n)
      for (int i = 0; i < 30 && r.passed; ++i) check(random_table(n, 0.5, rng()));
    if (r.passed) r.detail = std::to_string(tested) + " functions";
    out.push_back(r);
  }

  {
    CheckResult r{"averaging condition", true, ""};
    StepRule rule = fair_step();
    if (opt.mutate_step)
      rule = [](const Capital& c, const std::optional<Bet>& b, bool a) {
        const Capital next = step(c, b, a);
        return next > c ? next + 1 : next;
      };
    std::size_t checked = 0;
    for (const auto& params : {BettorParams::desk(), BettorParams::paper_default()}) {
      WidthBettor bettor(params);
      const auto res = check_averaging(bettor, sample_prefixes(150, 4, 9, params, rng()), rule);
      checked += res.checked;
      if (!res.ok) {
        r.passed = false;
        r.detail = params.name + ": prefix " + std::to_string(res.first_failure->prefix_index) + " violates d(p)=(d(p0)+d(p1))/2";
        break;
      }
    }
    if (r.passed) r.detail = std::to_string(checked) + " prefixes, exact";
    out.push_back(r);
  }

  {
    CheckResult r{"query-machine width bound", true, ""};
    int tested = 0;
    for (int i = 0; i < 150 && r.passed; ++i) {
      const int n = 1 + static_cast<int>(rng() % 8);
      const int f = static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1));
      const auto m = random_machine(n, f, 40, rng());
      const auto table = accepted_set(m);
      const auto dnf = to_dnf(m);
      if (width_of(table) > f || dnf.table() != table || dnf.width() > f) {
        r.passed = false;
        r.detail = "machine " + std::to_string(i) + " (n=" + std::to_string(n) + ", f=" + std::to_string(f) + ")";
      }
      ++tested;
    }
    if (r.passed) r.detail = std::to_string(tested) + " machines";
    out.push_back(r);
  }

  {
    CheckResult r{"width <= decision-tree depth", true, ""};
    int tested = 0;
    for (int n = 0; n <= 7 && r.passed; ++n)
      for (int i = 0; i < 25 && r.passed; ++i) {
        const auto f = random_table(n, 0.5, rng());
        if (width_of(f) > decision_tree_depth(f)) {
          r.passed = false;
          r.detail = "n=" + std::to_string(n) + " table " + f.bits();
        }
        ++tested;
      }
    if (r.passed) r.detail = std::to_string(tested) + " functions";
    out.push_back(r);
  }

  {
    CheckResult r{"bet-set size", true, ""};
    const auto params = BettorParams::paper_default();
    for (int n = params.min_length; n <= 32 && r.passed; ++n) {
      const auto s = bet_set(n, params);
      const auto bound = bet_set_bound(n, params.block_size(n), params.free_bits(n));
      if (s.size() > bound) {
        r.passed = false;
        r.detail = "n=" + std::to_string(n) + ": " + std::to_string(s.size()) + " > " + std::to_string(bound);
      }
    }
    if (r.passed) r.detail = "n <= 32 within n + n*sum C(s,k)*2^k";
    out.push_back(r);
  }

  {
    CheckResult r{"case gains match closed form", true, ""};
    const auto params = BettorParams::desk();
    LanguageModel lang;
    for (int n : {4, 8}) lang.set_slice(TruthTable(n));
    auto inst = gen_theorem_case2(12, 4, 2, 3, opt.seed);
    lang.set_slice(inst.language.slice_or_empty(12));
    WidthBettor bettor(params);
    const auto trace = run(bettor, lang, 12);
    for (int n : {4, 8, 12}) {
      const auto pred = predict_length(lang.slice_or_empty(n), params);
      if (pred.gain != trace.segment(n)->gain()) {
        r.passed = false;
        r.detail = "n=" + std::to_string(n) + " predicted " + to_string(pred.gain) + " observed " +
                   to_string(trace.segment(n)->gain());
      }
    }
    if (r.passed) r.detail = "n in {4, 8, 12}";
    out.push_back(r);
  }
  return out;
}

inline bool print_self_check(std::ostream& os, const std::vector<CheckResult>& results) {
  bool ok = true;
  for (const auto& r : results) {
    os << (r.passed ? "PASS  " : "FAIL  ") << r.name;
    for (std::size_t pad = r.name.size(); pad < 34; ++pad) os << ' ';
    os << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok;
}

}  // namespace dnfw
