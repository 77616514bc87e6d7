#pragma once

// Fair-odds betting over characteristic sequences with exact rational capital.
//
// A strategy sees a read-only view of the revealed prefix χ_L[0 .. i-1] and
// may wager on s_i. A correct wager adds the stake, a wrong one subtracts it,
// so d(π) = (d(π0) + d(π1)) / 2 holds identically for any strategy driven by
// `step`.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnfw/bits.hpp"
#include "dnfw/boolfn.hpp"

namespace dnfw {

using Capital = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

/// "num/den", always with an explicit denominator.
inline std::string to_string(const Capital& c) {
  return boost::multiprecision::numerator(c).str() + "/" + boost::multiprecision::denominator(c).str();
}

/// Accepts "a/b" or a bare integer "a".
inline Capital parse_capital(const std::string& text) {
  using boost::multiprecision::cpp_int;
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Capital(cpp_int(text));
    cpp_int num(text.substr(0, slash));
    cpp_int den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Capital(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("bad rational '" + text + "'");
  }
}

enum class Side { in, out };

inline const char* to_string(Side s) { return s == Side::in ? "IN" : "OUT"; }

struct Bet {
  std::uint64_t target = 0;  ///< global index of the string wagered on
  Side side = Side::out;
  Capital stake;
};

/// Read access to a characteristic prefix π. The strategy may read any bit
/// before |π| and learns s_{|π|}, the string it is about to bet on.
class PrefixView {
 public:
  explicit PrefixView(std::span<const std::uint8_t> bits) : bits_(bits) {}

  std::uint64_t size() const noexcept { return bits_.size(); }

  bool bit(std::uint64_t i) const {
    if (i >= bits_.size()) throw std::out_of_range("PrefixView: query beyond the revealed prefix");
    return bits_[static_cast<std::size_t>(i)] != 0;
  }

  bool member(const BitString& y) const { return bit(global_index(y)); }

  BitString next_string() const { return string_at(size()); }

 private:
  std::span<const std::uint8_t> bits_;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual Capital initial_capital() const = 0;
  /// Called once per index, in order, after reset().
  virtual std::optional<Bet> next_bet(const PrefixView& view) = 0;
  virtual void reset() = 0;
  /// Sees the complete revealed prefix once the run ends, so the outcome of
  /// the final wager can be booked.
  virtual void finish(const PrefixView&) {}
};

/// Fair-odds update.
inline Capital step(const Capital& current, const std::optional<Bet>& bet, bool actual) {
  if (!bet) return current;
  if (bet->stake < 0) throw std::invalid_argument("step: negative stake");
  if (bet->stake > current) throw std::invalid_argument("step: stake exceeds current capital");
  const bool won = (bet->side == Side::in) == actual;
  return won ? current + bet->stake : current - bet->stake;
}

using StepRule = std::function<Capital(const Capital&, const std::optional<Bet>&, bool)>;

inline StepRule fair_step() { return [](const Capital& c, const std::optional<Bet>& b, bool a) { return step(c, b, a); }; }

namespace detail {

inline std::optional<Bet> checked_bet(Strategy& s, const PrefixView& view) {
  auto bet = s.next_bet(view);
  if (bet && bet->target != view.size())
    throw std::logic_error("strategy bet on index " + std::to_string(bet->target) + " while positioned at " +
                           std::to_string(view.size()));
  return bet;
}

}  // namespace detail

struct TraceStep {
  std::uint64_t index = 0;
  int length = 0;
  bool bit = false;
  std::optional<Bet> bet;
  Capital capital;  ///< after this step
};

struct SegmentSummary {
  int length = 0;
  Capital start;
  Capital end;
  Capital max;

  Capital gain() const { return end - start; }
  Capital gain_factor() const { return start == 0 ? Capital(0) : end / start; }
};

struct Trace {
  Capital initial;
  std::vector<TraceStep> steps;
  std::vector<SegmentSummary> segments;

  /// capital(0) is the initial capital, capital(i) the capital after i steps.
  const Capital& capital(std::size_t i) const { return i == 0 ? initial : steps[i - 1].capital; }

  Capital max_capital() const {
    Capital m = initial;
    for (const auto& s : steps)
      if (s.capital > m) m = s.capital;
    return m;
  }

  const SegmentSummary* segment(int n) const {
    for (const auto& s : segments)
      if (s.length == n) return &s;
    return nullptr;
  }
};

/// Plays `strategy` against χ_L over every string of length <= max_length.
inline Trace run(Strategy& strategy, const LanguageModel& lang, int max_length, const StepRule& rule = fair_step()) {
  if (max_length < 0 || max_length > kMaxTableArity) throw std::invalid_argument("run: max_length out of range");
  strategy.reset();
  Trace trace;
  trace.initial = strategy.initial_capital();
  const std::uint64_t total = segment_end(max_length) + 1;
  trace.steps.reserve(static_cast<std::size_t>(total));

  std::vector<std::uint8_t> revealed;
  revealed.reserve(static_cast<std::size_t>(total));
  Capital capital = trace.initial;

  for (int n = 0; n <= max_length; ++n) {
    SegmentSummary seg{n, capital, capital, capital};
    const TruthTable* slice = lang.slice(n);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
      const std::uint64_t i = segment_start(n) + v;
      const PrefixView view(std::span<const std::uint8_t>(revealed.data(), revealed.size()));
      auto bet = detail::checked_bet(strategy, view);
      const bool actual = slice != nullptr && (*slice)[v];
      capital = rule(capital, bet, actual);
      if (capital < 0) throw std::logic_error("run: capital went negative");
      if (capital > seg.max) seg.max = capital;
      trace.steps.push_back(TraceStep{i, n, actual, std::move(bet), capital});
      revealed.push_back(actual ? 1 : 0);
    }
    seg.end = capital;
    trace.segments.push_back(std::move(seg));
  }
  strategy.finish(PrefixView(std::span<const std::uint8_t>(revealed.data(), revealed.size())));
  return trace;
}

/// d(π): the capital after replaying the strategy over the whole prefix.
inline Capital replay(Strategy& strategy, std::span<const std::uint8_t> prefix, const StepRule& rule = fair_step()) {
  strategy.reset();
  Capital capital = strategy.initial_capital();
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const PrefixView view(prefix.first(i));
    auto bet = detail::checked_bet(strategy, view);
    capital = rule(capital, bet, prefix[i] != 0);
  }
  return capital;
}

struct AveragingFailure {
  std::size_t prefix_index = 0;
  Capital parent, child0, child1;
};

struct AveragingResult {
  bool ok = true;
  std::size_t checked = 0;
  std::optional<AveragingFailure> first_failure;
};

/// Checks d(π) = (d(π0) + d(π1)) / 2 exactly for each prefix, computing all
/// three capitals by independent replays.
inline AveragingResult check_averaging(Strategy& strategy, const std::vector<std::vector<std::uint8_t>>& prefixes,
                                       const StepRule& rule = fair_step()) {
  AveragingResult result;
  std::vector<std::uint8_t> ext;
  for (std::size_t k = 0; k < prefixes.size(); ++k) {
    const auto& p = prefixes[k];
    const Capital parent = replay(strategy, p, rule);
    ext.assign(p.begin(), p.end());
    ext.push_back(0);
    const Capital c0 = replay(strategy, ext, rule);
    ext.back() = 1;
    const Capital c1 = replay(strategy, ext, rule);
    ++result.checked;
    if (parent * 2 != c0 + c1) {
      result.ok = false;
      if (!result.first_failure) result.first_failure = AveragingFailure{k, parent, c0, c1};
    }
  }
  return result;
}

inline bool verify_averaging(Strategy& strategy, const std::vector<std::vector<std::uint8_t>>& prefixes,
                             const StepRule& rule = fair_step()) {
  return check_averaging(strategy, prefixes, rule).ok;
}

/// Strategy that never wagers.
class NeverBet final : public Strategy {
 public:
  explicit NeverBet(Capital initial = 1) : initial_(std::move(initial)) {}
  Capital initial_capital() const override { return initial_; }
  std::optional<Bet> next_bet(const PrefixView&) override { return std::nullopt; }
  void reset() override {}

 private:
  Capital initial_;
};

/// Strategy that stakes its entire capital on every string being absent.
class AllInOut final : public Strategy {
 public:
  explicit AllInOut(Capital initial = 1) : initial_(std::move(initial)) {}
  Capital initial_capital() const override { return initial_; }

  std::optional<Bet> next_bet(const PrefixView& view) override {
    if (view.size() > 0) capital_ = view.bit(view.size() - 1) ? Capital(0) : capital_ * 2;
    return Bet{view.size(), Side::out, capital_};
  }

  void reset() override { capital_ = initial_; }

 private:
  Capital initial_;
  Capital capital_;
};

// --- CSV output ----------------------------------------------------------

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "global_index,length,bit,bet_side,bet_stake,capital\n";
  for (const auto& s : trace.steps) {
    os << s.index << ',' << s.length << ',' << (s.bit ? 1 : 0) << ',';
    if (s.bet)
      os << to_string(s.bet->side) << ',' << to_string(s.bet->stake);
    else
      os << "NONE,0/1";
    os << ',' << to_string(s.capital) << '\n';
  }
}

inline void write_summary_csv(std::ostream& os, const Trace& trace) {
  os << "length,capital_start,capital_end,capital_max,gain_factor\n";
  for (const auto& s : trace.segments)
    os << s.length << ',' << to_string(s.start) << ',' << to_string(s.end) << ',' << to_string(s.max) << ','
       << to_string(s.gain_factor()) << '\n';
}

}  // namespace dnfw
