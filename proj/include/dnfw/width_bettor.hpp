#pragma once

// The boundary-subcube betting strategy against languages of small DNF width.
//
// Per length n the strategy risks two pots of α_n each:
//   * phase 1: all-in bets that each of the first n strings of length n is
//     absent; the pot doubles on every correct call and dies on the first
//     member, which becomes the witness w;
//   * phase 2: the second pot is split equally over the boundary subcubes of
//     w (dimension-k subcubes through w whose free positions sit inside one
//     block of w's block partition). For every later string x of length n,
//     each live subcube containing x first checks that all of its members
//     below x are in L, then stakes its whole pot on x ∈ L.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnfw/bits.hpp"
#include "dnfw/boolfn.hpp"
#include "dnfw/martingale.hpp"

namespace dnfw {

// --- parameters ----------------------------------------------------------

/// ⌊lg n⌋ for n >= 1, 0 otherwise.
inline int floor_lg(int n) { return n >= 1 ? std::bit_width(static_cast<unsigned>(n)) - 1 : 0; }

/// ⌊2 lg lg n⌋ for n >= 2, 0 otherwise.
inline int floor_two_lglg(int n) {
  if (n < 2) return 0;
  const long double v = 2.0L * std::log2(std::log2(static_cast<long double>(n)));
  // exact at powers of two; no other integer n makes 2 lg lg n integral
  return std::max(0, static_cast<int>(std::floor(v + 1e-12L)));
}

struct BettorParams {
  std::string name = "custom";
  std::function<int(int)> block_size;
  std::function<int(int)> free_bits;
  std::function<Capital(int)> stake;
  Capital initial_capital = 4;
  int min_length = 1;

  /// b(n) = ⌊lg n⌋, k(n) = min(b, ⌊2 lg lg n⌋), α_n = 1/n², capital 4.
  static BettorParams paper_default() {
    BettorParams p;
    p.name = "paper-default";
    p.block_size = [](int n) { return floor_lg(n); };
    p.free_bits = [](int n) { return std::min(floor_lg(n), floor_two_lglg(n)); };
    p.stake = inverse_square();
    p.min_length = p.first_active_length();
    return p;
  }

  /// b = 4, k = 2, α_n = 1/n², capital 4.
  static BettorParams desk() {
    auto p = fixed(4, 2, std::nullopt);
    p.name = "desk";
    return p;
  }

  /// Constant b and k; α_n = 1/n² unless a constant stake is given.
  static BettorParams fixed(int b, int k, std::optional<Capital> constant_stake, Capital initial = 4) {
    if (b < 1 || k < 1 || k > b) throw std::invalid_argument("BettorParams: need 1 <= k <= b");
    BettorParams p;
    p.name = "fixed(b=" + std::to_string(b) + ",k=" + std::to_string(k) + ")";
    p.block_size = [b](int) { return b; };
    p.free_bits = [k](int) { return k; };
    if (constant_stake) {
      if (*constant_stake <= 0) throw std::invalid_argument("BettorParams: stake must be positive");
      p.stake = [s = *constant_stake](int) { return s; };
    } else {
      p.stake = inverse_square();
    }
    p.initial_capital = std::move(initial);
    p.min_length = p.first_active_length();
    return p;
  }

  static std::function<Capital(int)> inverse_square() {
    return [](int n) { return Capital(1, static_cast<long long>(n) * n); };
  }

  /// Whether the strategy bets at length n at all.
  bool structurally_active(int n) const {
    if (n < 1 || n > kMaxStringLength) return false;
    const int b = block_size(n), k = free_bits(n);
    return b >= 1 && k >= 1 && k <= b && b <= n;
  }

  bool active(int n) const { return n >= min_length && structurally_active(n); }

  int first_active_length() const {
    for (int n = 1; n <= kMaxStringLength; ++n)
      if (structurally_active(n)) return n;
    return kMaxStringLength + 1;
  }
};

// --- blocks and boundary subcubes ----------------------------------------

struct BlockRange {
  int first = 1;  ///< 1-based, inclusive
  int last = 1;
  int size() const noexcept { return last - first + 1; }
  bool contains(int pos) const noexcept { return pos >= first && pos <= last; }
  friend bool operator==(const BlockRange&, const BlockRange&) = default;
};

/// Consecutive size-b ranges over positions 1..n; a short final range holds
/// the n mod b low-order positions.
inline std::vector<BlockRange> partition_blocks(int n, int b) {
  if (b < 1 || b > n) throw std::invalid_argument("partition_blocks: need 1 <= b <= n");
  std::vector<BlockRange> out;
  for (int first = 1; first <= n; first += b) out.push_back({first, std::min(n, first + b - 1)});
  return out;
}

/// Subcubes through w whose k free positions lie in one block; block-major,
/// then lexicographic in the free positions.
inline std::vector<Subcube> boundary_subcubes(const BitString& w, int b, int k) {
  const int n = w.length();
  if (k < 0 || k > b) throw std::invalid_argument("boundary_subcubes: need k <= b");
  std::vector<Subcube> out;
  const std::uint64_t all = low_mask(n);
  for (const auto& block : partition_blocks(n, b)) {
    if (block.size() < k) continue;
    std::vector<int> positions;
    for (int p = block.first; p <= block.last; ++p) positions.push_back(p);
    for_each_combination(positions, k, [&](const std::vector<int>& free_pos) {
      out.emplace_back(n, all & ~positions_mask(n, free_pos), w.value());
      return false;
    });
  }
  return out;
}

/// Σ over blocks of size s >= k of C(s, k), without enumerating.
inline std::uint64_t boundary_subcube_count(int n, int b, int k) {
  if (b < 1 || b > n || k < 0 || k > b) return 0;
  const std::uint64_t full = static_cast<std::uint64_t>(n / b);
  const int rem = n % b;
  return full * binomial(b, k) + (rem >= k && rem > 0 ? binomial(rem, k) : 0);
}

/// Index of the first block holding at least k of the free positions.
inline std::optional<std::size_t> pigeonhole_block(const std::vector<int>& free_positions,
                                                   const std::vector<BlockRange>& blocks, int k) {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto hits = std::count_if(free_positions.begin(), free_positions.end(),
                                    [&](int p) { return blocks[i].contains(p); });
    if (hits >= k) return i;
  }
  return std::nullopt;
}

// --- bet set -------------------------------------------------------------

struct BetSet {
  int n = 0;
  std::vector<std::uint64_t> values;  ///< sorted, distinct within-length values

  std::size_t size() const noexcept { return values.size(); }
  bool contains_value(std::uint64_t v) const { return std::binary_search(values.begin(), values.end(), v); }
};

/// Every length-n string the strategy could ever wager on: the first n
/// strings plus all points of their boundary subcubes. Needs no language access.
inline BetSet bet_set(int n, const BettorParams& params) {
  BetSet s{n, {}};
  if (!params.active(n)) return s;
  const int b = params.block_size(n), k = params.free_bits(n);
  const std::uint64_t first = std::min<std::uint64_t>(static_cast<std::uint64_t>(n), std::uint64_t{1} << std::min(n, 63));
  for (std::uint64_t v = 0; v < first; ++v) {
    s.values.push_back(v);
    for (const auto& cube : boundary_subcubes(BitString(n, v), b, k))
      cube.for_each_member([&](std::uint64_t y) {
        s.values.push_back(y);
        return true;
      });
  }
  std::sort(s.values.begin(), s.values.end());
  s.values.erase(std::unique(s.values.begin(), s.values.end()), s.values.end());
  return s;
}

/// n + n · (Σ_blocks C(s,k)) · 2^k.
inline std::uint64_t bet_set_bound(int n, int b, int k) {
  if (b < 1 || b > n || k < 1 || k > b) return 0;
  return static_cast<std::uint64_t>(n) +
         static_cast<std::uint64_t>(n) * boundary_subcube_count(n, b, k) * (std::uint64_t{1} << k);
}

// --- the strategy --------------------------------------------------------

enum class Phase { phase1, phase2, done };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::phase1: return "PHASE1";
    case Phase::phase2: return "PHASE2";
    case Phase::done: return "DONE";
  }
  return "?";
}

struct SubcubePot {
  Subcube cube;
  Capital initial;
  Capital pot;
  bool alive = true;
  int wins = 0;
};

struct LengthState {
  int n = 0;
  bool active = false;
  Phase phase = Phase::done;
  Capital stake;                    ///< α_n
  Capital phase1_pot;
  int phase1_correct = 0;
  std::optional<std::uint64_t> witness;  ///< within-length value of w
  std::vector<SubcubePot> pots;
};

class WidthBettor final : public Strategy {
 public:
  explicit WidthBettor(BettorParams params) : params_(std::move(params)) { reset(); }

  const BettorParams& params() const noexcept { return params_; }

  Capital initial_capital() const override { return params_.initial_capital; }

  void reset() override {
    states_.clear();
    current_ = nullptr;
    next_index_ = 0;
    pending_.reset();
  }

  std::optional<Bet> next_bet(const PrefixView& view) override {
    const std::uint64_t i = view.size();
    if (i != next_index_)
      throw std::logic_error("WidthBettor: expected index " + std::to_string(next_index_) + ", got " +
                             std::to_string(i) + " (reset() before replaying)");
    settle(view);
    ++next_index_;

    const BitString s = string_at(i);
    if (current_ == nullptr || current_->n != s.length()) begin_length(s.length());
    auto& st = *current_;

    if (st.phase == Phase::phase1) {
      if (s.value() < static_cast<std::uint64_t>(st.n)) {
        pending_ = Pending{i, Phase::phase1, {}};
        return Bet{i, Side::out, st.phase1_pot};
      }
      st.phase = Phase::done;
    }
    if (st.phase != Phase::phase2 || s.value() <= *st.witness) return std::nullopt;

    const std::uint64_t x = s.value();
    const std::uint64_t base = segment_start(st.n);
    Pending p{i, Phase::phase2, {}};
    Capital total = 0;
    for (std::size_t j = 0; j < st.pots.size(); ++j) {
      auto& pot = st.pots[j];
      if (!pot.alive || !pot.cube.contains_value(x)) continue;
      const bool verified = pot.cube.for_each_member([&](std::uint64_t y) { return y >= x || view.bit(base + y); });
      if (!verified) {
        pot.alive = false;
        continue;
      }
      if (pot.pot == 0) continue;
      total += pot.pot;
      p.pots.push_back(j);
    }
    if (p.pots.empty()) return std::nullopt;
    pending_ = std::move(p);
    return Bet{i, Side::in, total};
  }

  void finish(const PrefixView& view) override {
    if (view.size() == next_index_) settle(view);
  }

  /// Per-length bookkeeping for every length visited so far.
  const std::map<int, LengthState>& states() const noexcept { return states_; }

  const LengthState* state(int n) const {
    auto it = states_.find(n);
    return it == states_.end() ? nullptr : &it->second;
  }

 private:
  struct Pending {
    std::uint64_t index = 0;
    Phase phase = Phase::phase1;
    std::vector<std::size_t> pots;
  };

  void begin_length(int n) {
    LengthState st;
    st.n = n;
    st.active = params_.active(n);
    if (st.active) {
      st.stake = params_.stake(n);
      st.phase1_pot = st.stake;
      st.phase = Phase::phase1;
    }
    current_ = &(states_[n] = std::move(st));
  }

  void settle(const PrefixView& view) {
    if (!pending_) return;
    const Pending p = std::move(*pending_);
    pending_.reset();
    const bool member = view.bit(p.index);
    auto& st = states_.at(length_at(p.index));
    const std::uint64_t v = p.index - segment_start(st.n);

    if (p.phase == Phase::phase1) {
      if (!member) {
        st.phase1_pot *= 2;
        ++st.phase1_correct;
        if (st.phase1_correct == st.n) st.phase = Phase::done;
        return;
      }
      st.phase1_pot = 0;
      st.witness = v;
      const auto cubes = boundary_subcubes(BitString(st.n, v), params_.block_size(st.n), params_.free_bits(st.n));
      if (cubes.empty()) {
        st.phase = Phase::done;
        return;
      }
      const Capital share = st.stake / static_cast<long long>(cubes.size());
      st.pots.reserve(cubes.size());
      for (const auto& c : cubes) st.pots.push_back(SubcubePot{c, share, share, true, 0});
      st.phase = Phase::phase2;
      return;
    }

    for (auto j : p.pots) {
      auto& pot = st.pots[j];
      if (member) {
        pot.pot *= 2;
        ++pot.wins;
      } else {
        pot.pot = 0;
        pot.alive = false;
      }
    }
  }

  BettorParams params_;
  std::map<int, LengthState> states_;
  LengthState* current_ = nullptr;
  std::uint64_t next_index_ = 0;
  std::optional<Pending> pending_;
};

// --- closed-form predictions ---------------------------------------------
//
// Computed from the slice alone, pot by pot, without driving the strategy.

enum class BettingCase { none = 0, all_absent = 1, witness = 2 };

inline const char* to_string(BettingCase c) {
  switch (c) {
    case BettingCase::none: return "none";
    case BettingCase::all_absent: return "1";
    case BettingCase::witness: return "2";
  }
  return "?";
}

struct PotPrediction {
  Subcube cube;
  Capital initial;
  Capital final;
  int bets_won = 0;
  bool contained = false;  ///< cube ⊆ L^{=n}
  int members_after_witness = 0;
};

struct LengthPrediction {
  int n = 0;
  BettingCase kind = BettingCase::none;
  std::optional<std::uint64_t> witness;
  Capital stake;
  Capital gain;
  std::vector<PotPrediction> pots;
};

/// Final capital of one phase-2 pot of size `initial` on subcube `cube`.
inline PotPrediction predict_pot(const TruthTable& slice, const Subcube& cube, std::uint64_t witness,
                                 const Capital& initial) {
  PotPrediction p{cube, initial, initial, 0, true, 0};
  bool below_ok = true;
  bool lost = false;
  for (auto y : cube.members()) {
    const bool in = slice[y];
    if (!in) p.contained = false;
    if (y < witness) {
      if (!in) below_ok = false;
      continue;
    }
    if (y == witness) continue;
    ++p.members_after_witness;
    if (!below_ok || lost) continue;
    if (in) {
      ++p.bets_won;
    } else {
      lost = true;
    }
  }
  if (!below_ok)
    p.final = initial;  // verification fails before the first wager
  else if (lost)
    p.final = 0;
  else
    p.final = initial * Capital(boost::multiprecision::cpp_int(1) << p.bets_won);
  return p;
}

inline LengthPrediction predict_length(const TruthTable& slice, const BettorParams& params) {
  LengthPrediction r;
  r.n = slice.arity();
  const int n = r.n;
  if (!params.active(n)) return r;
  r.stake = params.stake(n);

  std::optional<std::uint64_t> w;
  for (std::uint64_t v = 0; v < static_cast<std::uint64_t>(n) && v < slice.size(); ++v)
    if (slice[v]) {
      w = v;
      break;
    }
  if (!w) {
    r.kind = BettingCase::all_absent;
    r.gain = r.stake * Capital((boost::multiprecision::cpp_int(1) << n) - 1);
    return r;
  }

  r.kind = BettingCase::witness;
  r.witness = w;
  r.gain = -r.stake;  // the phase-1 pot is lost on w
  const auto cubes = boundary_subcubes(BitString(n, *w), params.block_size(n), params.free_bits(n));
  if (cubes.empty()) return r;
  const Capital share = r.stake / static_cast<long long>(cubes.size());
  for (const auto& c : cubes) {
    auto p = predict_pot(slice, c, *w, share);
    r.gain += p.final - p.initial;
    r.pots.push_back(std::move(p));
  }
  return r;
}

}  // namespace dnfw
