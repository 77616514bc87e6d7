#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "dnfw/langgen.hpp"
#include "dnfw/self_check.hpp"
#include "dnfw/width.hpp"
#include "dnfw/width_bettor.hpp"

using namespace dnfw;

namespace {

int block_of(int pos, int b) { return (pos - 1) / b; }

// Subcubes through w with free positions a k-subset of one block, found by
// scanning every k-subset of all n positions.
std::set<std::pair<std::uint64_t, std::uint64_t>> brute_boundary(const BitString& w, int b, int k) {
  const int n = w.length();
  std::set<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t free = 0; free <= low_mask(n); ++free) {
    if (std::popcount(free) != k) continue;
    std::set<int> blocks;
    for (int p : mask_positions(n, free)) blocks.insert(block_of(p, b));
    const int blk = *blocks.begin();
    const int size = std::min(b, n - blk * b);
    if (blocks.size() != 1 || size < k) continue;
    const auto fixed = low_mask(n) & ~free;
    out.insert({fixed, w.value() & fixed});
  }
  return out;
}

// y is in a boundary subcube of v iff y and v differ in at most k positions,
// all inside one block of size >= k.
bool brute_in_bet_set(int n, int b, int k, std::uint64_t y) {
  for (std::uint64_t v = 0; v < static_cast<std::uint64_t>(n); ++v) {
    if (y == v) return true;
    const auto diff = mask_positions(n, y ^ v);
    if (static_cast<int>(diff.size()) > k) continue;
    const int blk = block_of(diff.front(), b);
    const int size = std::min(b, n - blk * b);
    if (size < k) continue;
    if (std::all_of(diff.begin(), diff.end(), [&](int p) { return block_of(p, b) == blk; })) return true;
  }
  return false;
}

LanguageModel with_slice(TruthTable t) {
  LanguageModel lang;
  lang.set_slice(std::move(t));
  return lang;
}

Capital run_gain(const LanguageModel& lang, int n, const BettorParams& params, WidthBettor* out = nullptr) {
  WidthBettor s(params);
  const auto t = run(s, lang, n);
  if (out != nullptr) *out = s;
  return t.segment(n)->gain();
}

}  // namespace

TEST(Params, Presets) {
  const auto pd = BettorParams::paper_default();
  EXPECT_EQ(pd.min_length, 3);
  EXPECT_EQ(pd.block_size(16), 4);
  EXPECT_EQ(pd.free_bits(16), 4);
  EXPECT_EQ(pd.block_size(256), 8);
  EXPECT_EQ(pd.free_bits(256), 6);
  EXPECT_EQ(pd.free_bits(2), 0);
  EXPECT_FALSE(pd.active(2));
  EXPECT_EQ(pd.stake(8), Capital(1, 64));
  EXPECT_EQ(pd.initial_capital, 4);

  const auto desk = BettorParams::desk();
  EXPECT_EQ(desk.min_length, 4);
  EXPECT_EQ(desk.block_size(100), 4);
  EXPECT_EQ(desk.free_bits(100), 2);
  EXPECT_THROW(BettorParams::fixed(2, 3, std::nullopt), std::invalid_argument);
}

TEST(Params, FloorsMatchFloatingPointReference) {
  for (int n = 3; n <= 70000; n += (n < 300 ? 1 : 37)) {
    EXPECT_EQ(floor_lg(n), static_cast<int>(std::floor(std::log2(static_cast<double>(n)) + 1e-9)));
    const double lglg = 2 * std::log2(std::log2(static_cast<double>(n)));
    EXPECT_EQ(floor_two_lglg(n), static_cast<int>(std::floor(lglg + 1e-9))) << n;
  }
}

TEST(Params, StakeBudgetFitsInitialCapital) {
  for (const auto& p : {BettorParams::paper_default(), BettorParams::desk()}) {
    Capital risked = 0;
    for (int n = p.min_length; n <= 64; ++n)
      if (p.active(n)) risked += 2 * p.stake(n);
    EXPECT_LT(risked, p.initial_capital);
  }
}

TEST(PartitionBlocks, Examples) {
  using B = BlockRange;
  EXPECT_EQ(partition_blocks(16, 4), (std::vector<B>{{1, 4}, {5, 8}, {9, 12}, {13, 16}}));
  EXPECT_EQ(partition_blocks(10, 4), (std::vector<B>{{1, 4}, {5, 8}, {9, 10}}));
  EXPECT_EQ(partition_blocks(4, 4), (std::vector<B>{{1, 4}}));
  EXPECT_THROW(partition_blocks(3, 4), std::invalid_argument);
}

TEST(PartitionBlocks, CoverDisjointly) {
  for (int n = 1; n <= 40; ++n)
    for (int b = 1; b <= n; ++b) {
      std::vector<int> owner(static_cast<std::size_t>(n) + 1, 0);
      for (const auto& r : partition_blocks(n, b)) {
        EXPECT_LE(r.size(), b);
        for (int p = r.first; p <= r.last; ++p) ++owner[static_cast<std::size_t>(p)];
      }
      for (int p = 1; p <= n; ++p) ASSERT_EQ(owner[static_cast<std::size_t>(p)], 1);
      const auto blocks = partition_blocks(n, b);
      EXPECT_EQ(blocks.back().size(), n % b == 0 ? b : n % b);
    }
}

TEST(BoundarySubcubes, Counts) {
  EXPECT_EQ(boundary_subcube_count(16, 4, 2), 24U);
  EXPECT_EQ(boundary_subcube_count(256, 8, 6), 896U);
  EXPECT_EQ(boundary_subcube_count(256, 8, 6), (256U / 8) * binomial(8, 6));
  EXPECT_EQ(boundary_subcube_count(64, 6, 3), 10 * binomial(6, 3) + binomial(4, 3));
  EXPECT_EQ(boundary_subcube_count(64, 6, 3), 204U);
  std::mt19937_64 rng(1);
  EXPECT_EQ(boundary_subcubes(BitString(16, rng() & 0xFFFF), 4, 2).size(), 24U);
  EXPECT_EQ(boundary_subcubes(BitString(64, rng()), 6, 3).size(), 204U);
}

TEST(BoundarySubcubes, MatchBruteForceEnumeration) {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 14; ++n)
    for (int b = 1; b <= n; ++b)
      for (int k = 1; k <= b; ++k) {
        const BitString w(n, rng() & low_mask(n));
        const auto cubes = boundary_subcubes(w, b, k);
        std::set<std::pair<std::uint64_t, std::uint64_t>> got;
        for (const auto& c : cubes) {
          ASSERT_TRUE(c.contains(w));
          ASSERT_EQ(c.dimension(), k);
          got.insert({c.fixed_mask(), c.fixed_values()});
        }
        ASSERT_EQ(got.size(), cubes.size());
        ASSERT_EQ(got, brute_boundary(w, b, k));
        ASSERT_EQ(cubes.size(), boundary_subcube_count(n, b, k));
      }
}

TEST(BoundarySubcubes, BlockMajorOrder) {
  const auto cubes = boundary_subcubes(BitString(8, 0), 4, 2);
  ASSERT_EQ(cubes.size(), 12U);
  EXPECT_EQ(mask_positions(8, cubes[0].free_mask()), (std::vector<int>{1, 2}));
  EXPECT_EQ(mask_positions(8, cubes[5].free_mask()), (std::vector<int>{3, 4}));
  EXPECT_EQ(mask_positions(8, cubes[6].free_mask()), (std::vector<int>{5, 6}));
}

TEST(Pigeonhole, RandomFreeSetsOfSizeEight) {
  const auto blocks = partition_blocks(16, 4);
  std::mt19937_64 rng(3);
  std::vector<int> all(16);
  std::iota(all.begin(), all.end(), 1);
  for (int i = 0; i < 1000; ++i) {
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> free(all.begin(), all.begin() + 8);
    const auto blk = pigeonhole_block(free, blocks, 2);
    ASSERT_TRUE(blk);
    int hits = 0;
    for (int p : free) hits += blocks[*blk].contains(p);
    ASSERT_GE(hits, 2);
    for (std::size_t j = 0; j < *blk; ++j) {
      int earlier = 0;
      for (int p : free) earlier += blocks[j].contains(p);
      ASSERT_LT(earlier, 2);
    }
  }
}

TEST(Pigeonhole, Examples) {
  const auto blocks = partition_blocks(16, 4);
  EXPECT_EQ(pigeonhole_block({9, 10, 11, 12}, blocks, 2), 2U);
  EXPECT_EQ(pigeonhole_block({1, 5, 6, 9, 10, 13, 14}, blocks, 2), 1U);
  EXPECT_FALSE(pigeonhole_block({1, 5, 9, 13}, blocks, 2));
}

TEST(BetSet, DeskAtSixteen) {
  const auto p = BettorParams::desk();
  const auto s = bet_set(16, p);
  EXPECT_EQ(bet_set_bound(16, 4, 2), 1552U);
  EXPECT_LE(s.size(), 1552U);
  std::size_t brute = 0;
  for (std::uint64_t y = 0; y < 65536; ++y) {
    const bool in = brute_in_bet_set(16, 4, 2, y);
    brute += in;
    ASSERT_EQ(s.contains_value(y), in) << y;
  }
  EXPECT_EQ(s.size(), brute);
}

TEST(BetSet, InactiveLengthIsEmpty) {
  EXPECT_EQ(bet_set(2, BettorParams::paper_default()).size(), 0U);
  EXPECT_EQ(bet_set(3, BettorParams::desk()).size(), 0U);
}

TEST(BetSet, MatchesBruteForceOnSmallLengths) {
  for (int n = 3; n <= 13; ++n)
    for (const auto& p : {BettorParams::paper_default(), BettorParams::desk(), BettorParams::fixed(3, 1, std::nullopt)}) {
      if (!p.active(n)) continue;
      const auto s = bet_set(n, p);
      for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y)
        ASSERT_EQ(s.contains_value(y), brute_in_bet_set(n, p.block_size(n), p.free_bits(n), y)) << n << ' ' << y;
      EXPECT_LE(s.size(), bet_set_bound(n, p.block_size(n), p.free_bits(n)));
    }
}

TEST(BetSet, EveryTargetLiesInBetSet) {
  std::mt19937_64 rng(4);
  std::map<int, BetSet> sets;
  for (int trial = 0; trial < 100; ++trial) {
    const bool desk = trial % 2 == 0;
    const auto params = desk ? BettorParams::desk() : BettorParams::paper_default();
    LanguageModel lang;
    for (int n = 0; n <= 10; ++n) lang.set_slice(mixed_slice(n, params, rng));
    WidthBettor s(params);
    const auto t = run(s, lang, 10);
    for (const auto& st : t.steps) {
      if (!st.bet) continue;
      const int key = st.length * 2 + (desk ? 1 : 0);
      if (!sets.count(key)) sets.emplace(key, bet_set(st.length, params));
      ASSERT_TRUE(sets.at(key).contains_value(st.index - segment_start(st.length)));
    }
  }
}

TEST(Phase1, EmptySliceAtFour) {
  WidthBettor s(BettorParams::desk());
  const auto lang = gen_empty_slice(4);
  const auto t = run(s, lang, 4);
  const auto* st = s.state(4);
  ASSERT_NE(st, nullptr);
  EXPECT_EQ(st->phase1_pot, 1);
  EXPECT_EQ(st->phase1_correct, 4);
  EXPECT_FALSE(st->witness);
  EXPECT_EQ(t.segment(4)->gain(), Capital(15, 16));
  // bets only on 0000..0011
  int bets = 0;
  for (const auto& step : t.steps)
    if (step.length == 4 && step.bet) {
      ++bets;
      EXPECT_EQ(step.bet->side, Side::out);
    }
  EXPECT_EQ(bets, 4);
}

TEST(Phase1, CaseOneGainOnRandomTails) {
  std::mt19937_64 rng(5);
  for (int n = 4; n <= 12; ++n) {
    auto t = random_table(n, 0.5, rng());
    for (std::uint64_t v = 0; v < static_cast<std::uint64_t>(n); ++v) t.set(v, false);
    const auto gain = run_gain(with_slice(t), n, BettorParams::desk());
    EXPECT_EQ(gain, Capital((boost::multiprecision::cpp_int(1) << n) - 1) / (n * n));
    EXPECT_EQ(predict_length(t, BettorParams::desk()).kind, BettingCase::all_absent);
  }
}

TEST(Phase1, WitnessIsFirstMemberAmongFirstN) {
  auto t = TruthTable(8);
  t.set(5, true);
  t.set(6, true);
  WidthBettor s(BettorParams::desk());
  const auto tr = run(s, with_slice(t), 8);
  EXPECT_EQ(s.state(8)->witness, 5U);
  EXPECT_EQ(s.state(8)->pots.size(), boundary_subcube_count(8, 4, 2));
  EXPECT_EQ(s.state(8)->pots.front().initial, Capital(1, 64 * 12));
  EXPECT_EQ(tr.segment(8)->gain(), predict_length(t, BettorParams::desk()).gain);
}

TEST(Phase2, PlantedSubcubeGrowsByEight) {
  for (std::uint64_t v : {0U, 1U, 3U, 7U}) {
    const auto inst = gen_theorem_case2(16, 4, 2, v, 100 + v);
    WidthBettor s(BettorParams::desk());
    run(s, inst.language, 16);
    const auto* st = s.state(16);
    ASSERT_TRUE(st->witness);
    EXPECT_EQ(*st->witness, v);
    bool found = false;
    for (const auto& pot : st->pots)
      if (pot.cube == inst.winning) {
        found = true;
        EXPECT_EQ(pot.pot / pot.initial, 8);
        EXPECT_EQ(pot.wins, 3);
      }
    EXPECT_TRUE(found);
  }
}

TEST(Phase2, PlantedHoleLosesAtMostThePot) {
  std::mt19937_64 rng(6);
  for (std::uint64_t v : {0U, 2U, 5U}) {
    const auto inst = gen_theorem_case2(16, 4, 2, v, 7);
    auto slice = inst.language.slice_or_empty(16);
    const auto members = inst.winning.members();
    std::vector<std::uint64_t> after;
    for (auto y : members)
      if (y > v) after.push_back(y);
    for (auto hole : after) {
      auto holed = slice;
      holed.set(hole, false);
      WidthBettor s(BettorParams::desk());
      const auto tr = run(s, with_slice(holed), 16);
      for (const auto& pot : s.state(16)->pots) {
        if (!(pot.cube == inst.winning)) continue;
        // the pot wagers on the hole itself and loses exactly what it held
        EXPECT_EQ(pot.pot, 0);
        EXPECT_FALSE(pot.alive);
        EXPECT_GE(pot.pot - pot.initial, -pot.initial);
      }
      EXPECT_EQ(tr.segment(16)->gain(), predict_length(holed, BettorParams::desk()).gain);
    }
  }
}

TEST(Phase2, BetsAggregateAcrossContainingPots) {
  const auto inst = gen_theorem_case2(12, 4, 2, 0, 9, false, false);
  WidthBettor s(BettorParams::desk());
  const auto tr = run(s, inst.language, 12);
  const auto* st = s.state(12);
  for (const auto& step : tr.steps) {
    if (step.length != 12 || !step.bet || step.bet->side != Side::in) continue;
    EXPECT_GT(step.bet->stake, 0);
    EXPECT_LE(step.bet->stake, 2 * st->stake * 8);
  }
}

TEST(Predictor, MatchesSimulationOnMixedLanguages) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const auto params = trial % 3 == 0 ? BettorParams::paper_default() : BettorParams::desk();
    LanguageModel lang;
    for (int n = 0; n <= 11; ++n) lang.set_slice(mixed_slice(n, params, rng));
    WidthBettor s(params);
    const auto tr = run(s, lang, 11);
    for (int n = 0; n <= 11; ++n) {
      const auto pred = predict_length(lang.slice_or_empty(n), params);
      ASSERT_EQ(pred.gain, tr.segment(n)->gain()) << "trial " << trial << " n " << n;
      const auto* st = s.state(n);
      if (pred.kind == BettingCase::witness) {
        ASSERT_EQ(pred.witness, st->witness);
        ASSERT_EQ(pred.pots.size(), st->pots.size());
        for (std::size_t j = 0; j < st->pots.size(); ++j) ASSERT_EQ(pred.pots[j].final, st->pots[j].pot);
      }
    }
  }
}

TEST(Predictor, ContainedSubcubesNeverStraddleTheWitness) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 9);
    const auto params = BettorParams::desk();
    const auto slice = mixed_slice(n, params, rng);
    const auto pred = predict_length(slice, params);
    for (const auto& p : pred.pots)
      if (p.contained) {
        EXPECT_EQ(p.members_after_witness, (1 << params.free_bits(n)) - 1);
        EXPECT_EQ(p.final, p.initial * (std::int64_t{1} << ((1 << params.free_bits(n)) - 1)));
      }
  }
}

TEST(Predictor, FinalBlockVariantKeepsFullFactorOrStaysIdle) {
  for (std::uint64_t v : {0U, 1U, 4U, 8U, 10U}) {
    Case2Instance inst;
    try {
      inst = gen_theorem_case2(14, 4, 2, v, 11, true);
    } catch (const std::invalid_argument&) {
      continue;
    }
    const auto slice = inst.language.slice_or_empty(14);
    const auto pred = predict_length(slice, BettorParams::desk());
    for (const auto& p : pred.pots) {
      if (!(p.cube == inst.winning)) continue;
      int below = 0;
      for (auto y : p.cube.members()) below += y < v;
      EXPECT_EQ(p.members_after_witness, 3 - below);
      if (below > 0) EXPECT_EQ(p.final, p.initial);  // verification rejects the absent low members
      else EXPECT_EQ(p.final, 8 * p.initial);
    }
  }
}

TEST(NarrowSlices, YieldAContainedBoundarySubcube) {
  std::mt19937_64 rng(9);
  const int n = 12, b = 4, k = 2;
  const auto blocks = partition_blocks(n, b);
  const int bound = n - static_cast<int>(blocks.size()) * k;
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    TruthTable t(n);
    const int terms = 1 + static_cast<int>(rng() % 4);
    for (int j = 0; j < terms; ++j) {
      std::uint64_t mask = 0;
      while (std::popcount(mask) < bound) mask |= position_mask(n, 1 + static_cast<int>(rng() % n));
      const std::uint64_t anchor = j == 0 ? rng() % n : rng();
      Subcube(n, mask, anchor).for_each_member([&](std::uint64_t y) {
        t.set(y, true);
        return true;
      });
    }
    const auto report = dnf_width(t);
    if (report.width > bound) continue;
    const auto pred = predict_length(t, BettorParams::desk());
    ASSERT_EQ(pred.kind, BettingCase::witness);
    const auto& term = report.witness_terms.at(*pred.witness);
    const auto free = mask_positions(n, term.free_mask());
    ASSERT_GE(static_cast<int>(free.size()), static_cast<int>(blocks.size()) * k);
    const auto blk = pigeonhole_block(free, blocks, k);
    ASSERT_TRUE(blk);
    bool contained = false;
    for (const auto& p : pred.pots) contained = contained || p.contained;
    EXPECT_TRUE(contained);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(LossBound, CapitalNeverDropsBelowReserve) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto params = trial % 2 ? BettorParams::paper_default() : BettorParams::desk();
    LanguageModel lang;
    for (int n = 0; n <= 10; ++n) lang.set_slice(mixed_slice(n, params, rng));
    WidthBettor s(params);
    const auto tr = run(s, lang, 10);
    Capital reserve = params.initial_capital;
    for (int n = 0; n <= 10; ++n)
      if (params.active(n)) reserve -= 2 * params.stake(n);
    for (const auto& seg : tr.segments) {
      const Capital risk = params.active(seg.length) ? 2 * params.stake(seg.length) : Capital(0);
      EXPECT_GE(seg.end - seg.start, -risk);
    }
    for (const auto& st : tr.steps) ASSERT_GE(st.capital, reserve);
  }
}

TEST(LossBound, DefaultPresetReserveIsPositive) {
  const double reserve = 4.0 - std::acos(-1.0) * std::acos(-1.0) / 3.0;
  EXPECT_GT(reserve, 0.7);
  Capital sum = 0;
  const auto p = BettorParams::paper_default();
  for (int n = 1; n <= 2000; ++n)
    if (p.active(n)) sum += 2 * p.stake(n);
  EXPECT_LT(sum, 4);
}

TEST(Averaging, BothPresetsOnSampledPrefixes) {
  for (const auto& p : {BettorParams::desk(), BettorParams::paper_default()}) {
    WidthBettor s(p);
    const auto r = check_averaging(s, sample_prefixes(120, 4, 10, p, 12));
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.checked, 120U);
  }
}

TEST(Strategy, ReplayOutOfOrderIsAContractViolation) {
  WidthBettor s(BettorParams::desk());
  const std::vector<std::uint8_t> bits(5, 0);
  EXPECT_THROW(s.next_bet(PrefixView(bits)), std::logic_error);
}
