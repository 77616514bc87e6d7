#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "dnfw/bits.hpp"

using namespace dnfw;

namespace {

// s_0, s_1, ... built by appending characters, without integer arithmetic.
std::vector<std::string> enumerate_strings(int max_len) {
  std::vector<std::string> out{""};
  std::vector<std::string> level{""};
  for (int n = 1; n <= max_len; ++n) {
    std::vector<std::string> next;
    for (const auto& s : level) next.push_back(s + "0");
    for (const auto& s : level) next.push_back(s + "1");
    std::sort(next.begin(), next.end());
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

}  // namespace

TEST(GlobalIndex, EnumerationExamples) {
  EXPECT_EQ(global_index(BitString::parse("")), 0U);
  EXPECT_EQ(global_index(BitString::parse("0")), 1U);
  EXPECT_EQ(global_index(BitString::parse("1")), 2U);
  EXPECT_EQ(global_index(BitString::parse("00")), 3U);
  EXPECT_EQ(global_index(BitString::parse("1111")), 30U);
}

TEST(GlobalIndex, MatchesListEnumeration) {
  const auto list = enumerate_strings(10);
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto x = BitString::parse(list[i]);
    ASSERT_EQ(global_index(x), i) << list[i];
    ASSERT_EQ(string_at(i).str(), list[i]);
  }
}

TEST(GlobalIndex, OrderWithinLengthIsNumeric) {
  for (int n = 1; n <= 8; ++n)
    for (std::uint64_t a = 0; a < (1U << n); ++a)
      for (std::uint64_t b = 0; b < (1U << n); b += 7) {
        const BitString x(n, a), y(n, b);
        ASSERT_EQ(global_index(x) < global_index(y), a < b);
        ASSERT_EQ(x < y, a < b);
      }
}

TEST(GlobalIndex, Segments) {
  for (int n = 0; n <= 20; ++n) {
    EXPECT_EQ(segment_start(n), global_index(BitString(n, 0)));
    EXPECT_EQ(segment_end(n), global_index(BitString(n, low_mask(n))));
    EXPECT_EQ(length_at(segment_start(n)), n);
    EXPECT_EQ(length_at(segment_end(n)), n);
  }
}

TEST(BitString, PositionOneIsMostSignificant) {
  const auto x = BitString::parse("1000");
  EXPECT_EQ(x.value(), 8U);
  EXPECT_TRUE(x.at(1));
  EXPECT_FALSE(x.at(4));
  EXPECT_THROW(x.at(0), std::out_of_range);
  EXPECT_THROW(x.at(5), std::out_of_range);
}

TEST(BitString, ParseRejectsJunk) {
  EXPECT_THROW(BitString::parse("0120"), std::invalid_argument);
  EXPECT_THROW(BitString(3, 8), std::invalid_argument);
  EXPECT_THROW(BitString(65, 0), std::invalid_argument);
}

TEST(BitString, RoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const int n = static_cast<int>(rng() % 40);
    const BitString x(n, rng() & low_mask(n));
    EXPECT_EQ(BitString::parse(x.str()), x);
  }
}

TEST(Combinations, LexicographicAndComplete) {
  const std::vector<int> items{1, 2, 3, 4, 5};
  std::vector<std::vector<int>> seen;
  for_each_combination(items, 3, [&](const std::vector<int>& c) {
    seen.push_back(c);
    return false;
  });
  ASSERT_EQ(seen.size(), binomial(5, 3));
  EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
  EXPECT_EQ(std::set<std::vector<int>>(seen.begin(), seen.end()).size(), seen.size());
  EXPECT_EQ(seen.front(), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(seen.back(), (std::vector<int>{3, 4, 5}));
}

TEST(Combinations, EdgeCases) {
  int calls = 0;
  for_each_combination({}, 0, [&](const std::vector<int>& c) {
    EXPECT_TRUE(c.empty());
    ++calls;
    return false;
  });
  EXPECT_EQ(calls, 1);
  EXPECT_FALSE(for_each_combination({1, 2}, 3, [](const std::vector<int>&) { return true; }));
  EXPECT_TRUE(for_each_combination({1, 2, 3}, 2, [](const std::vector<int>& c) { return c[1] == 3; }));
}

TEST(Binomial, PascalRows) {
  for (int n = 1; n <= 40; ++n)
    for (int k = 1; k < n; ++k) ASSERT_EQ(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
  EXPECT_EQ(binomial(4, 2), 6U);
  EXPECT_EQ(binomial(8, 6), 28U);
  EXPECT_EQ(binomial(3, 5), 0U);
}

TEST(Submasks, AscendingAndComplete) {
  const std::uint64_t mask = 0b101101;
  std::vector<std::uint64_t> seen;
  for_each_submask(mask, [&](std::uint64_t s) {
    seen.push_back(s);
    return true;
  });
  ASSERT_EQ(seen.size(), 16U);
  EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
  for (auto s : seen) EXPECT_EQ(s & ~mask, 0U);
}

TEST(Positions, MaskRoundTrip) {
  const std::vector<int> pos{1, 3, 4};
  const auto m = positions_mask(4, pos);
  EXPECT_EQ(m, 0b1011U);
  EXPECT_EQ(mask_positions(4, m), pos);
}
