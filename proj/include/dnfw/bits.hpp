#pragma once

// Binary strings in the standard (length-then-lexicographic) enumeration,
// plus the small combinatorial kernels the rest of the library shares.
//
// Position convention: positions are 1..n left to right and position 1 is
// the most significant bit of the integer value. Position p therefore lives
// at integer bit (n - p), which makes lexicographic order on equal-length
// strings coincide with numeric order.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dnfw {

inline constexpr int kMaxStringLength = 64;

/// Integer mask with the low n bits set (n in [0, 64]).
constexpr std::uint64_t low_mask(int n) noexcept {
  return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

/// Integer bit index of 1-based position `pos` in a length-n string.
constexpr int position_bit(int n, int pos) noexcept { return n - pos; }

constexpr std::uint64_t position_mask(int n, int pos) noexcept {
  return std::uint64_t{1} << position_bit(n, pos);
}

/// A binary string of length at most 64, stored as (length, value).
class BitString {
 public:
  BitString() = default;

  BitString(int length, std::uint64_t value) : length_(length), value_(value) {
    if (length < 0 || length > kMaxStringLength)
      throw std::invalid_argument("BitString: length out of range");
    if ((value & ~low_mask(length)) != 0)
      throw std::invalid_argument("BitString: value does not fit in length");
  }

  static BitString parse(std::string_view text) {
    if (text.size() > static_cast<std::size_t>(kMaxStringLength))
      throw std::invalid_argument("BitString: string too long");
    std::uint64_t v = 0;
    for (char c : text) {
      if (c != '0' && c != '1')
        throw std::invalid_argument("BitString: expected only '0'/'1'");
      v = (v << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return BitString(static_cast<int>(text.size()), v);
  }

  int length() const noexcept { return length_; }
  std::uint64_t value() const noexcept { return value_; }

  /// Bit at 1-based position `pos` (position 1 is leftmost).
  bool at(int pos) const {
    if (pos < 1 || pos > length_) throw std::out_of_range("BitString::at");
    return (value_ >> position_bit(length_, pos)) & 1U;
  }

  std::string str() const {
    std::string s(static_cast<std::size_t>(length_), '0');
    for (int p = 1; p <= length_; ++p)
      if ((value_ >> position_bit(length_, p)) & 1U) s[static_cast<std::size_t>(p - 1)] = '1';
    return s;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

  /// Standard enumeration order: shorter first, then by value.
  friend auto operator<=>(const BitString& a, const BitString& b) {
    if (auto c = a.length_ <=> b.length_; c != 0) return c;
    return a.value_ <=> b.value_;
  }

 private:
  int length_ = 0;
  std::uint64_t value_ = 0;
};

/// Index of x in the standard enumeration s_0 = λ, s_1 = 0, s_2 = 1, s_3 = 00, ...
/// Defined for |x| <= 62 so the result fits in 64 bits.
inline std::uint64_t global_index(const BitString& x) {
  if (x.length() > 62) throw std::out_of_range("global_index: length > 62");
  return (std::uint64_t{1} << x.length()) - 1 + x.value();
}

/// Length of s_i.
inline int length_at(std::uint64_t index) {
  return std::bit_width(index + 1) - 1;
}

/// First global index of the length-n segment.
inline std::uint64_t segment_start(int n) { return (std::uint64_t{1} << n) - 1; }

/// Last global index of the length-n segment.
inline std::uint64_t segment_end(int n) { return (std::uint64_t{1} << (n + 1)) - 2; }

inline BitString string_at(std::uint64_t index) {
  if (index >= (std::uint64_t{1} << 63) - 1) throw std::out_of_range("string_at");
  const int n = length_at(index);
  return BitString(n, index - segment_start(n));
}

// --- combinatorics -------------------------------------------------------

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

/// Calls fn(const std::vector<int>&) for every k-subset of `items` in
/// lexicographic order of index tuples (increasing combinatorial rank).
/// Stops early and returns true if fn returns true.
template <class Fn>
bool for_each_combination(const std::vector<int>& items, int k, Fn&& fn) {
  const int n = static_cast<int>(items.size());
  if (k < 0 || k > n) return false;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::vector<int> chosen(static_cast<std::size_t>(k));
  while (true) {
    for (int i = 0; i < k; ++i)
      chosen[static_cast<std::size_t>(i)] = items[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    if (fn(static_cast<const std::vector<int>&>(chosen))) return true;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

/// Calls fn(s) for every submask s of `mask`, including 0 and mask itself,
/// in increasing numeric order. Stops early if fn returns false.
template <class Fn>
bool for_each_submask(std::uint64_t mask, Fn&& fn) {
  std::uint64_t s = 0;
  while (true) {
    if (!fn(s)) return false;
    if (s == mask) return true;
    s = (s - mask) & mask;
  }
}

/// Mask of the given 1-based positions in a length-n string.
inline std::uint64_t positions_mask(int n, const std::vector<int>& positions) {
  std::uint64_t m = 0;
  for (int p : positions) m |= position_mask(n, p);
  return m;
}

/// 1-based positions set in `mask`, ascending.
inline std::vector<int> mask_positions(int n, std::uint64_t mask) {
  std::vector<int> out;
  for (int p = 1; p <= n; ++p)
    if (mask & position_mask(n, p)) out.push_back(p);
  return out;
}

}  // namespace dnfw
