#pragma once

// Boolean functions as truth tables, terms/subcubes, DNF formulas and
// per-length language models, with the plain-text table/language formats.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dnfw/bits.hpp"

namespace dnfw {

inline constexpr int kMaxTableArity = 24;

/// f : {0,1}^n -> {0,1}, entry v is f on the n-bit string with value v.
class TruthTable {
 public:
  TruthTable() : TruthTable(0) {}

  explicit TruthTable(int arity) : arity_(arity) {
    if (arity < 0 || arity > kMaxTableArity)
      throw std::invalid_argument("TruthTable: arity must be in [0, 24]");
    words_.assign(word_count(), 0);
  }

  template <class Pred>
  static TruthTable from_predicate(int arity, Pred&& pred) {
    TruthTable t(arity);
    for (std::uint64_t v = 0; v < t.size(); ++v)
      if (pred(v)) t.set(v, true);
    return t;
  }

  static TruthTable constant(int arity, bool value) {
    TruthTable t(arity);
    if (value)
      for (std::uint64_t v = 0; v < t.size(); ++v) t.set(v, true);
    return t;
  }

  /// Parses a string of 2^n '0'/'1' characters.
  static TruthTable from_bits(int arity, std::string_view bits) {
    TruthTable t(arity);
    if (bits.size() != t.size())
      throw std::invalid_argument("TruthTable: expected " + std::to_string(t.size()) +
                                  " bits, got " + std::to_string(bits.size()));
    for (std::uint64_t v = 0; v < t.size(); ++v) {
      const char c = bits[v];
      if (c != '0' && c != '1') throw std::invalid_argument("TruthTable: expected only '0'/'1'");
      if (c == '1') t.set(v, true);
    }
    return t;
  }

  int arity() const noexcept { return arity_; }
  std::uint64_t size() const noexcept { return std::uint64_t{1} << arity_; }

  bool operator[](std::uint64_t v) const noexcept { return (words_[v >> 6] >> (v & 63)) & 1U; }

  bool operator()(const BitString& x) const {
    if (x.length() != arity_) throw std::invalid_argument("TruthTable: input length mismatch");
    return (*this)[x.value()];
  }

  void set(std::uint64_t v, bool value) {
    const std::uint64_t bit = std::uint64_t{1} << (v & 63);
    if (value)
      words_[v >> 6] |= bit;
    else
      words_[v >> 6] &= ~bit;
  }

  std::uint64_t count_ones() const noexcept {
    std::uint64_t c = 0;
    for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }

  bool is_constant_zero() const noexcept { return count_ones() == 0; }
  bool is_constant_one() const noexcept { return count_ones() == size(); }
  bool is_constant() const noexcept {
    const auto c = count_ones();
    return c == 0 || c == size();
  }

  std::vector<std::uint64_t> true_points() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t v = 0; v < size(); ++v)
      if ((*this)[v]) out.push_back(v);
    return out;
  }

  /// Fixes 1-based position `pos` to `value`, giving an arity-(n-1) table.
  TruthTable restrict(int pos, bool value) const {
    if (pos < 1 || pos > arity_) throw std::out_of_range("TruthTable::restrict");
    TruthTable r(arity_ - 1);
    const int bit = position_bit(arity_, pos);
    const std::uint64_t lo = low_mask(bit);
    for (std::uint64_t u = 0; u < r.size(); ++u) {
      const std::uint64_t v = ((u & ~lo) << 1) | (static_cast<std::uint64_t>(value) << bit) | (u & lo);
      r.set(u, (*this)[v]);
    }
    return r;
  }

  std::string bits() const {
    std::string s(size(), '0');
    for (std::uint64_t v = 0; v < size(); ++v)
      if ((*this)[v]) s[v] = '1';
    return s;
  }

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  std::size_t word_count() const { return static_cast<std::size_t>((size() + 63) / 64); }

  int arity_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Conjunction of literals over n variables. `fixed_mask` marks the fixed
/// positions (as integer bits); `fixed_values` gives their required values.
class Term {
 public:
  Term() = default;

  Term(int arity, std::uint64_t fixed_mask, std::uint64_t fixed_values)
      : arity_(arity), mask_(fixed_mask), values_(fixed_values & fixed_mask) {
    if (arity < 0 || arity > kMaxStringLength) throw std::invalid_argument("Term: arity out of range");
    if ((fixed_mask & ~low_mask(arity)) != 0) throw std::invalid_argument("Term: mask exceeds arity");
  }

  static Term empty(int arity) { return Term(arity, 0, 0); }

  /// The full-assignment term that covers exactly x.
  static Term point(const BitString& x) { return Term(x.length(), low_mask(x.length()), x.value()); }

  /// Builds a term from (position, value) literals; position is 1-based.
  static Term from_literals(int arity, const std::vector<std::pair<int, bool>>& literals) {
    std::uint64_t m = 0, v = 0;
    for (auto [pos, val] : literals) {
      if (pos < 1 || pos > arity) throw std::invalid_argument("Term: literal position out of range");
      const auto bit = position_mask(arity, pos);
      if ((m & bit) && (((v & bit) != 0) != val))
        throw std::invalid_argument("Term: variable appears with both signs");
      m |= bit;
      if (val) v |= bit;
    }
    return Term(arity, m, v);
  }

  int arity() const noexcept { return arity_; }
  std::uint64_t fixed_mask() const noexcept { return mask_; }
  std::uint64_t fixed_values() const noexcept { return values_; }
  std::uint64_t free_mask() const noexcept { return ~mask_ & low_mask(arity_); }
  int width() const noexcept { return std::popcount(mask_); }

  bool covers_value(std::uint64_t v) const noexcept { return (v & mask_) == values_; }

  bool covers(const BitString& x) const {
    if (x.length() != arity_) throw std::invalid_argument("Term::covers: length mismatch");
    return covers_value(x.value());
  }

  /// Literal text, e.g. "x1 x3 ~x4"; the empty term prints as "1".
  std::string str() const {
    std::string s;
    for (int p = 1; p <= arity_; ++p) {
      const auto bit = position_mask(arity_, p);
      if (!(mask_ & bit)) continue;
      if (!s.empty()) s += ' ';
      if (!(values_ & bit)) s += '~';
      s += 'x' + std::to_string(p);
    }
    return s.empty() ? std::string("1") : s;
  }

  friend bool operator==(const Term&, const Term&) = default;

 private:
  int arity_ = 0;
  std::uint64_t mask_ = 0;
  std::uint64_t values_ = 0;
};

/// Axis-aligned subcube of {0,1}^n; shares the Term encoding.
class Subcube {
 public:
  Subcube() = default;
  Subcube(int ambient, std::uint64_t fixed_mask, std::uint64_t fixed_values)
      : term_(ambient, fixed_mask, fixed_values) {}
  explicit Subcube(const Term& t) : term_(t) {}

  int ambient() const noexcept { return term_.arity(); }
  std::uint64_t fixed_mask() const noexcept { return term_.fixed_mask(); }
  std::uint64_t fixed_values() const noexcept { return term_.fixed_values(); }
  std::uint64_t free_mask() const noexcept { return term_.free_mask(); }
  int dimension() const noexcept { return ambient() - term_.width(); }
  std::uint64_t cardinality() const noexcept { return std::uint64_t{1} << dimension(); }
  bool contains_value(std::uint64_t v) const noexcept { return term_.covers_value(v); }
  bool contains(const BitString& x) const { return term_.covers(x); }
  const Term& term() const noexcept { return term_; }

  /// Calls fn(v) for each member value in increasing order; stops if fn returns false.
  template <class Fn>
  bool for_each_member(Fn&& fn) const {
    const auto base = fixed_values();
    return for_each_submask(free_mask(), [&](std::uint64_t s) { return fn(base | s); });
  }

  std::vector<std::uint64_t> members() const {
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(cardinality()));
    for_each_member([&](std::uint64_t v) {
      out.push_back(v);
      return true;
    });
    return out;
  }

  friend bool operator==(const Subcube&, const Subcube&) = default;

 private:
  Term term_;
};

inline Subcube term_subcube(const Term& t) { return Subcube(t); }

inline bool term_covers(const Term& t, const BitString& x) { return t.covers(x); }

/// True iff every string covered by t is a true point of f.
inline bool is_implicant(const Term& t, const TruthTable& f) {
  if (t.arity() != f.arity()) throw std::invalid_argument("is_implicant: arity mismatch");
  return Subcube(t).for_each_member([&](std::uint64_t v) { return f[v]; });
}

/// OR of terms; the empty DNF is constant 0.
struct Dnf {
  int arity = 0;
  std::vector<Term> terms;

  int width() const noexcept {
    int w = 0;
    for (const auto& t : terms) w = std::max(w, t.width());
    return w;
  }

  bool eval_value(std::uint64_t v) const noexcept {
    for (const auto& t : terms)
      if (t.covers_value(v)) return true;
    return false;
  }

  bool eval(const BitString& x) const {
    if (x.length() != arity) throw std::invalid_argument("Dnf::eval: length mismatch");
    return eval_value(x.value());
  }

  TruthTable table() const {
    return TruthTable::from_predicate(arity, [&](std::uint64_t v) { return eval_value(v); });
  }
};

inline bool eval_dnf(const Dnf& d, const BitString& x) { return d.eval(x); }

// --- language models -----------------------------------------------------

/// Per-length family of truth tables; absent lengths are empty slices.
class LanguageModel {
 public:
  LanguageModel() = default;
  explicit LanguageModel(std::string provenance) : provenance_(std::move(provenance)) {}

  void set_slice(TruthTable slice) {
    const int n = slice.arity();
    slices_.insert_or_assign(n, std::move(slice));
  }

  const TruthTable* slice(int n) const {
    auto it = slices_.find(n);
    return it == slices_.end() ? nullptr : &it->second;
  }

  /// The slice at length n, materializing the empty slice when absent.
  TruthTable slice_or_empty(int n) const {
    if (const auto* s = slice(n)) return *s;
    return TruthTable(n);
  }

  const std::map<int, TruthTable>& slices() const noexcept { return slices_; }

  bool contains(const BitString& x) const {
    const auto* s = slice(x.length());
    return s != nullptr && (*s)[x.value()];
  }

  /// χ_L[i].
  bool bit(std::uint64_t global) const {
    const int n = length_at(global);
    const auto* s = slice(n);
    return s != nullptr && (*s)[global - segment_start(n)];
  }

  /// χ_L[0 .. count-1].
  std::vector<std::uint8_t> characteristic_prefix(std::uint64_t count) const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(count), 0);
    for (const auto& [n, t] : slices_) {
      const auto start = segment_start(n);
      for (std::uint64_t v = 0; v < t.size() && start + v < count; ++v)
        out[static_cast<std::size_t>(start + v)] = t[v] ? 1 : 0;
    }
    return out;
  }

  int max_length() const noexcept { return slices_.empty() ? -1 : slices_.rbegin()->first; }

  const std::string& provenance() const noexcept { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  friend bool operator==(const LanguageModel& a, const LanguageModel& b) { return a.slices_ == b.slices_; }

 private:
  std::map<int, TruthTable> slices_;
  std::string provenance_;
};

// --- text formats --------------------------------------------------------
//
//   n=<arity>
//   <2^n characters of 0/1>
//
// A language file is a sequence of such blocks separated by blank lines with
// strictly increasing arities.

inline void write_table(std::ostream& os, const TruthTable& t) {
  os << "n=" << t.arity() << '\n' << t.bits() << '\n';
}

inline std::string table_to_string(const TruthTable& t) {
  std::ostringstream os;
  write_table(os, t);
  return os.str();
}

namespace detail {

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

inline int parse_arity_line(const std::string& line) {
  if (line.size() < 3 || line.compare(0, 2, "n=") != 0)
    throw std::invalid_argument("expected 'n=<arity>', got '" + line + "'");
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(line.substr(2), &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad arity line '" + line + "'");
  }
  if (used != line.size() - 2) throw std::invalid_argument("bad arity line '" + line + "'");
  return n;
}

}  // namespace detail

inline std::vector<TruthTable> read_table_blocks(std::istream& is) {
  std::vector<TruthTable> out;
  std::string line;
  std::optional<int> pending;
  while (std::getline(is, line)) {
    line = detail::strip_cr(line);
    if (!pending) {
      if (line.empty()) continue;
      pending = detail::parse_arity_line(line);
    } else {
      out.push_back(TruthTable::from_bits(*pending, line));
      pending.reset();
    }
  }
  if (pending) {
    // arity 0 with a missing bit line is still malformed
    throw std::invalid_argument("truncated table block for n=" + std::to_string(*pending));
  }
  return out;
}

inline TruthTable read_table(std::istream& is) {
  auto blocks = read_table_blocks(is);
  if (blocks.size() != 1) throw std::invalid_argument("expected exactly one truth table");
  return std::move(blocks.front());
}

inline TruthTable parse_table(const std::string& text) {
  std::istringstream is(text);
  return read_table(is);
}

inline void write_language(std::ostream& os, const LanguageModel& lang) {
  bool first = true;
  for (const auto& [n, t] : lang.slices()) {
    if (!first) os << '\n';
    first = false;
    write_table(os, t);
  }
}

inline LanguageModel read_language(std::istream& is, std::string provenance = "file") {
  LanguageModel lang(std::move(provenance));
  int last = -1;
  for (auto& t : read_table_blocks(is)) {
    if (t.arity() <= last) throw std::invalid_argument("language file: lengths must be strictly increasing");
    last = t.arity();
    lang.set_slice(std::move(t));
  }
  return lang;
}

}  // namespace dnfw
