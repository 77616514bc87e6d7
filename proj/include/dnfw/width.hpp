#pragma once

// Exact DNF width, an independent cover-based width oracle, and
// decision-tree depth.
//
// Width is computed point by point: for a true point x, the narrowest
// implicant through x fixes exactly the positions outside the largest
// monochromatic (all-true) subcube containing x. The DNF assembled from
// these per-point implicants covers f, so the maximum over true points is
// the DNF width.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnfw/bits.hpp"
#include "dnfw/boolfn.hpp"

namespace dnfw {

class unsupported_size : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ImplicantSearch {
  int dimension = 0;
  Term term;  ///< fixed positions = complement of the free set found
};

/// Largest d such that some dimension-d subcube through x lies inside
/// f^{-1}(1). Free-position sets are tried for d = n, n-1, ..., 0 and, within
/// a dimension, in increasing combinatorial rank; the first hit is the witness.
inline ImplicantSearch max_implicant_search(const TruthTable& f, std::uint64_t x) {
  const int n = f.arity();
  if (x >= f.size()) throw std::invalid_argument("max_implicant_dimension: point out of range");
  if (!f[x]) throw std::invalid_argument("max_implicant_dimension: f(x) = 0");

  std::vector<int> positions(static_cast<std::size_t>(n));
  for (int p = 1; p <= n; ++p) positions[static_cast<std::size_t>(p - 1)] = p;

  const std::uint64_t all = low_mask(n);
  for (int d = n; d >= 0; --d) {
    std::uint64_t found_free = 0;
    const bool hit = for_each_combination(positions, d, [&](const std::vector<int>& free_pos) {
      const std::uint64_t free = positions_mask(n, free_pos);
      const std::uint64_t base = x & ~free;
      const bool mono = for_each_submask(free, [&](std::uint64_t s) { return f[base | s]; });
      if (mono) found_free = free;
      return mono;
    });
    if (hit) return {d, Term(n, all & ~found_free, x)};
  }
  // d = 0 always succeeds because f(x) = 1.
  throw std::logic_error("max_implicant_search: unreachable");
}

inline int max_implicant_dimension(const TruthTable& f, const BitString& x) {
  if (x.length() != f.arity()) throw std::invalid_argument("max_implicant_dimension: length mismatch");
  return max_implicant_search(f, x.value()).dimension;
}

struct WidthReport {
  int width = 0;
  /// One minimum-width implicant per true point, keyed by point value.
  std::map<std::uint64_t, Term> witness_terms;
};

inline WidthReport dnf_width(const TruthTable& f) {
  WidthReport r;
  if (f.is_constant()) {
    // constant 1 is the empty term, constant 0 the empty DNF
    if (f.is_constant_one())
      for (std::uint64_t v = 0; v < f.size(); ++v) r.witness_terms.emplace(v, Term::empty(f.arity()));
    return r;
  }
  for (std::uint64_t v = 0; v < f.size(); ++v) {
    if (!f[v]) continue;
    auto found = max_implicant_search(f, v);
    r.width = std::max(r.width, f.arity() - found.dimension);
    r.witness_terms.emplace(v, found.term);
  }
  return r;
}

/// The DNF formed by the distinct witness terms of a width report.
inline Dnf witness_dnf(int arity, const WidthReport& r) {
  Dnf d{arity, {}};
  for (const auto& [v, t] : r.witness_terms)
    if (std::find(d.terms.begin(), d.terms.end(), t) == d.terms.end()) d.terms.push_back(t);
  return d;
}

/// Independent route: do the implicants of width <= w cover every true point?
/// Enumerates terms directly and never consults the per-point search.
inline bool width_at_most_by_cover(const TruthTable& f, int w) {
  const int n = f.arity();
  if (w < 0 || w > n) throw std::invalid_argument("width_at_most_by_cover: w out of range");
  TruthTable covered(n);

  std::vector<int> positions(static_cast<std::size_t>(n));
  for (int p = 1; p <= n; ++p) positions[static_cast<std::size_t>(p - 1)] = p;

  for (int j = 0; j <= w; ++j) {
    for_each_combination(positions, j, [&](const std::vector<int>& fixed_pos) {
      const std::uint64_t mask = positions_mask(n, fixed_pos);
      for_each_submask(mask, [&](std::uint64_t values) {
        const Term t(n, mask, values);
        if (is_implicant(t, f))
          Subcube(t).for_each_member([&](std::uint64_t v) {
            covered.set(v, true);
            return true;
          });
        return true;
      });
      return false;
    });
  }
  return covered == f;
}

inline constexpr int kMaxDepthArity = 12;

/// Minimum worst-case number of adaptive queries needed to evaluate f.
///
/// Restrictions are indexed in base 3 (digit 0/1 = fixed, 2 = free), digit i
/// belonging to integer bit i. Every child of a restriction (one free digit
/// lowered to 0 or 1) has a smaller index, so one ascending pass fills the
/// table bottom-up.
inline int decision_tree_depth(const TruthTable& f) {
  const int n = f.arity();
  if (n > kMaxDepthArity)
    throw unsupported_size("decision_tree_depth: arity " + std::to_string(n) + " exceeds " +
                           std::to_string(kMaxDepthArity));

  std::vector<std::uint32_t> pow3(static_cast<std::size_t>(n) + 1, 1);
  for (int i = 1; i <= n; ++i) pow3[static_cast<std::size_t>(i)] = pow3[static_cast<std::size_t>(i - 1)] * 3;
  const std::uint32_t states = pow3[static_cast<std::size_t>(n)];

  // bit 0: some true point in the restriction, bit 1: some false point
  std::vector<std::uint8_t> seen(states, 0);
  std::vector<std::uint8_t> depth(states, 0);

  for (std::uint32_t s = 0; s < states; ++s) {
    int first_free = -1;
    std::uint64_t value = 0;
    std::uint32_t rest = s;
    for (int i = 0; i < n; ++i) {
      const std::uint32_t digit = rest % 3;
      rest /= 3;
      if (digit == 2) {
        if (first_free < 0) first_free = i;
      } else if (digit == 1) {
        value |= std::uint64_t{1} << i;
      }
    }
    if (first_free < 0) {
      seen[s] = f[value] ? 1 : 2;
      depth[s] = 0;
      continue;
    }
    const auto p = pow3[static_cast<std::size_t>(first_free)];
    seen[s] = seen[s - 2 * p] | seen[s - p];
    if (seen[s] != 3) {
      depth[s] = 0;
      continue;
    }
    int best = n + 1;
    rest = s;
    for (int i = 0; i < n; ++i, rest /= 3) {
      if (rest % 3 != 2) continue;
      const auto q = pow3[static_cast<std::size_t>(i)];
      const int d = 1 + std::max(depth[s - 2 * q], depth[s - q]);
      best = std::min(best, d);
    }
    depth[s] = static_cast<std::uint8_t>(best);
  }
  return depth[states - 1];
}

}  // namespace dnfw
