#pragma once

// Seeded generators for language models: empty slices, random slices,
// planted low-width slices, planted instances of the witness case of the
// boundary-subcube strategy, and slices decided by query machines.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnfw/bits.hpp"
#include "dnfw/boolfn.hpp"
#include "dnfw/machines.hpp"
#include "dnfw/width_bettor.hpp"

namespace dnfw {

namespace detail {

/// Per-length stream so multi-length languages do not depend on length order.
inline std::mt19937_64 length_rng(std::uint64_t seed, int n) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n)};
  return std::mt19937_64(seq);
}

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline int below(std::mt19937_64& rng, int hi) { return static_cast<int>(rng() % static_cast<std::uint64_t>(hi)); }

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(rng() % i)]);
}

inline std::string tag(const std::string& kind, std::uint64_t seed) { return kind + ":seed=" + std::to_string(seed); }

inline void check_arity(int n) {
  if (n < 0 || n > kMaxTableArity) throw std::invalid_argument("generator: length must be in [0, 24]");
}

}  // namespace detail

inline LanguageModel gen_empty_slice(int n) {
  detail::check_arity(n);
  LanguageModel lang("empty_slice");
  lang.set_slice(TruthTable(n));
  return lang;
}

inline TruthTable random_table(int n, double p, std::uint64_t seed) {
  detail::check_arity(n);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gen_random: density must be in [0, 1]");
  auto rng = detail::length_rng(seed, n);
  TruthTable t(n);
  for (std::uint64_t v = 0; v < t.size(); ++v) t.set(v, detail::unit(rng) < p);
  return t;
}

inline LanguageModel gen_random(int n, double p, std::uint64_t seed) {
  LanguageModel lang(detail::tag("random", seed));
  lang.set_slice(random_table(n, p, seed));
  return lang;
}

/// Random language over several lengths, each slice drawn independently.
inline LanguageModel gen_random(const std::vector<int>& lengths, double p, std::uint64_t seed) {
  LanguageModel lang(detail::tag("random", seed));
  for (int n : lengths) lang.set_slice(random_table(n, p, seed));
  return lang;
}

/// Union of t random terms of width exactly w.
inline TruthTable planted_width_table(int n, int w, int t, std::uint64_t seed) {
  detail::check_arity(n);
  if (w < 0 || w > n) throw std::invalid_argument("gen_planted_width: need 0 <= w <= n");
  if (t < 0) throw std::invalid_argument("gen_planted_width: need t >= 0");
  auto rng = detail::length_rng(seed, n);
  TruthTable table(n);
  for (int i = 0; i < t; ++i) {
    std::vector<int> positions(static_cast<std::size_t>(n));
    for (int p = 1; p <= n; ++p) positions[static_cast<std::size_t>(p - 1)] = p;
    for (int j = 0; j < w; ++j)  // partial Fisher–Yates
      std::swap(positions[static_cast<std::size_t>(j)],
                positions[static_cast<std::size_t>(j + detail::below(rng, n - j))]);
    positions.resize(static_cast<std::size_t>(w));
    const std::uint64_t mask = positions_mask(n, positions);
    const Term term(n, mask, rng() & mask);
    Subcube(term).for_each_member([&](std::uint64_t v) {
      table.set(v, true);
      return true;
    });
  }
  return table;
}

inline LanguageModel gen_planted_width(int n, int w, int t, std::uint64_t seed) {
  LanguageModel lang(detail::tag("planted_width", seed));
  lang.set_slice(planted_width_table(n, w, t, seed));
  return lang;
}

struct Case2Instance {
  LanguageModel language;
  Term planted;            ///< implicant through the witness
  Subcube winning;         ///< the boundary subcube guaranteed to lie in the slice
  std::size_t winning_block = 0;
  int noise_terms = 0;
};

/// A length-n slice in which strings of value < v are absent, v is present and
/// covered by a planted implicant with at least (#blocks)·k free positions, all
/// at zero bits of v. Noise terms are confined to strings outside bet_set(n).
///
/// By default the free positions avoid the final block and the winning
/// subcube is the pigeonhole block's first k free positions. With
/// `final_block`, k of the free positions sit in the final block and the
/// winning subcube uses exactly those.
inline Case2Instance gen_theorem_case2(int n, int b, int k, std::uint64_t v, std::uint64_t seed,
                                       bool final_block = false, bool noise = true) {
  detail::check_arity(n);
  if (k < 1 || k > b || b > n) throw std::invalid_argument("gen_theorem_case2: need 1 <= k <= b <= n");
  if (v >= static_cast<std::uint64_t>(n)) throw std::invalid_argument("gen_theorem_case2: need v < n");

  const auto blocks = partition_blocks(n, b);
  const int nb = static_cast<int>(blocks.size());
  const int need = nb * k;
  const int width_bound = n - need;
  if (width_bound < 0) throw std::invalid_argument("gen_theorem_case2: (#blocks)·k exceeds n");

  auto rng = detail::length_rng(seed, n);
  const auto zero_at = [&](int p) { return (v & position_mask(n, p)) == 0; };
  const BlockRange last = blocks.back();

  std::vector<int> free_pos;
  std::vector<int> pool;
  if (final_block) {
    std::vector<int> tail;
    for (int p = last.first; p <= last.last; ++p)
      if (zero_at(p)) tail.push_back(p);
    if (static_cast<int>(tail.size()) < k)
      throw std::invalid_argument("gen_theorem_case2: final block has fewer than k zero bits of the witness");
    detail::shuffle(tail, rng);
    free_pos.assign(tail.begin(), tail.begin() + k);
    for (int p = 1; p < last.first; ++p)
      if (zero_at(p)) pool.push_back(p);
    for (auto it = tail.begin() + k; it != tail.end(); ++it) pool.push_back(*it);
  } else {
    for (int p = 1; p < last.first; ++p)
      if (zero_at(p)) pool.push_back(p);
  }
  const int missing = need - static_cast<int>(free_pos.size());
  if (static_cast<int>(pool.size()) < missing)
    throw std::invalid_argument("gen_theorem_case2: not enough zero bits of the witness outside the final block");
  detail::shuffle(pool, rng);
  free_pos.insert(free_pos.end(), pool.begin(), pool.begin() + missing);
  std::sort(free_pos.begin(), free_pos.end());

  Case2Instance inst;
  const std::uint64_t all = low_mask(n);
  inst.planted = Term(n, all & ~positions_mask(n, free_pos), v);

  std::vector<int> winning_free;
  if (final_block) {
    inst.winning_block = blocks.size() - 1;
  } else {
    const auto blk = pigeonhole_block(free_pos, blocks, k);
    if (!blk) throw std::logic_error("gen_theorem_case2: pigeonhole failed");
    inst.winning_block = *blk;
  }
  for (int p : free_pos)
    if (blocks[inst.winning_block].contains(p) && static_cast<int>(winning_free.size()) < k) winning_free.push_back(p);
  inst.winning = Subcube(n, all & ~positions_mask(n, winning_free), v);

  TruthTable slice(n);
  Subcube(inst.planted).for_each_member([&](std::uint64_t y) {
    slice.set(y, true);
    return true;
  });

  if (noise) {
    // Blocks in which every one of the first n strings is zero; a point that is
    // nonzero in two of them is neither a first-n string nor in a boundary
    // subcube of one, hence outside the bet set.
    const int low_bits = std::bit_width(static_cast<std::uint64_t>(n - 1));
    std::vector<std::size_t> high;
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i].last <= n - low_bits) high.push_back(i);
    const int per_block = std::min(b, width_bound / 2);
    if (high.size() >= 2 && per_block >= 1) {
      inst.noise_terms = 1 + detail::below(rng, 4);
      for (int t = 0; t < inst.noise_terms; ++t) {
        detail::shuffle(high, rng);
        std::uint64_t mask = 0, values = 0;
        for (int j = 0; j < 2; ++j) {
          const auto& blk = blocks[high[static_cast<std::size_t>(j)]];
          std::vector<int> pos;
          for (int p = blk.first; p <= blk.last; ++p) pos.push_back(p);
          detail::shuffle(pos, rng);
          pos.resize(static_cast<std::size_t>(1 + detail::below(rng, std::min(per_block, blk.size()))));
          const std::uint64_t m = positions_mask(n, pos);
          std::uint64_t val = rng() & m;
          if (val == 0) val = position_mask(n, pos.front());
          mask |= m;
          values |= val;
        }
        Subcube(Term(n, mask, values)).for_each_member([&](std::uint64_t y) {
          slice.set(y, true);
          return true;
        });
      }
    }
  }

  inst.language = LanguageModel(detail::tag("theorem_case2", seed));
  inst.language.set_slice(std::move(slice));
  return inst;
}

/// One machine per length; slice n is the set the length-n machine accepts.
inline LanguageModel gen_from_machine(const std::vector<NdQueryMachine>& machines) {
  LanguageModel lang("from_machine");
  int last = -1;
  for (const auto& m : machines) {
    if (m.arity() <= last) throw std::invalid_argument("gen_from_machine: machine arities must be strictly increasing");
    last = m.arity();
    lang.set_slice(accepted_set(m));
  }
  return lang;
}

// --- GenSpec -------------------------------------------------------------

enum class GenKind { empty_slice, random, planted_width, theorem_case2, from_machine };

NLOHMANN_JSON_SERIALIZE_ENUM(GenKind, {{GenKind::empty_slice, "empty_slice"},
                                       {GenKind::random, "random"},
                                       {GenKind::planted_width, "planted_width"},
                                       {GenKind::theorem_case2, "theorem_case2"},
                                       {GenKind::from_machine, "from_machine"}})

struct MachineRef {
  std::string file;
  std::optional<int> arity;
};

struct GenSpec {
  GenKind kind = GenKind::empty_slice;
  std::vector<int> lengths;  ///< "n" or "lengths"
  std::uint64_t seed = 0;
  double density = 0.5;
  int width = 0;
  int terms = 1;
  int block = 4;
  int free = 2;
  std::uint64_t witness = 0;
  bool final_block = false;
  bool noise = true;
  std::vector<MachineRef> machines;
};

inline GenSpec gen_spec_from_json(const nlohmann::json& j) {
  GenSpec s;
  if (!j.is_object()) throw std::invalid_argument("GenSpec: expected a JSON object");
  if (!j.contains("kind")) throw std::invalid_argument("GenSpec: missing \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  s.kind = nlohmann::json(kind).get<GenKind>();
  if (nlohmann::json(s.kind) != kind) throw std::invalid_argument("GenSpec: unknown kind '" + kind + "'");
  if (j.contains("n")) s.lengths.push_back(j.at("n").get<int>());
  if (j.contains("lengths"))
    for (const auto& n : j.at("lengths")) s.lengths.push_back(n.get<int>());
  if (j.contains("max_length"))
    for (int n = j.value("min_length", 0); n <= j.at("max_length").get<int>(); ++n) s.lengths.push_back(n);
  std::sort(s.lengths.begin(), s.lengths.end());
  s.lengths.erase(std::unique(s.lengths.begin(), s.lengths.end()), s.lengths.end());
  s.seed = j.value("seed", std::uint64_t{0});
  s.density = j.value("density", 0.5);
  s.width = j.value("width", 0);
  s.terms = j.value("terms", 1);
  s.block = j.value("block", 4);
  s.free = j.value("free", 2);
  s.witness = j.value("witness", std::uint64_t{0});
  s.final_block = j.value("final_block", false);
  s.noise = j.value("noise", true);
  if (j.contains("machine")) {
    MachineRef r{j.at("machine").get<std::string>(), std::nullopt};
    if (j.contains("n")) r.arity = j.at("n").get<int>();
    s.machines.push_back(r);
  }
  if (j.contains("machines"))
    for (const auto& m : j.at("machines")) {
      MachineRef r{m.at("file").get<std::string>(), std::nullopt};
      if (m.contains("n")) r.arity = m.at("n").get<int>();
      s.machines.push_back(r);
    }
  if (s.kind != GenKind::from_machine && s.lengths.empty())
    throw std::invalid_argument("GenSpec: give \"n\", \"lengths\" or \"max_length\"");
  if (s.kind == GenKind::from_machine && s.machines.empty())
    throw std::invalid_argument("GenSpec: from_machine needs \"machine\" or \"machines\"");
  return s;
}

inline nlohmann::ordered_json to_json(const GenSpec& s) {
  nlohmann::ordered_json j;
  j["kind"] = nlohmann::json(s.kind);
  j["lengths"] = s.lengths;
  j["seed"] = s.seed;
  switch (s.kind) {
    case GenKind::random: j["density"] = s.density; break;
    case GenKind::planted_width:
      j["width"] = s.width;
      j["terms"] = s.terms;
      break;
    case GenKind::theorem_case2:
      j["block"] = s.block;
      j["free"] = s.free;
      j["witness"] = s.witness;
      j["final_block"] = s.final_block;
      j["noise"] = s.noise;
      break;
    case GenKind::from_machine: {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& m : s.machines) {
        nlohmann::ordered_json e;
        e["file"] = m.file;
        if (m.arity) e["n"] = *m.arity;
        arr.push_back(e);
      }
      j["machines"] = arr;
      break;
    }
    case GenKind::empty_slice: break;
  }
  return j;
}

inline LanguageModel generate(const GenSpec& s) {
  LanguageModel lang;
  switch (s.kind) {
    case GenKind::empty_slice:
      for (int n : s.lengths) lang.set_slice(gen_empty_slice(n).slice_or_empty(n));
      break;
    case GenKind::random:
      lang = gen_random(s.lengths, s.density, s.seed);
      break;
    case GenKind::planted_width:
      for (int n : s.lengths) lang.set_slice(planted_width_table(n, s.width, s.terms, s.seed));
      break;
    case GenKind::theorem_case2:
      for (int n : s.lengths) {
        auto inst = gen_theorem_case2(n, s.block, s.free, s.witness, s.seed, s.final_block, s.noise);
        lang.set_slice(inst.language.slice_or_empty(n));
      }
      break;
    case GenKind::from_machine: {
      std::vector<NdQueryMachine> machines;
      for (const auto& ref : s.machines) {
        std::ifstream in(ref.file);
        if (!in) throw std::runtime_error("cannot open machine file '" + ref.file + "'");
        machines.push_back(read_machine(in, ref.arity));
      }
      lang = gen_from_machine(machines);
      break;
    }
  }
  lang.set_provenance(nlohmann::json(s.kind).get<std::string>() + ":seed=" + std::to_string(s.seed));
  return lang;
}

}  // namespace dnfw
