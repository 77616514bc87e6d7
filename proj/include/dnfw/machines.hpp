#pragma once

// Nondeterministic query machines: finite trees of GUESS (free binary
// choice), QUERY (read one input position) and ACCEPT/REJECT leaves. The
// resource being bounded is the number of distinct input positions read along
// an accepting path; every accepting path pins down a term of that width.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnfw/bits.hpp"
#include "dnfw/boolfn.hpp"

namespace dnfw {

enum class NodeKind { guess, query, accept, reject };

struct MachineNode {
  NodeKind kind = NodeKind::reject;
  int position = 0;         ///< 1-based, QUERY only
  int child[2] = {-1, -1};  ///< GUESS: either branch; QUERY: indexed by the bit read
};

class NdQueryMachine {
 public:
  NdQueryMachine() : NdQueryMachine(0, {MachineNode{}}, 0) {}

  /// Validates that nodes form a tree rooted at 0 with in-range query positions.
  NdQueryMachine(int arity, std::vector<MachineNode> nodes, int query_bound)
      : arity_(arity), nodes_(std::move(nodes)), query_bound_(query_bound) {
    validate();
  }

  int arity() const noexcept { return arity_; }
  int query_bound() const noexcept { return query_bound_; }
  const std::vector<MachineNode>& nodes() const noexcept { return nodes_; }

  /// Max number of distinct positions queried along any root-to-ACCEPT path.
  int max_accepting_queries() const {
    int best = 0;
    auto visit = [&](std::uint64_t mask, std::uint64_t) { best = std::max(best, std::popcount(mask)); };
    walk_paths(0, 0, 0, visit);
    return best;
  }

  /// Like max_accepting_queries, but also counting paths made unsatisfiable by
  /// a contradictory re-read.
  int max_path_reads() const { return distinct_reads(0, 0); }

  /// Calls fn(fixed_mask, fixed_values) for every satisfiable accepting path.
  template <class Fn>
  void for_each_accepting_path(Fn&& fn) const {
    walk_paths(0, 0, 0, fn);
  }

 private:
  template <class Fn>
  void walk_paths(int id, std::uint64_t mask, std::uint64_t values, Fn& fn) const {
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    switch (node.kind) {
      case NodeKind::accept: fn(mask, values); return;
      case NodeKind::reject: return;
      case NodeKind::guess:
        walk_paths(node.child[0], mask, values, fn);
        walk_paths(node.child[1], mask, values, fn);
        return;
      case NodeKind::query: {
        const auto bit = position_mask(arity_, node.position);
        if (mask & bit) {
          // repeated read: only the branch agreeing with the earlier value is satisfiable
          walk_paths(node.child[(values & bit) ? 1 : 0], mask, values, fn);
        } else {
          walk_paths(node.child[0], mask | bit, values, fn);
          walk_paths(node.child[1], mask | bit, values | bit, fn);
        }
        return;
      }
    }
  }

  void validate() const {
    if (arity_ < 0 || arity_ > kMaxStringLength) throw std::invalid_argument("machine: arity out of range");
    if (nodes_.empty()) throw std::invalid_argument("machine: no nodes");
    std::vector<int> parents(nodes_.size(), 0);
    for (const auto& n : nodes_) {
      const bool inner = n.kind == NodeKind::guess || n.kind == NodeKind::query;
      if (n.kind == NodeKind::query && (n.position < 1 || n.position > arity_))
        throw std::invalid_argument("machine: query position " + std::to_string(n.position) + " outside 1.." +
                                    std::to_string(arity_));
      if (!inner) continue;
      for (int c : n.child) {
        if (c <= 0 || static_cast<std::size_t>(c) >= nodes_.size())
          throw std::invalid_argument("machine: bad child id " + std::to_string(c));
        if (++parents[static_cast<std::size_t>(c)] > 1)
          throw std::invalid_argument("machine: node " + std::to_string(c) + " has two parents");
      }
    }
    // every node reachable from the root, so the structure is a tree
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      if (seen[static_cast<std::size_t>(id)]) throw std::invalid_argument("machine: cycle");
      seen[static_cast<std::size_t>(id)] = 1;
      const auto& n = nodes_[static_cast<std::size_t>(id)];
      if (n.kind == NodeKind::guess || n.kind == NodeKind::query) {
        stack.push_back(n.child[0]);
        stack.push_back(n.child[1]);
      }
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) throw std::invalid_argument("machine: node " + std::to_string(i) + " unreachable from root");
    if (const int q = distinct_reads(0, 0); q > query_bound_)
      throw std::invalid_argument("machine: an accepting path reads " + std::to_string(q) + " positions, bound is " +
                                  std::to_string(query_bound_));
  }

  // Counts every path, satisfiable or not.
  int distinct_reads(int id, std::uint64_t mask) const {
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    switch (node.kind) {
      case NodeKind::accept: return std::popcount(mask);
      case NodeKind::reject: return 0;
      case NodeKind::guess: return std::max(distinct_reads(node.child[0], mask), distinct_reads(node.child[1], mask));
      case NodeKind::query: {
        const auto m = mask | position_mask(arity_, node.position);
        return std::max(distinct_reads(node.child[0], m), distinct_reads(node.child[1], m));
      }
    }
    return 0;
  }

  int arity_ = 0;
  std::vector<MachineNode> nodes_;
  int query_bound_ = 0;
};

/// Some accepting path is consistent with x.
inline bool accepts(const NdQueryMachine& m, std::uint64_t x) {
  std::vector<int> stack{0};
  const auto& nodes = m.nodes();
  while (!stack.empty()) {
    const auto& node = nodes[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    switch (node.kind) {
      case NodeKind::accept: return true;
      case NodeKind::reject: break;
      case NodeKind::guess:
        stack.push_back(node.child[1]);
        stack.push_back(node.child[0]);
        break;
      case NodeKind::query: stack.push_back(node.child[(x >> position_bit(m.arity(), node.position)) & 1U]); break;
    }
  }
  return false;
}

inline bool accepts(const NdQueryMachine& m, const BitString& x) {
  if (x.length() != m.arity()) throw std::invalid_argument("accepts: length mismatch");
  return accepts(m, x.value());
}

inline constexpr int kMaxMachineTableArity = 20;

inline TruthTable accepted_set(const NdQueryMachine& m) {
  if (m.arity() > kMaxMachineTableArity)
    throw std::invalid_argument("accepted_set: arity " + std::to_string(m.arity()) + " exceeds 20");
  return TruthTable::from_predicate(m.arity(), [&](std::uint64_t v) { return accepts(m, v); });
}

/// One term per satisfiable accepting path, fixing the positions it reads.
inline Dnf to_dnf(const NdQueryMachine& m) {
  Dnf d{m.arity(), {}};
  m.for_each_accepting_path([&](std::uint64_t mask, std::uint64_t values) { d.terms.emplace_back(m.arity(), mask, values); });
  return d;
}

/// Random machine with at most `max_nodes` nodes in which no path reads more
/// than f distinct positions. Deterministic in the seed.
inline NdQueryMachine random_machine(int n, int f, int max_nodes, std::uint64_t seed) {
  if (n < 0 || n > kMaxStringLength) throw std::invalid_argument("random_machine: bad arity");
  if (f < 0 || f > n) throw std::invalid_argument("random_machine: need 0 <= f <= n");
  if (max_nodes < 1) throw std::invalid_argument("random_machine: need max_nodes >= 1");
  std::mt19937_64 rng(seed);
  auto uniform = [&](int hi) { return static_cast<int>(rng() % static_cast<std::uint64_t>(hi)); };

  std::vector<MachineNode> nodes;
  nodes.reserve(static_cast<std::size_t>(max_nodes));
  int budget = max_nodes - 1;  // nodes still available beyond the one being placed

  // Preorder construction; `read` holds the distinct positions queried on the
  // current path. Once f positions are read, queries only repeat them.
  auto build = [&](auto& self, std::vector<int>& read) -> int {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const int choice = budget >= 2 ? uniform(10) : 7 + uniform(3);
    if (choice >= 7) {
      nodes[static_cast<std::size_t>(id)].kind = (choice == 9) ? NodeKind::reject : NodeKind::accept;
      return id;
    }
    MachineNode node{NodeKind::guess, 0, {-1, -1}};
    bool fresh = false;
    if (choice >= 3 && n > 0) {
      if (static_cast<int>(read.size()) < f) {
        node = {NodeKind::query, 1 + uniform(n), {-1, -1}};
        fresh = std::find(read.begin(), read.end(), node.position) == read.end();
      } else if (!read.empty()) {
        node = {NodeKind::query, read[static_cast<std::size_t>(uniform(static_cast<int>(read.size())))], {-1, -1}};
      }
    }
    budget -= 2;
    nodes[static_cast<std::size_t>(id)] = node;
    if (fresh) read.push_back(node.position);
    const int a = self(self, read);
    const int b = self(self, read);
    if (fresh) read.pop_back();
    nodes[static_cast<std::size_t>(id)].child[0] = a;
    nodes[static_cast<std::size_t>(id)].child[1] = b;
    return id;
  };
  std::vector<int> read;
  build(build, read);
  return NdQueryMachine(n, std::move(nodes), f);
}

// --- text format ---------------------------------------------------------
//
//   id GUESS c0 c1 | id QUERY p c0 c1 | id ACCEPT | id REJECT
//
// Root is id 0; ids must be 0..m-1 (any line order). Blank lines and lines
// starting with '#' are ignored.

inline void write_machine(std::ostream& os, const NdQueryMachine& m) {
  const auto& nodes = m.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    os << i << ' ';
    switch (n.kind) {
      case NodeKind::guess: os << "GUESS " << n.child[0] << ' ' << n.child[1]; break;
      case NodeKind::query: os << "QUERY " << n.position << ' ' << n.child[0] << ' ' << n.child[1]; break;
      case NodeKind::accept: os << "ACCEPT"; break;
      case NodeKind::reject: os << "REJECT"; break;
    }
    os << '\n';
  }
}

/// Arity defaults to the largest queried position when not given.
inline NdQueryMachine read_machine(std::istream& is, std::optional<int> arity = std::nullopt) {
  std::vector<std::optional<MachineNode>> slots;
  std::string line;
  int line_no = 0;
  int max_pos = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long id = -1;
    std::string kind;
    if (!(ls >> id >> kind) || id < 0)
      throw std::invalid_argument("machine line " + std::to_string(line_no) + ": expected '<id> <KIND> ...'");
    MachineNode node;
    if (kind == "GUESS") {
      node.kind = NodeKind::guess;
      ls >> node.child[0] >> node.child[1];
    } else if (kind == "QUERY") {
      node.kind = NodeKind::query;
      ls >> node.position >> node.child[0] >> node.child[1];
      max_pos = std::max(max_pos, node.position);
    } else if (kind == "ACCEPT") {
      node.kind = NodeKind::accept;
    } else if (kind == "REJECT") {
      node.kind = NodeKind::reject;
    } else {
      throw std::invalid_argument("machine line " + std::to_string(line_no) + ": unknown node kind '" + kind + "'");
    }
    if (ls.fail()) throw std::invalid_argument("machine line " + std::to_string(line_no) + ": missing fields");
    std::string extra;
    if (ls >> extra) throw std::invalid_argument("machine line " + std::to_string(line_no) + ": trailing text");
    if (static_cast<std::size_t>(id) >= slots.size()) slots.resize(static_cast<std::size_t>(id) + 1);
    if (slots[static_cast<std::size_t>(id)])
      throw std::invalid_argument("machine line " + std::to_string(line_no) + ": duplicate id " + std::to_string(id));
    slots[static_cast<std::size_t>(id)] = node;
  }
  std::vector<MachineNode> nodes;
  nodes.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) throw std::invalid_argument("machine: missing node id " + std::to_string(i));
    nodes.push_back(*slots[i]);
  }
  const int n = arity.value_or(max_pos);
  const NdQueryMachine probe(n, nodes, n);
  return NdQueryMachine(n, std::move(nodes), probe.max_path_reads());
}

inline NdQueryMachine parse_machine(const std::string& text, std::optional<int> arity = std::nullopt) {
  std::istringstream is(text);
  return read_machine(is, arity);
}

}  // namespace dnfw
