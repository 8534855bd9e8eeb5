#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frobten/rational.hpp"

namespace frobten {

// Stable trees with n >= 3 numbered tails 0..n-1, in canonical form: each
// edge is recorded as the set of tails on its far side from tail 0, stored as
// a bitmask excluding bit 0.  Two trees are isomorphic (over the tail
// labelling) iff their split sets coincide, so equality of the sorted split
// vectors decides isomorphism.
struct StableTree {
  int n = 0;
  std::vector<uint32_t> splits;  // sorted, each excludes bit 0, 2<=|T|<=n-2

  int edge_count() const { return int(splits.size()); }

  friend bool operator==(const StableTree&, const StableTree&) = default;
  friend auto operator<=>(const StableTree& a, const StableTree& b) {
    if (auto c = a.n <=> b.n; c != 0) return c;
    return a.splits <=> b.splits;
  }
};

inline uint32_t full_mask(int n) { return (n >= 32) ? 0 : ((1u << n) - 1); }

// Flip a tail set to the side not containing tail 0.
inline uint32_t normalize_split(uint32_t mask, int n) {
  return (mask & 1u) ? (full_mask(n) & ~mask) : mask;
}

inline bool valid_split(uint32_t mask, int n) {
  int c = std::popcount(mask);
  return !(mask & 1u) && c >= 2 && c <= n - 2;
}

inline bool splits_compatible(uint32_t a, uint32_t b) {
  // both exclude tail 0, so crossing reduces to: disjoint or nested
  return (a & b) == 0 || (a & b) == a || (a & b) == b;
}

inline StableTree make_stable_tree(int n, std::vector<uint32_t> splits) {
  if (n < 3 || n > 31) throw std::invalid_argument("tail count out of range");
  for (auto& s : splits) {
    s = normalize_split(s, n);
    if (!valid_split(s, n))
      throw std::invalid_argument("invalid split in stable tree");
  }
  std::sort(splits.begin(), splits.end());
  for (size_t i = 0; i + 1 < splits.size(); ++i)
    if (splits[i] == splits[i + 1])
      throw std::invalid_argument("duplicate split in stable tree");
  for (size_t i = 0; i < splits.size(); ++i)
    for (size_t j = i + 1; j < splits.size(); ++j)
      if (!splits_compatible(splits[i], splits[j]))
        throw std::invalid_argument("incompatible splits in stable tree");
  return StableTree{n, std::move(splits)};
}

inline StableTree one_vertex_tree(int n) { return make_stable_tree(n, {}); }

// Explicit vertex/edge structure of a canonical tree.  Vertex 0 is the root
// (the vertex whose component contains tail 0); vertex k >= 1 is the vertex
// directly inside split vsplit[k].
struct TreeStructure {
  int n = 0;
  std::vector<std::vector<int>> tails;     // per vertex, ascending
  std::vector<int> parent;                 // -1 for root
  std::vector<std::vector<int>> children;  // vertex ids
  std::vector<uint32_t> vsplit;            // vsplit[0] unused (root)
  std::vector<int> vertex_of_tail;

  int vertex_count() const { return int(tails.size()); }
  int flag_count(int v) const {
    return int(tails[v].size()) + int(children[v].size()) + (parent[v] >= 0);
  }
};

inline TreeStructure tree_structure(const StableTree& t) {
  TreeStructure s;
  s.n = t.n;
  const int m = t.edge_count();
  // vertices sorted so that a vertex's enclosing splits come earlier
  std::vector<uint32_t> order(t.splits);
  std::sort(order.begin(), order.end(), [](uint32_t a, uint32_t b) {
    int ca = std::popcount(a), cb = std::popcount(b);
    return ca != cb ? ca > cb : a < b;
  });
  s.tails.assign(m + 1, {});
  s.parent.assign(m + 1, -1);
  s.children.assign(m + 1, {});
  s.vsplit.assign(m + 1, 0);
  std::map<uint32_t, int> id;
  for (int k = 0; k < m; ++k) {
    s.vsplit[k + 1] = order[k];
    id[order[k]] = k + 1;
  }
  for (int k = 0; k < m; ++k) {
    // parent = smallest strict superset among the splits, else root
    uint32_t best = 0;
    int pv = 0;
    for (int j = 0; j < k; ++j) {
      uint32_t o = order[j];
      if ((order[k] & o) == order[k] && o != order[k]) {
        if (best == 0 || std::popcount(o) < std::popcount(best)) {
          best = o;
          pv = id[o];
        }
      }
    }
    s.parent[k + 1] = pv;
    s.children[pv].push_back(k + 1);
  }
  s.vertex_of_tail.assign(t.n, 0);
  for (int tail = 0; tail < t.n; ++tail) {
    // vertex = innermost split containing the tail
    uint32_t best = 0;
    int v = 0;
    for (int k = 0; k < m; ++k)
      if (order[k] & (1u << tail))
        if (best == 0 || std::popcount(order[k]) < std::popcount(best)) {
          best = order[k];
          v = id[order[k]];
        }
    s.vertex_of_tail[tail] = v;
    s.tails[v].push_back(tail);
  }
  return s;
}

inline bool tree_is_stable(const StableTree& t) {
  TreeStructure s = tree_structure(t);
  for (int v = 0; v < s.vertex_count(); ++v)
    if (s.flag_count(v) < 3) return false;
  return true;
}

// Nested-parenthesis rendering rooted at the vertex carrying tail 0,
// e.g. "(0 1 (2 3))".
inline std::string tree_to_string(const StableTree& t) {
  TreeStructure s = tree_structure(t);
  std::function<std::string(int)> rec = [&](int v) {
    std::vector<std::pair<int, std::string>> items;  // (min label, text)
    for (int tail : s.tails[v]) items.emplace_back(tail, std::to_string(tail));
    for (int c : s.children[v]) {
      uint32_t sp = s.vsplit[c];
      items.emplace_back(std::countr_zero(sp), rec(c));
    }
    std::sort(items.begin(), items.end());
    std::string out = "(";
    for (size_t i = 0; i < items.size(); ++i) {
      if (i) out += " ";
      out += items[i].second;
    }
    return out + ")";
  };
  return rec(0);
}

// A not-necessarily-stable tree given by explicit vertex tail lists and
// edges; the input to stabilization.
struct RawTree {
  int n = 0;
  std::vector<std::vector<int>> vertex_tails;
  std::vector<std::pair<int, int>> edges;
};

// Stabilization: contract every edge whose removal would leave a side with
// fewer than two tails; equivalently keep exactly the valid tail splits.
inline StableTree stabilize(const RawTree& raw) {
  const int V = int(raw.vertex_tails.size());
  if (raw.n < 3) throw std::invalid_argument("stabilize needs >= 3 tails");
  std::vector<bool> seen(raw.n, false);
  for (auto& ts : raw.vertex_tails)
    for (int t : ts) {
      if (t < 0 || t >= raw.n || seen[t])
        throw std::invalid_argument("tails must enumerate 0..n-1 once");
      seen[t] = true;
    }
  for (bool b : seen)
    if (!b) throw std::invalid_argument("tails must enumerate 0..n-1 once");
  if (int(raw.edges.size()) != V - 1)
    throw std::invalid_argument("not a tree (edge count)");
  // adjacency
  std::vector<std::vector<std::pair<int, int>>> adj(V);  // (nbr, edge id)
  for (int e = 0; e < int(raw.edges.size()); ++e) {
    auto [a, b] = raw.edges[e];
    if (a < 0 || a >= V || b < 0 || b >= V || a == b)
      throw std::invalid_argument("bad edge");
    adj[a].emplace_back(b, e);
    adj[b].emplace_back(a, e);
  }
  // DFS from vertex 0 computing the tail set below each edge
  std::vector<uint32_t> below(raw.edges.size(), 0);
  std::vector<int> state(V, 0);
  std::function<uint32_t(int, int)> dfs = [&](int v, int pe) -> uint32_t {
    if (state[v]) throw std::invalid_argument("not a tree (cycle)");
    state[v] = 1;
    uint32_t acc = 0;
    for (int t : raw.vertex_tails[v]) acc |= 1u << t;
    for (auto [w, e] : adj[v])
      if (e != pe) {
        uint32_t sub = dfs(w, e);
        below[e] = sub;
        acc |= sub;
      }
    return acc;
  };
  dfs(0, -1);
  for (int v = 0; v < V; ++v)
    if (!state[v]) throw std::invalid_argument("not a tree (disconnected)");
  std::vector<uint32_t> splits;
  for (uint32_t m : below) {
    m = normalize_split(m, raw.n);
    if (valid_split(m, raw.n)) splits.push_back(m);
  }
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  return make_stable_tree(raw.n, std::move(splits));
}

// Formal sums of stable trees with rational coefficients.
using TreeSum = std::map<StableTree, Rational>;

inline void tree_sum_add(TreeSum& s, const StableTree& t, const Rational& c) {
  if (c == 0) return;
  auto [it, fresh] = s.emplace(t, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) s.erase(it);
  }
}

// Forgetting tail s at the level of trees: relabel, drop splits that became
// too small, and return the stabilized tree when an edge actually got
// contracted -- otherwise the class pushes forward to zero.
inline std::optional<StableTree> pushforward(const StableTree& t, int s) {
  if (t.n < 4) throw std::invalid_argument("pushforward needs n >= 4");
  if (s < 0 || s >= t.n) throw std::invalid_argument("tail out of range");
  const int n2 = t.n - 1;
  auto relabel = [&](uint32_t m) {
    uint32_t lo = m & ((1u << s) - 1);
    uint32_t hi = (m >> (s + 1)) << s;
    return lo | hi;
  };
  std::vector<uint32_t> splits;
  for (uint32_t m : t.splits) {
    uint32_t r = normalize_split(relabel(m & ~(1u << s)), n2);
    if (valid_split(r, n2)) splits.push_back(r);
  }
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  if (int(splits.size()) == t.edge_count()) return std::nullopt;
  return make_stable_tree(n2, std::move(splits));
}

// Adding a tail with label `pos` (existing labels >= pos shift up) at vertex
// v of the structure.  The class-level pullback is the sum over all vertices.
inline StableTree pullback_at(const StableTree& t, const TreeStructure& s,
                              int v, int pos) {
  const int n2 = t.n + 1;
  auto relabel = [&](uint32_t m) {
    uint32_t lo = m & ((1u << pos) - 1);
    uint32_t hi = (m >> pos) << (pos + 1);
    return lo | hi;
  };
  std::vector<uint32_t> splits;
  for (uint32_t m : t.splits) {
    uint32_t r = relabel(m);
    // the new tail joins the far side of every split enclosing vertex v
    if (v != 0 && (s.vsplit[v] & m) == s.vsplit[v]) r |= 1u << pos;
    splits.push_back(normalize_split(r, n2));
  }
  return make_stable_tree(n2, std::move(splits));
}

inline std::vector<StableTree> pullback(const StableTree& t, int pos = -1) {
  if (pos < 0) pos = t.n;
  if (pos > t.n) throw std::invalid_argument("insert position out of range");
  TreeStructure s = tree_structure(t);
  std::vector<StableTree> out;
  for (int v = 0; v < s.vertex_count(); ++v)
    out.push_back(pullback_at(t, s, v, pos));
  return out;
}

// All stable n-trees with exactly e edges.  Any pairwise-compatible set of
// distinct valid splits determines a stable tree, so this is subset
// enumeration with a compatibility filter.
inline std::vector<StableTree> enumerate_stable_trees(int n, int e) {
  if (n < 3 || n > 10)
    throw std::invalid_argument("enumerate_stable_trees supports 3 <= n <= 10");
  if (e < 0 || e > n - 3) return {};
  std::vector<uint32_t> cands;
  for (uint32_t m = 0; m <= full_mask(n); ++m)
    if (valid_split(m, n)) cands.push_back(m);
  std::vector<StableTree> out;
  std::vector<uint32_t> cur;
  std::function<void(size_t)> rec = [&](size_t lo) {
    if (int(cur.size()) == e) {
      out.push_back(StableTree{n, cur});
      return;
    }
    for (size_t i = lo; i < cands.size(); ++i) {
      bool ok = true;
      for (uint32_t c : cur)
        if (!splits_compatible(c, cands[i])) {
          ok = false;
          break;
        }
      if (!ok) continue;
      cur.push_back(cands[i]);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

}  // namespace frobten
