#pragma once

#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "frobten/basis.hpp"
#include "frobten/trees.hpp"

namespace frobten {

// An element of the cohomology of the moduli space of stable n-pointed
// rational curves, written in the boundary-strata presentation: a rational
// combination of stable n-trees, where a tree with e edges stands for the
// product of its e boundary divisors (codimension e).  The representation is
// not reduced; use StrataRing::normal_form for canonical coordinates.
struct StrataAlgebraElement {
  int n = 0;
  TreeSum terms;

  static StrataAlgebraElement unit(int n) {
    return {n, {{one_vertex_tree(n), Rational(1)}}};
  }
  static StrataAlgebraElement of_tree(const StableTree& t,
                                      const Rational& c = Rational(1)) {
    return {t.n, {{t, c}}};
  }

  StrataAlgebraElement& operator+=(const StrataAlgebraElement& o) {
    if (n != o.n) throw std::invalid_argument("mixed mark counts");
    for (auto& [t, c] : o.terms) tree_sum_add(terms, t, c);
    return *this;
  }
  StrataAlgebraElement operator*(const Rational& c) const {
    StrataAlgebraElement r{n, {}};
    for (auto& [t, k] : terms) tree_sum_add(r.terms, t, k * c);
    return r;
  }
};

namespace detail {

// Minimal tails of the two smallest branches at vertex v, skipping the
// branch through the edge whose far-side tail set is `skip` (0 = none).
// The remaining branches partition the tails on v's side of that edge.
inline std::pair<int, int> two_branch_tails(const TreeStructure& s, int v,
                                            uint32_t skip) {
  std::vector<int> mins;
  uint32_t full = full_mask(s.n);
  for (int t : s.tails[v]) mins.push_back(t);
  for (int c : s.children[v]) {
    uint32_t m = s.vsplit[c];
    if (m == skip) continue;
    mins.push_back(std::countr_zero(m));
  }
  if (s.parent[v] >= 0) {
    uint32_t m = full & ~s.vsplit[v];  // branch through the parent edge
    if (m != skip) mins.push_back(std::countr_zero(m));
  }
  std::sort(mins.begin(), mins.end());
  if (mins.size() < 2)
    throw std::logic_error("vertex with fewer than two side branches");
  return {mins[0], mins[1]};
}

}  // namespace detail

// Multiply a single stratum class by one boundary divisor D_T.  When T is
// already an edge of the stratum, the self-intersection is rewritten through
// the four-point linear relation chosen so that no substituted divisor is
// again an edge -- one rewrite always suffices.
inline TreeSum divisor_multiply(const StableTree& t, uint32_t T) {
  T = normalize_split(T, t.n);
  if (!valid_split(T, t.n)) throw std::invalid_argument("invalid divisor");
  TreeSum out;
  bool is_edge = std::find(t.splits.begin(), t.splits.end(), T) != t.splits.end();
  if (!is_edge) {
    for (uint32_t sp : t.splits)
      if (!splits_compatible(sp, T)) return out;  // transversally zero
    std::vector<uint32_t> ns = t.splits;
    ns.push_back(T);
    tree_sum_add(out, make_stable_tree(t.n, std::move(ns)), Rational(1));
    return out;
  }
  // self-intersection: pick tails i,j in distinct branches outside T and
  // k,l in distinct branches inside T, then
  //   D_T = sum_{S sep ik|jl} D_S - sum_{S sep ij|kl, S != T} D_S
  TreeStructure s = tree_structure(t);
  // w = vertex just inside T; u = its parent (outside T)
  int w = -1;
  for (int v = 1; v < s.vertex_count(); ++v)
    if (s.vsplit[v] == T) w = v;
  int u = s.parent[w];
  uint32_t full = full_mask(t.n);
  auto [i, j] = detail::two_branch_tails(s, u, T);          // outside T
  auto [k, l] = detail::two_branch_tails(s, w, full & ~T);  // inside T
  for (uint32_t m = 0; m <= full; ++m) {
    if (!valid_split(m, t.n)) continue;
    uint32_t a = m, b = full & ~m;
    auto in = [&](uint32_t side, int x) { return (side >> x) & 1u; };
    int sign = 0;
    if ((in(a, i) && in(a, k) && in(b, j) && in(b, l)) ||
        (in(b, i) && in(b, k) && in(a, j) && in(a, l)))
      sign = 1;  // separates ik | jl
    else if ((in(a, i) && in(a, j) && in(b, k) && in(b, l)) ||
             (in(b, i) && in(b, j) && in(a, k) && in(a, l)))
      sign = m == T ? 0 : -1;  // separates ij | kl
    if (sign == 0) continue;
    // by the branch-separating choice of i,j,k,l no admissible S is an edge
    // of t, so one rewrite suffices; crossing an edge kills the term
    bool compat = true;
    for (uint32_t sp : t.splits)
      if (sp == m || !splits_compatible(sp, m)) {
        compat = false;
        break;
      }
    if (!compat) continue;
    std::vector<uint32_t> ns = t.splits;
    ns.push_back(m);
    tree_sum_add(out, make_stable_tree(t.n, std::move(ns)), Rational(sign));
  }
  return out;
}

inline StrataAlgebraElement multiply(const StrataAlgebraElement& a,
                                     const StrataAlgebraElement& b) {
  if (a.n != b.n) throw std::invalid_argument("mixed mark counts");
  StrataAlgebraElement out{a.n, {}};
  for (auto& [tb, cb] : b.terms) {
    // fold the divisors of tb into each term of a, one at a time
    TreeSum cur;
    for (auto& [ta, ca] : a.terms) tree_sum_add(cur, ta, ca * cb);
    for (uint32_t sp : tb.splits) {
      TreeSum next;
      for (auto& [t, c] : cur)
        for (auto& [t2, c2] : divisor_multiply(t, sp))
          tree_sum_add(next, t2, c * c2);
      cur = std::move(next);
    }
    for (auto& [t, c] : cur) tree_sum_add(out.terms, t, c);
  }
  return out;
}

// Integral over the moduli space: only top-codimension terms (trivalent
// trees, which are points) contribute, each with multiplicity one.
inline Rational integrate(const StrataAlgebraElement& a) {
  Rational r = 0;
  for (auto& [t, c] : a.terms)
    if (t.edge_count() == a.n - 3) r += c;
  return r;
}

// Tree-level pushforward/pullback extended linearly to elements.
inline StrataAlgebraElement pushforward_class(const StrataAlgebraElement& a,
                                              int s) {
  StrataAlgebraElement out{a.n - 1, {}};
  for (auto& [t, c] : a.terms)
    if (auto p = pushforward(t, s)) tree_sum_add(out.terms, *p, c);
  return out;
}

inline StrataAlgebraElement pullback_class(const StrataAlgebraElement& a,
                                           int pos = -1) {
  StrataAlgebraElement out{a.n + 1, {}};
  for (auto& [t, c] : a.terms)
    for (auto& u : pullback(t, pos)) tree_sum_add(out.terms, u, c);
  return out;
}

// The class of the diagonal of M x M for the n-marked moduli space M,
// presented as sum of stratum (x) stratum terms with rational coefficients;
// only bidegrees summing to the dimension occur.
struct DiagonalClass {
  int n = 0;
  std::vector<std::tuple<StableTree, StableTree, Rational>> pairs;
};

namespace detail {

constexpr uint64_t kModP = (uint64_t(1) << 61) - 1;

inline uint64_t mod_mul(uint64_t a, uint64_t b) {
  return uint64_t((__uint128_t(a) * b) % kModP);
}
inline uint64_t mod_pow(uint64_t a, uint64_t e) {
  uint64_t r = 1;
  while (e) {
    if (e & 1) r = mod_mul(r, a);
    a = mod_mul(a, a);
    e >>= 1;
  }
  return r;
}
inline uint64_t mod_of(const Rational& q) {
  uint64_t num = uint64_t(numerator(q) >= 0 ? numerator(q) % kModP
                                            : kModP - (-numerator(q)) % kModP);
  uint64_t den = uint64_t(denominator(q) % kModP);
  return mod_mul(num % kModP, mod_pow(den, kModP - 2));
}

// incremental row-echelon structure over the prime field, used only to make
// deterministic independence decisions; all kept data stays exact
struct ModEchelon {
  std::vector<std::vector<uint64_t>> rows;
  std::vector<int> pivots;

  // returns true (and absorbs) when v is independent of the current rows
  bool try_add(std::vector<uint64_t> v) {
    for (size_t r = 0; r < rows.size(); ++r) {
      uint64_t f = v[pivots[r]];
      if (!f) continue;
      uint64_t inv = mod_pow(rows[r][pivots[r]], kModP - 2);
      f = mod_mul(f, inv);
      for (size_t c = 0; c < v.size(); ++c) {
        uint64_t sub = mod_mul(f, rows[r][c]);
        v[c] = (v[c] + kModP - sub) % kModP;
      }
    }
    for (size_t c = 0; c < v.size(); ++c)
      if (v[c]) {
        pivots.push_back(int(c));
        rows.push_back(std::move(v));
        return true;
      }
    return false;
  }
};

}  // namespace detail

// Cached intersection theory for a fixed n: strata lists, Poincare-pairing
// bases per codimension, Gram inverses, canonical coordinates, diagonal.
class StrataRing {
 public:
  explicit StrataRing(int n) : n_(n) {
    if (n < 3 || n > 8)
      throw std::invalid_argument("strata ring supports 3 <= n <= 8");
    const int top = n_ - 3;
    strata_.resize(top + 1);
    for (int d = 0; d <= top; ++d) strata_[d] = enumerate_stable_trees(n_, d);
    basis_idx_.resize(top + 1);
    gram_.resize(top + 1);
    gram_inv_.resize(top + 1);
    pair_rows_.resize(top + 1);
    for (int d = 0; 2 * d <= top; ++d) select_bases(d, top - d);
    for (int d = 0; d <= top; ++d) {
      gram_inv_[d] = invert_matrix(gram_[d]);  // throws if selection failed
    }
  }

  int n() const { return n_; }
  int top_codim() const { return n_ - 3; }

  const std::vector<StableTree>& strata(int codim) const {
    return strata_.at(codim);
  }
  std::vector<StableTree> basis(int codim) const {
    std::vector<StableTree> out;
    for (int i : basis_idx_.at(codim)) out.push_back(strata_[codim][i]);
    return out;
  }
  int rank(int codim) const { return int(basis_idx_.at(codim).size()); }

  // pairing of a single stratum against the basis of complementary codim
  const std::vector<Rational>& pairing_row(const StableTree& t) {
    int d = t.edge_count();
    auto it = pair_rows_[d].find(t);
    if (it != pair_rows_[d].end()) return it->second;
    std::vector<Rational> row;
    for (int j : basis_idx_[top_codim() - d]) {
      auto prod = multiply(StrataAlgebraElement::of_tree(t),
                           StrataAlgebraElement::of_tree(
                               strata_[top_codim() - d][j]));
      row.push_back(integrate(prod));
    }
    return pair_rows_[d].emplace(t, std::move(row)).first->second;
  }

  // canonical coordinates w.r.t. the chosen bases, one vector per codim
  std::vector<std::vector<Rational>> normal_form(
      const StrataAlgebraElement& a) {
    if (a.n != n_) throw std::invalid_argument("wrong mark count");
    const int top = top_codim();
    std::vector<std::vector<Rational>> coords(top + 1);
    for (int d = 0; d <= top; ++d)
      coords[d].assign(rank(d), Rational(0));
    for (auto& [t, c] : a.terms) {
      int d = t.edge_count();
      const auto& row = pairing_row(t);
      // accumulate <a, basisdual_j>
      for (int j = 0; j < rank(d); ++j) coords[d][j] += c * row[j];
    }
    // coords currently hold x_j = <a, dual_j>; with a = sum_i c_i b_i and
    // G_ij = <b_i, dual_j> this is x = G^T c, so c = (G^{-1})^T x
    for (int d = 0; d <= top; ++d) {
      std::vector<Rational> c(rank(d), Rational(0));
      for (int i = 0; i < rank(d); ++i)
        for (int j = 0; j < rank(d); ++j)
          c[i] += gram_inv_[d][j][i] * coords[d][j];
      coords[d] = std::move(c);
    }
    return coords;
  }

  bool is_zero(const StrataAlgebraElement& a) {
    for (auto& v : normal_form(a))
      for (auto& c : v)
        if (c != 0) return false;
    return true;
  }

  bool equal(const StrataAlgebraElement& a, const StrataAlgebraElement& b) {
    StrataAlgebraElement d = a;
    d += b * Rational(-1);
    return is_zero(d);
  }

  // diagonal class; coefficient block for codim d is the inverse transpose
  // of the Gram matrix between basis(d) and basis(top-d)
  const DiagonalClass& diagonal() {
    if (!diag_) {
      auto dc = std::make_unique<DiagonalClass>();
      dc->n = n_;
      const int top = top_codim();
      for (int d = 0; d <= top; ++d) {
        auto bd = basis(d);
        auto bc = basis(top - d);
        // gram_[d][i][j] = integral of bd[i] * bc[j]
        auto cinv = invert_matrix(transpose(gram_[d]));
        for (size_t i = 0; i < bd.size(); ++i)
          for (size_t j = 0; j < bc.size(); ++j)
            if (cinv[i][j] != 0)
              dc->pairs.emplace_back(bd[i], bc[j], cinv[i][j]);
      }
      diag_ = std::move(dc);
    }
    return *diag_;
  }

 private:
  static std::vector<std::vector<Rational>> transpose(
      const std::vector<std::vector<Rational>>& m) {
    if (m.empty()) return m;
    std::vector<std::vector<Rational>> r(m[0].size(),
                                         std::vector<Rational>(m.size()));
    for (size_t i = 0; i < m.size(); ++i)
      for (size_t j = 0; j < m[i].size(); ++j) r[j][i] = m[i][j];
    return r;
  }

  Rational pair_trees(const StableTree& a, const StableTree& b) {
    return integrate(multiply(StrataAlgebraElement::of_tree(a),
                              StrataAlgebraElement::of_tree(b)));
  }

  void select_bases(int d, int c) {
    // exact pairing matrix strata_d x strata_c, with modular shadow for the
    // greedy independence decisions
    const auto& rows_set = strata_[d];
    const auto& cols_set = strata_[c];
    std::vector<std::vector<Rational>> pm(rows_set.size());
    detail::ModEchelon row_ech;
    std::vector<int> rsel;
    for (size_t i = 0; i < rows_set.size(); ++i) {
      pm[i].resize(cols_set.size());
      std::vector<uint64_t> shadow(cols_set.size());
      for (size_t j = 0; j < cols_set.size(); ++j) {
        pm[i][j] = pair_trees(rows_set[i], cols_set[j]);
        shadow[j] = detail::mod_of(pm[i][j]);
      }
      if (row_ech.try_add(std::move(shadow))) rsel.push_back(int(i));
    }
    // greedy columns making the selected-row submatrix invertible
    detail::ModEchelon col_ech;
    std::vector<int> csel;
    for (size_t j = 0; j < cols_set.size(); ++j) {
      std::vector<uint64_t> v(rsel.size());
      for (size_t r = 0; r < rsel.size(); ++r)
        v[r] = detail::mod_of(pm[rsel[r]][j]);
      if (col_ech.try_add(std::move(v))) csel.push_back(int(j));
      if (csel.size() == rsel.size()) break;
    }
    if (csel.size() != rsel.size())
      throw std::runtime_error("pairing rank mismatch");
    basis_idx_[d] = rsel;
    gram_[d].assign(rsel.size(), std::vector<Rational>(csel.size()));
    for (size_t i = 0; i < rsel.size(); ++i)
      for (size_t j = 0; j < csel.size(); ++j)
        gram_[d][i][j] = pm[rsel[i]][csel[j]];
    if (d != c) {
      basis_idx_[c] = csel;
      // gram_[c][i][j] = integral of basis(c)[i] * basis(d)[j]
      gram_[c].assign(csel.size(), std::vector<Rational>(rsel.size()));
      for (size_t i = 0; i < csel.size(); ++i)
        for (size_t j = 0; j < rsel.size(); ++j)
          gram_[c][i][j] = pm[rsel[j]][csel[i]];
    } else {
      // middle codimension: coordinates solve against the same basis, so the
      // Gram we keep must pair basis(d) with basis(d): recompute on rsel
      gram_[d].assign(rsel.size(), std::vector<Rational>(rsel.size()));
      for (size_t i = 0; i < rsel.size(); ++i)
        for (size_t j = 0; j < rsel.size(); ++j)
          gram_[d][i][j] = pm[rsel[i]][rsel[j]];
    }
  }

  int n_;
  std::vector<std::vector<StableTree>> strata_;
  std::vector<std::vector<int>> basis_idx_;
  std::vector<std::vector<std::vector<Rational>>> gram_;      // basis(d) x basis(top-d)
  std::vector<std::vector<std::vector<Rational>>> gram_inv_;  // inverse of gram_[d]
  std::vector<std::map<StableTree, std::vector<Rational>>> pair_rows_;
  std::unique_ptr<DiagonalClass> diag_;
};

// Process-wide cache; construction of a ring is expensive for larger n.
// n == 8 is supported but costly, so it must be requested explicitly.
inline StrataRing& strata_ring(int n, bool allow_expensive = false) {
  if (n > 7 && !allow_expensive)
    throw std::invalid_argument(
        "n = 8 strata ring is expensive; request it explicitly");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<StrataRing>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<StrataRing>(n);
  return *slot;
}

}  // namespace frobten
