#pragma once

#include <optional>
#include <sstream>

#include "frobten/correlators.hpp"
#include "frobten/report.hpp"
#include "frobten/trees.hpp"

namespace frobten {

// Euler data for E = sum_{a,b} d_{ab} x^a d_b + sum_a r^a d_a, together with
// the conformal weight D and the weight d0 of flat vector fields.
struct EulerData {
  std::vector<std::vector<Rational>> d;
  std::vector<Rational> r;
  Rational D;
  Rational d0;
};

template <class Scalar = Rational>
struct FrobeniusModel {
  GradedBasis basis;
  Metric metric;
  CorrelatorFamily<Scalar> correlators;
  std::optional<int> identity;   // basis index of the flat identity
  std::optional<EulerData> euler;

  int dim() const { return basis.dim(); }
  int truncation() const { return correlators.truncation(); }
};

template <class Scalar>
void validate_model(const FrobeniusModel<Scalar>& m) {
  if (m.metric.dim() != m.dim())
    throw std::invalid_argument("metric dimension mismatch");
  if (m.correlators.dim() != m.dim())
    throw std::invalid_argument("correlator dimension mismatch");
  if (m.identity && (*m.identity < 0 || *m.identity >= m.dim()))
    throw std::invalid_argument("identity index out of range");
  if (m.identity && m.basis.parity(*m.identity))
    throw std::invalid_argument("identity must be even");
  if (m.euler) {
    auto& e = *m.euler;
    if (int(e.d.size()) != m.dim() || int(e.r.size()) != m.dim())
      throw std::invalid_argument("euler data dimension mismatch");
    for (int a = 0; a < m.dim(); ++a) {
      if (int(e.d[a].size()) != m.dim())
        throw std::invalid_argument("euler matrix not square");
      for (int b = 0; b < m.dim(); ++b)
        if (m.basis.parity(a) != m.basis.parity(b) && e.d[a][b] != 0)
          throw std::invalid_argument("euler matrix must preserve parity");
      if (m.basis.parity(a) && e.r[a] != 0)
        throw std::invalid_argument("constant Euler part must be even");
    }
  }
}

namespace detail {

template <class Scalar>
std::string loc_tuple(const std::string& what, const std::vector<int>& idx) {
  std::ostringstream os;
  os << what << "(";
  for (size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i];
  os << ")";
  return os.str();
}

}  // namespace detail

// The associativity equations as exact coefficient identities among the
// correlators: for every index quadruple and every spectator multiset that
// the truncation can represent,
//   sum_{e,f} Phi_abe g^{ef} Phi_fcd = (-1)^{pa(pb+pc)} (a <-> b, c fixed...)
// expanded through the correlator series of the third derivatives.
template <class Scalar>
CheckReport wdvv_check(const FrobeniusModel<Scalar>& m) {
  validate_model(m);
  CheckReport rep;
  const int dim = m.dim(), N = m.truncation();
  auto par = [&](int a) { return m.basis.parity(a); };
  auto side = [&](int a, int b, int c, int d, const std::vector<int>& spec) {
    Scalar acc(0);
    const int mlen = int(spec.size());
    for (uint32_t T = 0; T < (1u << mlen); ++T) {
      std::vector<bool> take(mlen);
      std::vector<int> left = {a, b}, right;
      for (int i = 0; i < mlen; ++i) {
        take[i] = (T >> i) & 1u;
        if (take[i]) left.push_back(spec[i]);
      }
      int eps = unshuffle_sign(spec, take, par);
      if (eps == 0) continue;
      for (int e = 0; e < dim; ++e) {
        std::vector<int> lh = left;
        lh.push_back(e);
        Scalar yl = m.correlators.get(lh);
        if (scalar_is_zero(yl)) continue;
        for (int f = 0; f < dim; ++f) {
          if (m.metric.ginv[e][f] == 0) continue;
          std::vector<int> rh = {f, c, d};
          for (int i = 0; i < mlen; ++i)
            if (!take[i]) rh.push_back(spec[i]);
          Scalar yr = m.correlators.get(rh);
          if (scalar_is_zero(yr)) continue;
          Scalar term = yl * Scalar(m.metric.ginv[e][f]) * yr;
          if (eps < 0) term = Scalar(0) - term;
          acc = acc + term;
        }
      }
    }
    return acc;
  };
  for (int mdeg = 0; mdeg <= N - 3; ++mdeg) {
    for_each_sorted_tuple(dim, mdeg, m.basis, [&](const std::vector<int>& spec) {
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          for (int c = 0; c < dim; ++c)
            for (int d = 0; d < dim; ++d) {
              Scalar lhs = side(a, b, c, d, spec);
              Scalar rhs = side(b, c, a, d, spec);
              if (par(a) && (par(b) ^ par(c))) rhs = Scalar(0) - rhs;
              if (!(lhs == rhs)) {
                std::vector<int> loc = {a, b, c, d};
                loc.insert(loc.end(), spec.begin(), spec.end());
                rep.violations.push_back({detail::loc_tuple<Scalar>("wdvv", loc),
                                          scalar_to_string(lhs),
                                          scalar_to_string(rhs)});
              }
            }
    });
  }
  return rep;
}

// The coherence form of associativity: for every tuple and every four marked
// positions, the two-part partition sums agree across the three pairings.
template <class Scalar>
CheckReport coherence_check(const FrobeniusModel<Scalar>& m) {
  validate_model(m);
  CheckReport rep;
  const int dim = m.dim(), N = m.truncation();
  auto par = [&](int a) { return m.basis.parity(a); };
  for (int n = 4; n <= N + 1; ++n) {
    for_each_sorted_tuple(dim, n, m.basis, [&](const std::vector<int>& c) {
      // partition sum with positions p,q forced into the first part and
      // r,s into the second
      auto psum = [&](int p, int q, int r, int s) {
        Scalar acc(0);
        std::vector<int> rest;
        for (int i = 0; i < n; ++i)
          if (i != p && i != q && i != r && i != s) rest.push_back(i);
        const int k = int(rest.size());
        for (uint32_t T = 0; T < (1u << k); ++T) {
          std::vector<bool> take(n, false);
          take[p] = take[q] = true;
          for (int i = 0; i < k; ++i)
            if ((T >> i) & 1u) take[rest[i]] = true;
          std::vector<int> vals, left, right;
          for (int i = 0; i < n; ++i) {
            vals.push_back(c[i]);
            (take[i] ? left : right).push_back(c[i]);
          }
          std::vector<bool> takev(take.begin(), take.end());
          int eps = unshuffle_sign(vals, takev, par);
          if (eps == 0) continue;
          for (int e = 0; e < dim; ++e) {
            std::vector<int> lh = left;
            lh.push_back(e);
            Scalar yl = m.correlators.get(lh);
            if (scalar_is_zero(yl)) continue;
            for (int f = 0; f < dim; ++f) {
              if (m.metric.ginv[e][f] == 0) continue;
              std::vector<int> rh = {f};
              rh.insert(rh.end(), right.begin(), right.end());
              Scalar yr = m.correlators.get(rh);
              if (scalar_is_zero(yr)) continue;
              Scalar term = yl * Scalar(m.metric.ginv[e][f]) * yr;
              if (eps < 0) term = Scalar(0) - term;
              acc = acc + term;
            }
          }
        }
        return acc;
      };
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q)
          for (int r = q + 1; r < n; ++r)
            for (int s = r + 1; s < n; ++s) {
              Scalar ab = psum(p, q, r, s);
              Scalar ac = psum(p, r, q, s);
              Scalar ad = psum(p, s, q, r);
              if (!(ab == ac) || !(ab == ad)) {
                std::vector<int> loc = c;
                rep.violations.push_back(
                    {detail::loc_tuple<Scalar>("coherence", loc),
                     scalar_to_string(ab),
                     scalar_to_string(ac) + ";" + scalar_to_string(ad)});
              }
            }
    });
  }
  return rep;
}

// Flat identity: Y_3(a, b, e) = g_ab and higher insertions of e vanish.
template <class Scalar>
CheckReport flat_identity_check(const FrobeniusModel<Scalar>& m) {
  validate_model(m);
  if (!m.identity)
    throw std::invalid_argument("model carries no identity index");
  CheckReport rep;
  const int e = *m.identity, dim = m.dim(), N = m.truncation();
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      Scalar y = m.correlators.get({a, b, e});
      if (!(y == Scalar(m.metric.g[a][b])))
        rep.violations.push_back({detail::loc_tuple<Scalar>("identity", {a, b, e}),
                                  scalar_to_string(y),
                                  rational_to_string(m.metric.g[a][b])});
    }
  for (int n = 4; n <= N; ++n)
    for (auto& [key, val] : m.correlators.stored(n)) {
      if (std::find(key.begin(), key.end(), e) == key.end()) continue;
      if (!scalar_is_zero(val))
        rep.violations.push_back({detail::loc_tuple<Scalar>("identity", key),
                                  scalar_to_string(val), "0"});
    }
  return rep;
}

// Conformality of the Euler field w.r.t. the metric (exact linear algebra).
template <class Scalar>
CheckReport conformality_check(const FrobeniusModel<Scalar>& m) {
  validate_model(m);
  if (!m.euler) throw std::invalid_argument("model carries no Euler data");
  CheckReport rep;
  const auto& e = *m.euler;
  const int dim = m.dim();
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      Rational lhs = 0;
      for (int c = 0; c < dim; ++c)
        lhs += e.d[a][c] * m.metric.g[c][b] + e.d[b][c] * m.metric.g[a][c];
      Rational rhs = e.D * m.metric.g[a][b];
      if (lhs != rhs)
        rep.violations.push_back({detail::loc_tuple<Scalar>("conformality", {a, b}),
                                  rational_to_string(lhs),
                                  rational_to_string(rhs)});
    }
  return rep;
}

// V = [ . , E] - D/2 as a matrix on flat fields; conformality makes it
// skew with respect to g.
inline std::vector<std::vector<Rational>> v_matrix(const EulerData& e,
                                                   int dim, const Rational& D) {
  std::vector<std::vector<Rational>> v(e.d);
  for (int a = 0; a < dim; ++a) v[a][a] -= D / 2;
  return v;
}

template <class Scalar>
CheckReport v_skewness_check(const FrobeniusModel<Scalar>& m) {
  validate_model(m);
  if (!m.euler) throw std::invalid_argument("model carries no Euler data");
  CheckReport rep;
  const int dim = m.dim();
  auto v = v_matrix(*m.euler, dim, m.euler->D);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      Rational s = 0;
      for (int c = 0; c < dim; ++c)
        s += v[a][c] * m.metric.g[c][b] + v[b][c] * m.metric.g[a][c];
      if (s != 0)
        rep.violations.push_back({detail::loc_tuple<Scalar>("v-skew", {a, b}),
                                  rational_to_string(s), "0"});
    }
  return rep;
}

// Quasi-homogeneity in correlator form: for each arity and tuple,
//   sum_a (sum_i d_{a_i a} Y_n(..hat i.., a) + r^a Y_{n+1}(..., a))
//     = (d0 + D) Y_n(...).
// The r-term consumes one arity, so with r != 0 the top arity is only
// reported as unverifiable.
template <class Scalar>
CheckReport quasi_homogeneity_check(const FrobeniusModel<Scalar>& m) {
  validate_model(m);
  if (!m.euler) throw std::invalid_argument("model carries no Euler data");
  CheckReport rep;
  const auto& eu = *m.euler;
  const int dim = m.dim(), N = m.truncation();
  bool has_r = false;
  for (auto& r : eu.r) has_r = has_r || r != 0;
  for (int n = 3; n <= N; ++n) {
    if (has_r && n + 1 > N) {
      rep.unverifiable.push_back(
          "quasi-homogeneity at arity " + std::to_string(n) +
          ": r-term requires order " + std::to_string(n + 1));
      continue;
    }
    for_each_sorted_tuple(dim, n, m.basis, [&](const std::vector<int>& t) {
      Scalar lhs(0);
      for (int a = 0; a < dim; ++a) {
        for (int i = 0; i < n; ++i) {
          if (eu.d[t[i]][a] == 0) continue;
          std::vector<int> mod;
          for (int j = 0; j < n; ++j)
            if (j != i) mod.push_back(t[j]);
          mod.push_back(a);
          Scalar y = m.correlators.get(mod);
          if (!scalar_is_zero(y)) lhs = lhs + Scalar(eu.d[t[i]][a]) * y;
        }
        if (has_r && eu.r[a] != 0) {
          std::vector<int> ext = t;
          ext.push_back(a);
          Scalar y = m.correlators.get(ext);
          if (!scalar_is_zero(y)) lhs = lhs + Scalar(eu.r[a]) * y;
        }
      }
      Scalar rhs = Scalar(eu.d0 + eu.D) * m.correlators.get(t);
      if (!(lhs == rhs))
        rep.violations.push_back({detail::loc_tuple<Scalar>("quasi-homogeneity", t),
                                  scalar_to_string(lhs),
                                  scalar_to_string(rhs)});
    });
  }
  return rep;
}

// --- operadic correlators -------------------------------------------------

// Y(tau) evaluated on basis vectors attached to the tails: tensor the vertex
// correlators and contract every edge with the Casimir of g.  The all-even
// fast path eliminates edges bottom-up; the graded path sums assignments
// with explicit Koszul signs.
template <class Scalar>
Scalar operadic_correlator(const FrobeniusModel<Scalar>& m,
                           const StableTree& tree,
                           const std::vector<int>& idx) {
  if (int(idx.size()) != tree.n)
    throw std::invalid_argument("index tuple does not match tail count");
  const int dim = m.dim(), N = m.truncation();
  TreeStructure s = tree_structure(tree);
  for (int v = 0; v < s.vertex_count(); ++v)
    if (s.flag_count(v) > N)
      throw std::out_of_range("vertex arity exceeds truncation");

  if (m.basis.all_even()) {
    // bottom-up elimination: child vertex v reports, for each value of the
    // index on its parent edge, the contracted subtree value
    std::function<std::vector<Scalar>(int)> up = [&](int v) {
      std::vector<std::vector<Scalar>> childvec;
      for (int c : s.children[v]) {
        auto raw = up(c);
        // pass through the Casimir: w[p] = sum_q g^{pq} val[q]
        std::vector<Scalar> w(dim, Scalar(0));
        for (int p = 0; p < dim; ++p)
          for (int q = 0; q < dim; ++q)
            if (m.metric.ginv[p][q] != 0)
              w[p] = w[p] + Scalar(m.metric.ginv[p][q]) * raw[q];
        childvec.push_back(std::move(w));
      }
      const int k = int(childvec.size());
      const bool root = s.parent[v] < 0;
      std::vector<Scalar> out(root ? 1 : dim, Scalar(0));
      std::vector<int> args;
      for (int t : s.tails[v]) args.push_back(idx[t]);
      const size_t base = args.size();
      args.resize(base + (root ? 0 : 1) + k);
      std::vector<int> e(k, 0);
      auto eval = [&](int parent_index) {
        size_t pos = base;
        if (!root) args[pos++] = parent_index;
        for (int i = 0; i < k; ++i) args[pos + i] = e[i];
        Scalar y = m.correlators.get(args);
        if (scalar_is_zero(y)) return Scalar(0);
        for (int i = 0; i < k; ++i) y = y * childvec[i][e[i]];
        return y;
      };
      // iterate child-edge assignments
      while (true) {
        if (root)
          out[0] = out[0] + eval(0);
        else
          for (int b = 0; b < dim; ++b) out[b] = out[b] + eval(b);
        int i = 0;
        for (; i < k; ++i) {
          if (++e[i] < dim) break;
          e[i] = 0;
        }
        if (i == k) break;
      }
      return out;
    };
    return up(0)[0];
  }

  // graded path: explicit sum over edge assignments with Koszul signs
  const int n = tree.n;
  // edges sorted by split mask; edge j joins parent u_j and child w_j
  std::vector<std::pair<uint32_t, int>> edges;  // (mask, child vertex)
  for (int v = 1; v < s.vertex_count(); ++v) edges.emplace_back(s.vsplit[v], v);
  std::sort(edges.begin(), edges.end());
  const int E = int(edges.size());
  // target order: vertices 0..m, flags per vertex: tails ascending then
  // incident edges ascending by mask, each contributing its half (p at the
  // parent-side vertex, q at the child side)
  std::vector<std::vector<int>> vertex_sources(s.vertex_count());
  for (int v = 0; v < s.vertex_count(); ++v) {
    for (int t : s.tails[v]) vertex_sources[v].push_back(t);
    std::vector<std::pair<uint32_t, int>> inc;  // (mask, source position)
    for (int j = 0; j < E; ++j) {
      auto [mask, child] = edges[j];
      if (s.parent[child] == v) inc.emplace_back(mask, n + 2 * j);     // p_j
      if (child == v) inc.emplace_back(mask, n + 2 * j + 1);           // q_j
    }
    std::sort(inc.begin(), inc.end());
    for (auto& [mask, src] : inc) vertex_sources[v].push_back(src);
  }
  std::vector<int> perm(n + 2 * E);
  {
    int pos = 0;
    for (int v = 0; v < s.vertex_count(); ++v)
      for (int src : vertex_sources[v]) perm[src] = pos++;
  }
  Scalar total(0);
  std::vector<int> assign(2 * E, 0);  // p_0,q_0,p_1,q_1,...
  while (true) {
    Rational gfac = 1;
    for (int j = 0; j < E; ++j)
      gfac *= m.metric.ginv[assign[2 * j]][assign[2 * j + 1]];
    if (gfac != 0) {
      std::vector<int> pars(n + 2 * E);
      for (int i = 0; i < n; ++i) pars[i] = m.basis.parity(idx[i]);
      for (int j = 0; j < 2 * E; ++j)
        pars[n + j] = m.basis.parity(assign[j]);
      int sign = koszul_sign(perm, pars);
      Scalar prod(1);
      bool zero = false;
      for (int v = 0; v < s.vertex_count() && !zero; ++v) {
        std::vector<int> args;
        for (int src : vertex_sources[v])
          args.push_back(src < n ? idx[src] : assign[src - n]);
        Scalar y = m.correlators.get(args);
        if (scalar_is_zero(y))
          zero = true;
        else
          prod = prod * y;
      }
      if (!zero) {
        Scalar term = prod * Scalar(gfac);
        if (sign < 0) term = Scalar(0) - term;
        total = total + term;
      }
    }
    int i = 0;
    for (; i < 2 * E; ++i) {
      if (++assign[i] < dim) break;
      assign[i] = 0;
    }
    if (i == 2 * E || E == 0) break;
  }
  return total;
}

// Operadic flat identity: inserting the identity at the last tail agrees
// with the stabilized pushforward; checked per tree.
template <class Scalar>
CheckReport operadic_flat_identity_check(const FrobeniusModel<Scalar>& m,
                                         const StableTree& tree) {
  if (!m.identity)
    throw std::invalid_argument("model carries no identity index");
  CheckReport rep;
  const int n = tree.n, dim = m.dim();
  if (n - 1 < 3) throw std::invalid_argument("tree too small");
  auto pushed = pushforward(tree, n - 1);
  for_each_sorted_tuple(dim, n - 1, m.basis, [&](const std::vector<int>& a) {
    std::vector<int> full = a;
    full.push_back(*m.identity);
    Scalar lhs = operadic_correlator(m, tree, full);
    Scalar rhs = pushed ? operadic_correlator(m, *pushed, a) : Scalar(0);
    if (!(lhs == rhs))
      rep.violations.push_back(
          {detail::loc_tuple<Scalar>("operadic-identity", a),
           scalar_to_string(lhs), scalar_to_string(rhs)});
  });
  return rep;
}

// Quasi-homogeneity for operadic correlators (tree form): the edge count
// enters through the d0-weight of the Casimir insertions.
template <class Scalar>
CheckReport operadic_quasi_homogeneity_check(const FrobeniusModel<Scalar>& m,
                                             const StableTree& tree) {
  validate_model(m);
  if (!m.euler) throw std::invalid_argument("model carries no Euler data");
  CheckReport rep;
  const auto& eu = *m.euler;
  const int dim = m.dim(), N = m.truncation(), n = tree.n;
  bool has_r = false;
  for (auto& r : eu.r) has_r = has_r || r != 0;
  std::vector<StableTree> pulled;
  if (has_r) {
    // each pullback term must stay within truncation at every vertex
    for (auto& u : pullback(tree, n)) {
      auto us = tree_structure(u);
      for (int v = 0; v < us.vertex_count(); ++v)
        if (us.flag_count(v) > N) {
          rep.unverifiable.push_back(
              "operadic quasi-homogeneity: r-term exceeds truncation");
          return rep;
        }
      pulled.push_back(u);
    }
  }
  for_each_sorted_tuple(dim, n, m.basis, [&](const std::vector<int>& t) {
    Scalar lhs(0);
    for (int a = 0; a < dim; ++a) {
      for (int i = 0; i < n; ++i) {
        if (eu.d[t[i]][a] == 0) continue;
        std::vector<int> mod;
        for (int j = 0; j < n; ++j)
          if (j != i) mod.push_back(t[j]);
        mod.push_back(a);
        // the replaced argument sits at tail i; evaluate with argument a at
        // tail position i to keep tails aligned
        std::vector<int> arranged = t;
        arranged[i] = a;
        Scalar y = operadic_correlator(m, tree, arranged);
        // reordering sign: moving a from position i to the end among the
        // remaining arguments; even Euler data keeps parities matched
        (void)mod;
        if (!scalar_is_zero(y)) lhs = lhs + Scalar(eu.d[t[i]][a]) * y;
      }
      if (has_r && eu.r[a] != 0) {
        std::vector<int> ext = t;
        ext.push_back(a);
        Scalar acc(0);
        for (auto& u : pulled) acc = acc + operadic_correlator(m, u, ext);
        if (!scalar_is_zero(acc)) lhs = lhs + Scalar(eu.r[a]) * acc;
      }
    }
    Scalar y0 = operadic_correlator(m, tree, t);
    Scalar rhs = Scalar(eu.d0 + eu.D + Rational(tree.edge_count()) * eu.d0) * y0;
    if (!(lhs == rhs))
      rep.violations.push_back(
          {detail::loc_tuple<Scalar>("operadic-quasi-homogeneity", t),
           scalar_to_string(lhs), scalar_to_string(rhs)});
  });
  return rep;
}

// k-fold product on the tangent space: components of the product of the
// given basis directions, read off from Y_{k+1} through the metric.
template <class Scalar>
std::vector<Scalar> higher_product(const FrobeniusModel<Scalar>& m,
                                   const std::vector<int>& gammas) {
  if (int(gammas.size()) + 1 < 3 || int(gammas.size()) + 1 > m.truncation())
    throw std::out_of_range("product arity outside truncation");
  const int dim = m.dim();
  std::vector<Scalar> out(dim, Scalar(0));
  for (int d = 0; d < dim; ++d) {
    std::vector<int> args = gammas;
    args.push_back(d);
    Scalar y = m.correlators.get(args);
    if (scalar_is_zero(y)) continue;
    for (int c = 0; c < dim; ++c)
      if (m.metric.ginv[d][c] != 0)
        out[c] = out[c] + y * Scalar(m.metric.ginv[d][c]);
  }
  return out;
}

}  // namespace frobten
