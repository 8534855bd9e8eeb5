#pragma once

#include "frobten/frobenius.hpp"
#include "frobten/strata.hpp"

namespace frobten {

// Index bookkeeping for H = H' (x) H'': product index p = a' * dim'' + a''.
struct TensorIndexMap {
  int dim1 = 0, dim2 = 0;

  TensorIndexMap(int d1, int d2) : dim1(d1), dim2(d2) {}
  int dim() const { return dim1 * dim2; }
  int to_product(int a, int b) const { return a * dim2 + b; }
  std::pair<int, int> to_pair(int p) const { return {p / dim2, p % dim2}; }

  GradedBasis product_basis(const GradedBasis& b1,
                            const GradedBasis& b2) const {
    GradedBasis b;
    for (int a = 0; a < dim1; ++a)
      for (int c = 0; c < dim2; ++c) {
        b.parities.push_back((b1.parity(a) + b2.parity(c)) & 1);
        b.labels.push_back(b1.label(a) + "." + b2.label(c));
      }
    return b;
  }
};

// g' (x) g'' with the usual sign for moving the second-factor element past
// the first: g(x(x)y, u(x)v) = (-1)^{|y||u|} g'(x,u) g''(y,v).
inline Metric tensor_metric(const FrobeniusModel<Rational>& m1,
                            const FrobeniusModel<Rational>& m2) {
  TensorIndexMap ix(m1.dim(), m2.dim());
  GradedBasis pb = ix.product_basis(m1.basis, m2.basis);
  std::vector<std::vector<Rational>> g(ix.dim(),
                                       std::vector<Rational>(ix.dim(), 0));
  for (int a = 0; a < m1.dim(); ++a)
    for (int b = 0; b < m2.dim(); ++b)
      for (int c = 0; c < m1.dim(); ++c)
        for (int d = 0; d < m2.dim(); ++d) {
          int sgn = (m2.basis.parity(b) && m1.basis.parity(c)) ? -1 : 1;
          g[ix.to_product(a, b)][ix.to_product(c, d)] =
              Rational(sgn) * m1.metric.g[a][c] * m2.metric.g[b][d];
        }
  return Metric(std::move(g), pb);
}

// Sign of de-interleaving (a1',a1''),...,(an',an'') into all primed followed
// by all double-primed factors.
template <class B1, class B2>
int tensor_interleave_sign(const std::vector<int>& a1,
                           const std::vector<int>& a2, const B1& b1,
                           const B2& b2) {
  int sign = 1;
  for (size_t j = 0; j < a1.size(); ++j)
    if (b1.parity(a1[j]) & 1) {
      int odd_before = 0;
      for (size_t i = 0; i < j; ++i)
        if (b2.parity(a2[i]) & 1) ++odd_before;
      if (odd_before & 1) sign = -sign;
    }
  return sign;
}

// The tensor-product correlators: Y_n on the product space is the evaluation
// of Y' (x) Y'' against the class of the diagonal of the n-marked moduli
// space, with the Koszul sign of regrouping the arguments.
template <class Scalar>
CorrelatorFamily<Scalar> tensor_correlators(const FrobeniusModel<Scalar>& m1,
                                            const FrobeniusModel<Scalar>& m2,
                                            int n_out,
                                            bool allow_expensive = false) {
  if (m1.truncation() < n_out || m2.truncation() < n_out)
    throw std::invalid_argument(
        "factor truncations must reach the requested order");
  TensorIndexMap ix(m1.dim(), m2.dim());
  GradedBasis pb = ix.product_basis(m1.basis, m2.basis);
  CorrelatorFamily<Scalar> out(pb, n_out);
  for (int n = 3; n <= n_out; ++n) {
    const DiagonalClass& diag = strata_ring(n, allow_expensive).diagonal();
    // per-tree evaluation caches for both factors
    std::map<StableTree, std::map<std::vector<int>, Scalar>> c1, c2;
    auto eval = [](const auto& model, const StableTree& t,
                   const std::vector<int>& a, auto& cache) {
      auto& slot = cache[t];
      auto it = slot.find(a);
      if (it != slot.end()) return it->second;
      Scalar v = operadic_correlator(model, t, a);
      slot.emplace(a, v);
      return v;
    };
    for_each_sorted_tuple(ix.dim(), n, pb, [&](const std::vector<int>& p) {
      std::vector<int> a1(n), a2(n);
      for (int i = 0; i < n; ++i) {
        auto [x, y] = ix.to_pair(p[i]);
        a1[i] = x;
        a2[i] = y;
      }
      int eps = tensor_interleave_sign(a1, a2, m1.basis, m2.basis);
      Scalar acc(0);
      for (auto& [s, t, c] : diag.pairs) {
        Scalar v1 = eval(m1, s, a1, c1);
        if (scalar_is_zero(v1)) continue;
        Scalar v2 = eval(m2, t, a2, c2);
        if (scalar_is_zero(v2)) continue;
        acc = acc + v1 * v2 * Scalar(c);
      }
      if (eps < 0) acc = Scalar(0) - acc;
      if (!scalar_is_zero(acc)) out.set(p, acc);
    });
  }
  return out;
}

// identity of the tensor product: d_{00} = d_0' (x) d_0''
inline int tensor_identity(const TensorIndexMap& ix, int id1, int id2) {
  return ix.to_product(id1, id2);
}

// Euler data of the tensor product: the two matrices act on their own
// factors, the double-counted diagonal weight d is subtracted, and the
// constant parts are carried into the identity slots of the other factor.
// Requires d0' = d0'' = d.
inline EulerData tensor_euler(const FrobeniusModel<Rational>& m1,
                              const FrobeniusModel<Rational>& m2) {
  if (!m1.euler || !m2.euler)
    throw std::invalid_argument("both factors need Euler data");
  if (!m1.identity || !m2.identity)
    throw std::invalid_argument("both factors need identities");
  if (m1.euler->d0 != m2.euler->d0)
    throw std::invalid_argument("factor identity weights must agree");
  const Rational d = m1.euler->d0;
  TensorIndexMap ix(m1.dim(), m2.dim());
  EulerData e;
  e.d.assign(ix.dim(), std::vector<Rational>(ix.dim(), 0));
  e.r.assign(ix.dim(), 0);
  for (int a = 0; a < m1.dim(); ++a)
    for (int b = 0; b < m2.dim(); ++b)
      for (int c = 0; c < m1.dim(); ++c)
        for (int f = 0; f < m2.dim(); ++f) {
          Rational v = 0;
          if (b == f) v += m1.euler->d[a][c];
          if (a == c) v += m2.euler->d[b][f];
          if (a == c && b == f) v -= d;
          e.d[ix.to_product(a, b)][ix.to_product(c, f)] = v;
        }
  for (int a = 0; a < m1.dim(); ++a)
    e.r[ix.to_product(a, *m2.identity)] += m1.euler->r[a];
  for (int b = 0; b < m2.dim(); ++b)
    e.r[ix.to_product(*m1.identity, b)] += m2.euler->r[b];
  e.D = m1.euler->D + m2.euler->D - 2 * d;
  e.d0 = d;
  return e;
}

// Assembled tensor model: metric, correlators, identity and Euler data when
// both factors carry them.
inline FrobeniusModel<Rational> tensor_model(const FrobeniusModel<Rational>& m1,
                                             const FrobeniusModel<Rational>& m2,
                                             int n_out,
                                             bool allow_expensive = false) {
  TensorIndexMap ix(m1.dim(), m2.dim());
  FrobeniusModel<Rational> out;
  out.basis = ix.product_basis(m1.basis, m2.basis);
  out.metric = tensor_metric(m1, m2);
  out.correlators = tensor_correlators(m1, m2, n_out, allow_expensive);
  if (m1.identity && m2.identity)
    out.identity = tensor_identity(ix, *m1.identity, *m2.identity);
  if (m1.euler && m2.euler && m1.identity && m2.identity &&
      m1.euler->d0 == m2.euler->d0)
    out.euler = tensor_euler(m1, m2);
  return out;
}

// The base-point connecting map theta_tau: a pair of factor shifts becomes a
// shift of the tensor model supported on the slots pairing each factor
// direction with the other factor's identity.
struct ThetaTau {
  TensorIndexMap ix;
  int id1, id2;

  ThetaTau(const TensorIndexMap& map, int identity1, int identity2)
      : ix(map), id1(identity1), id2(identity2) {}

  FormalShiftVector apply(const FormalShiftVector& s1,
                          const FormalShiftVector& s2) const {
    FormalShiftVector out;
    for (auto& [a, v] : s1.components)
      out.components[ix.to_product(a, id2)] += v;
    for (auto& [b, v] : s2.components)
      out.components[ix.to_product(id1, b)] += v;
    return out;
  }
};

// Compatibility of base-point shifts with the tensor product: shifting the
// factors formally and then tensoring agrees with tensoring first and then
// shifting along theta_tau, order by order up to the joint truncation.
inline CheckReport theta_tau_compatibility(const FrobeniusModel<Rational>& m1,
                                           const FrobeniusModel<Rational>& m2,
                                           int n_cmp) {
  if (!m1.identity || !m2.identity)
    throw std::invalid_argument("both factors need flat identities");
  if (m1.truncation() < n_cmp || m2.truncation() < n_cmp)
    throw std::invalid_argument("joint truncation exceeds the factors");
  CheckReport rep;
  const int var1 = 1000, var2 = 2000;
  FormalShiftVector s1, s2;
  for (int a = 0; a < m1.dim(); ++a)
    if (!m1.basis.parity(a)) s1.components[a] = Polynomial::var(var1 + a);
  for (int b = 0; b < m2.dim(); ++b)
    if (!m2.basis.parity(b)) s2.components[b] = Polynomial::var(var2 + b);

  auto lift = [](const FrobeniusModel<Rational>& m) {
    FrobeniusModel<Polynomial> p;
    p.basis = m.basis;
    p.metric = m.metric;
    p.correlators =
        m.correlators.map_values([](const Rational& r) { return Polynomial(r); });
    p.identity = m.identity;
    p.euler = m.euler;
    return p;
  };

  // shift factors, then tensor
  auto sm1 = lift(m1);
  sm1.correlators = shift_correlators(m1.correlators, s1);
  auto sm2 = lift(m2);
  sm2.correlators = shift_correlators(m2.correlators, s2);
  auto lhs = tensor_correlators(sm1, sm2, n_cmp);

  // tensor, then shift along theta_tau
  TensorIndexMap ix(m1.dim(), m2.dim());
  ThetaTau theta(ix, *m1.identity, *m2.identity);
  auto tens = tensor_correlators(lift(m1), lift(m2), n_cmp);
  auto rhs = shift_correlators(tens, theta.apply(s1, s2));

  GradedBasis pb = ix.product_basis(m1.basis, m2.basis);
  for (int n = 3; n <= n_cmp; ++n)
    for_each_sorted_tuple(ix.dim(), n, pb, [&](const std::vector<int>& p) {
      Polynomial l = lhs.get(p).truncated(n_cmp - n);
      Polynomial r = rhs.get(p).truncated(n_cmp - n);
      if (!(l == r))
        rep.violations.push_back({detail::loc_tuple<Polynomial>("theta-tau", p),
                                  l.to_string(), r.to_string()});
    });
  return rep;
}

}  // namespace frobten
