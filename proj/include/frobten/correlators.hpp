#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "frobten/basis.hpp"
#include "frobten/koszul.hpp"
#include "frobten/polynomial.hpp"

namespace frobten {

// Generates all weakly increasing index tuples of the given length over
// 0..dim-1, skipping tuples where an odd index repeats (graded symmetry makes
// those correlators vanish identically).
inline void for_each_sorted_tuple(
    int dim, int len, const GradedBasis& basis,
    const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> t(len, 0);
  std::function<void(int, int)> rec = [&](int pos, int lo) {
    if (pos == len) {
      fn(t);
      return;
    }
    for (int a = lo; a < dim; ++a) {
      if (pos > 0 && t[pos - 1] == a && basis.parity(a)) continue;
      t[pos] = a;
      rec(pos + 1, a);
    }
  };
  rec(0, 0);
}

// The symmetric correlator family {Y_n}, 3 <= n <= truncation, with values in
// an exact scalar ring (Rational, or Polynomial for symbolic work).  Values
// are stored on sorted index tuples; access through any ordering picks up the
// Koszul sign of sorting.
template <class Scalar>
class CorrelatorFamily {
 public:
  CorrelatorFamily() = default;
  CorrelatorFamily(GradedBasis basis, int truncation)
      : basis_(std::move(basis)), trunc_(truncation) {
    if (trunc_ < 3) throw std::invalid_argument("truncation must be >= 3");
    store_.resize(trunc_ + 1);
  }

  const GradedBasis& basis() const { return basis_; }
  int dim() const { return basis_.dim(); }
  int truncation() const { return trunc_; }

  int tuple_parity(const std::vector<int>& idx) const {
    int p = 0;
    for (int a : idx) p ^= basis_.parity(a);
    return p;
  }

  void set(const std::vector<int>& idx, const Scalar& value) {
    check_arity(int(idx.size()));
    auto [sorted, sign] = sort_with_koszul_sign(
        idx, [&](int a) { return basis_.parity(a); });
    if (sign == 0 || tuple_parity(idx)) {
      if (!scalar_is_zero(value))
        throw std::invalid_argument(
            "correlator forced to vanish by graded symmetry cannot be set "
            "to a nonzero value");
      return;
    }
    Scalar v = sign == 1 ? value : Scalar(0) - value;
    if (scalar_is_zero(v))
      store_[idx.size()].erase(sorted);
    else
      store_[idx.size()][sorted] = v;
  }

  // correlator_get: evaluate Y_n on basis vectors in the given order.
  Scalar get(const std::vector<int>& idx) const {
    check_arity(int(idx.size()));
    if (tuple_parity(idx)) return Scalar(0);
    auto [sorted, sign] = sort_with_koszul_sign(
        idx, [&](int a) { return basis_.parity(a); });
    if (sign == 0) return Scalar(0);
    auto& m = store_[idx.size()];
    auto it = m.find(sorted);
    if (it == m.end()) return Scalar(0);
    return sign == 1 ? it->second : Scalar(0) - it->second;
  }

  const std::map<std::vector<int>, Scalar>& stored(int n) const {
    check_arity(n);
    return store_[n];
  }

  template <class Fn>
  CorrelatorFamily<std::invoke_result_t<Fn, Scalar>> map_values(Fn fn) const {
    CorrelatorFamily<std::invoke_result_t<Fn, Scalar>> out(basis_, trunc_);
    for (int n = 3; n <= trunc_; ++n)
      for (auto& [k, v] : store_[n]) out.set(k, fn(v));
    return out;
  }

  friend bool operator==(const CorrelatorFamily& a, const CorrelatorFamily& b) {
    return a.trunc_ == b.trunc_ && a.basis_.parities == b.basis_.parities &&
           a.store_ == b.store_;
  }

 private:
  void check_arity(int n) const {
    if (n < 3 || n > trunc_)
      throw std::out_of_range("correlator arity " + std::to_string(n) +
                              " outside 3.." + std::to_string(trunc_));
  }

  GradedBasis basis_;
  int trunc_ = 0;
  std::vector<std::map<std::vector<int>, Scalar>> store_;
};

// Formal shift vector: polynomial-valued components on even basis directions.
struct FormalShiftVector {
  std::map<int, Polynomial> components;  // basis index -> shift value
};

inline Polynomial to_polynomial(const Rational& r) { return Polynomial(r); }
inline Polynomial to_polynomial(const Polynomial& p) { return p; }

// Base-point shift of a correlator family: the shifted family collects, at
// each arity n, the sum over insertions of shifted directions
//   Yhat_n(a) = sum_{M>=0} (1/M!) sum_b s^{b_M}...s^{b_1} Y_{n+M}(a, b),
// truncated at the family's order (n + M <= truncation).  Shift components
// must sit on even directions.
template <class Scalar>
CorrelatorFamily<Polynomial> shift_correlators(
    const CorrelatorFamily<Scalar>& f, const FormalShiftVector& s) {
  const GradedBasis& basis = f.basis();
  std::vector<int> support;
  for (auto& [a, v] : s.components) {
    if (a < 0 || a >= basis.dim())
      throw std::invalid_argument("shift index out of range");
    if (basis.parity(a))
      throw std::invalid_argument("shift along an odd direction");
    if (!v.is_zero()) support.push_back(a);
  }
  const int N = f.truncation();
  CorrelatorFamily<Polynomial> out(basis, N);
  for (int n = 3; n <= N; ++n) {
    std::map<std::vector<int>, Polynomial> acc;
    for (auto& [key, val] : f.stored(n)) acc[key] += to_polynomial(val);
    // insertions: multisets b of shifted directions, |b| = M <= N - n
    for (int M = 1; n + M <= N; ++M) {
      // enumerate multisets over `support`
      std::vector<int> pick(M, 0);
      std::function<void(int, int)> rec = [&](int pos, int lo) {
        if (pos == M) {
          // weight = prod s_b / prod mult!
          Polynomial w(1);
          Rational denom = 1;
          int run = 1;
          for (int i = 0; i < M; ++i) {
            w *= s.components.at(support[pick[i]]);
            if (i > 0 && pick[i] == pick[i - 1])
              denom *= ++run;
            else
              run = 1;
          }
          w /= denom;
          std::vector<int> ext(n + M);
          for (int i = 0; i < M; ++i) ext[n + i] = support[pick[i]];
          for_each_sorted_tuple(basis.dim(), n, basis,
                                [&](const std::vector<int>& a) {
                                  for (int i = 0; i < n; ++i) ext[i] = a[i];
                                  Scalar y = f.get(ext);
                                  if (!scalar_is_zero(y)) {
                                    Polynomial add = to_polynomial(y) * w;
                                    acc[a] += add;
                                  }
                                });
          return;
        }
        for (int c = lo; c < int(support.size()); ++c) {
          pick[pos] = c;
          rec(pos + 1, c);
        }
      };
      if (!support.empty()) rec(0, 0);
    }
    for (auto& [k, v] : acc)
      if (!v.is_zero()) out.set(k, v);
  }
  return out;
}

// potential_view / correlators_from_potential: the generating potential as a
// commutative polynomial in the coordinates (even bases only; odd coordinates
// would not commute and correlators stay the primary representation).
template <class Scalar>
Polynomial potential_view(const CorrelatorFamily<Scalar>& f,
                          int var_offset = 0) {
  if (!f.basis().all_even())
    throw std::invalid_argument("potential_view requires an all-even basis");
  Polynomial phi;
  for (int n = 3; n <= f.truncation(); ++n) {
    for (auto& [key, val] : f.stored(n)) {
      Rational denom = 1;
      int run = 1;
      Polynomial mono(1);
      for (size_t i = 0; i < key.size(); ++i) {
        mono *= Polynomial::var(var_offset + key[i]);
        if (i > 0 && key[i] == key[i - 1])
          denom *= ++run;
        else
          run = 1;
      }
      phi += to_polynomial(val) * mono * Polynomial(Rational(1) / denom);
    }
  }
  return phi;
}

inline CorrelatorFamily<Rational> correlators_from_potential(
    const Polynomial& phi, const GradedBasis& basis, int truncation) {
  if (!basis.all_even())
    throw std::invalid_argument("potential requires an all-even basis");
  CorrelatorFamily<Rational> f(basis, truncation);
  for (auto& [m, c] : phi.terms()) {
    unsigned deg = Polynomial::degree(m);
    if (deg < 3)
      throw std::invalid_argument("potential has terms of degree < 3");
    if (int(deg) > truncation) continue;
    std::vector<int> key;
    Rational mult = 1;
    for (auto& [v, e] : m) {
      if (v < 0 || v >= basis.dim())
        throw std::invalid_argument("potential variable outside basis");
      for (unsigned k = 1; k <= e; ++k) {
        key.push_back(v);
        mult *= k;
      }
    }
    f.set(key, c * mult);
  }
  return f;
}

}  // namespace frobten
