#pragma once

#include <mutex>

#include "frobten/tensor.hpp"

namespace frobten {

// One-dimensional theory with unit metric: potential
//   Phi(x) = sum_{n >= 3} C_n x^n / n!
// truncated at order N.  C_3 may vanish; C_3 != 0 is the invertible case.
template <class Scalar = Rational>
struct RankOneTheory {
  int N = 3;               // top stored order
  std::vector<Scalar> C;   // C[k] = C_{k+3}, k = 0 .. N-3

  RankOneTheory() : N(3), C{Scalar(0)} {}
  explicit RankOneTheory(std::vector<Scalar> coeffs)
      : N(int(coeffs.size()) + 2), C(std::move(coeffs)) {
    if (C.empty())
      throw std::invalid_argument("rank-one theory needs at least C_3");
  }

  const Scalar& coeff(int n) const {
    if (n < 3 || n > N)
      throw std::out_of_range("coefficient index outside truncation");
    return C[n - 3];
  }
};

// U(eta) = sum_n B_n eta^n with B_0 = 1, carried to order N-3 for a theory
// truncated at order N.
template <class Scalar = Rational>
struct USeries {
  std::vector<Scalar> B;   // B[0] = 1

  int order() const { return int(B.size()) - 1; }
};

namespace detail {

// Dense truncated power series c[k] = coefficient of x^k, k = 0..M.

template <class S>
std::vector<S> series_mul(const std::vector<S>& a, const std::vector<S>& b,
                          int M) {
  std::vector<S> r(M + 1, S(0));
  for (int i = 0; i <= M && i < int(a.size()); ++i) {
    if (scalar_is_zero(a[i])) continue;
    for (int j = 0; i + j <= M && j < int(b.size()); ++j)
      r[i + j] = r[i + j] + a[i] * b[j];
  }
  return r;
}

// a(b(x)) truncated at order M; requires b[0] = 0
template <class S>
std::vector<S> series_compose(const std::vector<S>& a, const std::vector<S>& b,
                              int M) {
  std::vector<S> r(M + 1, S(0));
  for (int k = int(a.size()) - 1; k >= 0; --k) {
    r = series_mul(r, b, M);
    r[0] = r[0] + a[k];
  }
  return r;
}

// Compositional inverse of a(x) = x + O(x^2) to order M: the unique
// b(y) = y + O(y^2) with a(b(y)) = y.  Each pass of the fixed-point update
// b <- b - (a(b) - y) gains one order because a'(x) = 1 + O(x).
template <class S>
std::vector<S> series_invert(const std::vector<S>& a, int M) {
  if (a.size() < 2 || !scalar_is_zero(a[0]) || !(a[1] == S(1)))
    throw std::invalid_argument("series inversion needs a = x + O(x^2)");
  std::vector<S> b(M + 1, S(0));
  if (M >= 1) b[1] = S(1);
  for (int pass = 0; pass < M; ++pass) {
    std::vector<S> err = series_compose(a, b, M);
    err[1] = err[1] - S(1);  // a(b) - y
    bool clean = true;
    for (int k = 0; k <= M; ++k) {
      if (!scalar_is_zero(err[k])) clean = false;
      b[k] = b[k] - err[k];
    }
    if (clean) break;
  }
  return b;
}

}  // namespace detail

// The series form of the U-transform: with C_3 = 1 invert
// y = Phi''(x) = x + sum_{k>=2} C_{k+2} x^k / k! and read the coefficients
// off the normalization x = sum_n B_n y^{n+1} / (n+1)!.
template <class Scalar>
USeries<Scalar> u_transform(const RankOneTheory<Scalar>& t) {
  if (!(t.coeff(3) == Scalar(1)))
    throw std::invalid_argument("u_transform needs the normalization C_3 = 1");
  const int M = t.N - 2;  // order of x(y) needed for B_0 .. B_{N-3}
  std::vector<Scalar> a(M + 1, Scalar(0));
  a[1] = Scalar(1);
  for (int k = 2; k <= M; ++k)
    a[k] = (Rational(1) / factorial(k)) * t.coeff(k + 2);
  std::vector<Scalar> b = detail::series_invert(a, M);
  USeries<Scalar> u;
  u.B.resize(t.N - 2, Scalar(0));
  for (int n = 0; n <= t.N - 3; ++n) u.B[n] = factorial(n + 1) * b[n + 1];
  return u;
}

// Inverse of u_transform: rebuild the normalized potential of truncation N
// from U(eta) carried to order N-3.
template <class Scalar>
RankOneTheory<Scalar> u_inverse_transform(const USeries<Scalar>& u, int N) {
  if (u.order() < N - 3)
    throw std::invalid_argument("U series too short for the requested order");
  if (u.B.empty() || !(u.B[0] == Scalar(1)))
    throw std::invalid_argument("U series must start with B_0 = 1");
  const int M = N - 2;
  std::vector<Scalar> b(M + 1, Scalar(0));
  for (int n = 0; n <= N - 3; ++n)
    b[n + 1] = (Rational(1) / factorial(n + 1)) * u.B[n];
  std::vector<Scalar> a = detail::series_invert(b, M);
  std::vector<Scalar> c(N - 2, Scalar(0));
  for (int n = 3; n <= N; ++n) c[n - 3] = factorial(n - 2) * a[n - 2];
  return RankOneTheory<Scalar>(std::move(c));
}

// -log U(eta), order by order; its coefficients are the canonical-coordinate
// data attached to the theory.  Returned as a plain coefficient list.
template <class Scalar>
std::vector<Scalar> neg_log_u(const USeries<Scalar>& u) {
  const int M = u.order();
  std::vector<Scalar> v = u.B;
  v[0] = v[0] - Scalar(1);
  std::vector<Scalar> out(M + 1, Scalar(0));
  std::vector<Scalar> pw(M + 1, Scalar(0));
  pw[0] = Scalar(1);
  for (int k = 1; k <= M; ++k) {
    pw = detail::series_mul(pw, v, M);
    Rational w = Rational((k % 2) ? -1 : 1) / k;  // -log(1+v) = sum (-v)^k/k
    for (int j = 0; j <= M; ++j) out[j] = out[j] + w * pw[j];
  }
  return out;
}

// Universal tensor polynomials P_n: variable id i stands for C'_i and
// 100 + j for C''_j.  P_n is built from the normalized (C_3 = 1) product of
// U-series and the unique C_3-power restoration fixed by the bidegree and
// bilength balance: a monomial of bidegree (k', k'') and bilength (l', l'')
// must satisfy k' - 2l' = k'' - 2l'' = n - 2 and l' + l'' = n - 1.
inline const Polynomial& universal_polynomial(int n) {
  if (n < 3) throw std::invalid_argument("universal polynomials start at n = 3");
  static std::mutex mu;
  static std::map<int, Polynomial> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  auto symbolic = [n](int base) {
    std::vector<Polynomial> c(n - 2, Polynomial(0));
    c[0] = Polynomial(1);
    for (int i = 4; i <= n; ++i) c[i - 3] = Polynomial::var(base + i);
    return RankOneTheory<Polynomial>(std::move(c));
  };
  USeries<Polynomial> u1 = u_transform(symbolic(0));
  USeries<Polynomial> u2 = u_transform(symbolic(100));
  USeries<Polynomial> u;
  u.B = detail::series_mul(u1.B, u2.B, n - 3);
  Polynomial reduced = u_inverse_transform(u, n).coeff(n);

  Polynomial full;
  for (auto& [m, c] : reduced.terms()) {
    int k1 = 0, l1 = 0, k2 = 0, l2 = 0;
    for (auto& [v, e] : m) {
      if (v < 100) {
        k1 += v * int(e);
        l1 += int(e);
      } else {
        k2 += (v - 100) * int(e);
        l2 += int(e);
      }
    }
    int i = n - 2 - k1 + 2 * l1;
    int j = n - 2 - k2 + 2 * l2;
    if (i < 0 || j < 0)
      throw std::logic_error("negative restoration exponent in P_n");
    Polynomial term(c);
    for (auto& [v, e] : m) term *= Polynomial::var(v, e);
    term *= Polynomial::var(3, unsigned(i)) * Polynomial::var(103, unsigned(j));
    full += term;
  }
  return cache.emplace(n, std::move(full)).first->second;
}

// Verify the bidegree/bilength balance on every monomial of P_n.
inline CheckReport universal_polynomial_constraints(int n) {
  CheckReport rep;
  const Polynomial& p = universal_polynomial(n);
  for (auto& [m, c] : p.terms()) {
    int k1 = 0, l1 = 0, k2 = 0, l2 = 0;
    for (auto& [v, e] : m) {
      if (v < 100) {
        k1 += v * int(e);
        l1 += int(e);
      } else {
        k2 += (v - 100) * int(e);
        l2 += int(e);
      }
    }
    bool ok = (k1 - 2 * l1 == n - 2) && (k2 - 2 * l2 == n - 2) &&
              (l1 + l2 == n - 1);
    if (!ok) {
      Polynomial mono(c);
      for (auto& [v, e] : m) mono *= Polynomial::var(v, e);
      rep.violations.push_back(
          {"P_" + std::to_string(n), mono.to_string(),
           "bidegree (" + std::to_string(k1) + "," + std::to_string(k2) +
               ") bilength (" + std::to_string(l1) + "," + std::to_string(l2) +
               ")"});
    }
  }
  return rep;
}

// Tensor product of rank-one theories.  Invertible factors go through the
// multiplicative U-series law: the scaling C_i -> C_i / C_3^{i-2} normalizes
// C_3 to 1 while staying rational, and by the bidegree balance the product
// coefficients scale back as C_n -> (C_3' C_3'')^{n-2} C_n.  If either C_3
// vanishes the universal polynomials take over.
inline RankOneTheory<Rational> tensor_rank1(const RankOneTheory<Rational>& t1,
                                            const RankOneTheory<Rational>& t2) {
  const int N = std::min(t1.N, t2.N);
  const Rational c31 = t1.coeff(3), c32 = t2.coeff(3);
  std::vector<Rational> out(N - 2, Rational(0));
  if (c31 != 0 && c32 != 0) {
    auto normalize = [N](const RankOneTheory<Rational>& t) {
      std::vector<Rational> c(N - 2);
      Rational lam = Rational(1) / t.coeff(3), p = lam;
      for (int n = 3; n <= N; ++n) {
        c[n - 3] = p * t.coeff(n);
        p *= lam;
      }
      return RankOneTheory<Rational>(std::move(c));
    };
    USeries<Rational> u1 = u_transform(normalize(t1));
    USeries<Rational> u2 = u_transform(normalize(t2));
    USeries<Rational> u;
    u.B = detail::series_mul(u1.B, u2.B, N - 3);
    RankOneTheory<Rational> norm = u_inverse_transform(u, N);
    Rational mu = c31 * c32, p = mu;
    for (int n = 3; n <= N; ++n) {
      out[n - 3] = p * norm.coeff(n);
      p *= mu;
    }
  } else {
    for (int n = 3; n <= N; ++n) {
      std::map<int, Rational> vals;
      for (int i = 3; i <= n; ++i) {
        vals[i] = t1.coeff(i);
        vals[100 + i] = t2.coeff(i);
      }
      out[n - 3] = universal_polynomial(n).substitute(vals).constant_term();
    }
  }
  return RankOneTheory<Rational>(std::move(out));
}

// Embed a rank-one theory as a one-dimensional model with unit metric.
inline FrobeniusModel<Rational> rank1_model(const RankOneTheory<Rational>& t) {
  GradedBasis b = GradedBasis::even(1);
  FrobeniusModel<Rational> m;
  m.basis = b;
  m.metric = Metric({{Rational(1)}}, b);
  m.correlators = CorrelatorFamily<Rational>(b, t.N);
  for (int n = 3; n <= t.N; ++n)
    if (t.coeff(n) != 0) m.correlators.set(std::vector<int>(n, 0), t.coeff(n));
  return m;
}

// Oracle equivalence of the two tensor pathways: the coefficient law above
// against the full moduli-space diagonal evaluation, for all orders up to N.
inline CheckReport cross_validate(const RankOneTheory<Rational>& t1,
                                  const RankOneTheory<Rational>& t2, int N) {
  if (t1.N < N || t2.N < N)
    throw std::invalid_argument("factor truncations must reach N");
  CheckReport rep;
  RankOneTheory<Rational> fast = tensor_rank1(t1, t2);
  auto diag =
      tensor_correlators(rank1_model(t1), rank1_model(t2), N);
  for (int n = 3; n <= N; ++n) {
    Rational lhs = fast.coeff(n);
    Rational rhs = diag.get(std::vector<int>(n, 0));
    if (lhs != rhs)
      rep.violations.push_back({"C_" + std::to_string(n),
                                rational_to_string(lhs),
                                rational_to_string(rhs)});
  }
  return rep;
}

}  // namespace frobten
