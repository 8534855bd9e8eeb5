#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "frobten/rational.hpp"

namespace frobten {

// Sparse multivariate polynomial over Q.  Variables are integer ids; a
// monomial is a sorted (var, exponent>0) list, so polynomials with different
// variable sets mix freely.  Used wherever correlator values must stay
// symbolic (shift symbols, universal coefficient laws).
class Polynomial {
 public:
  using Monomial = std::vector<std::pair<int, unsigned>>;

  Polynomial() = default;
  /*implicit*/ Polynomial(const Rational& c) {
    if (c != 0) terms_[Monomial{}] = c;
  }
  /*implicit*/ Polynomial(int c) : Polynomial(Rational(c)) {}

  static Polynomial var(int id, unsigned exp = 1) {
    Polynomial p;
    if (exp == 0) return Polynomial(1);
    p.terms_[Monomial{{id, exp}}] = 1;
    return p;
  }

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && terms_.begin()->first.empty());
  }
  Rational constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  static unsigned degree(const Monomial& m) {
    unsigned d = 0;
    for (auto& [v, e] : m) d += e;
    return d;
  }
  unsigned total_degree() const {
    unsigned d = 0;
    for (auto& [m, c] : terms_) d = std::max(d, degree(m));
    return d;
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  Polynomial operator-() const {
    Polynomial r;
    for (auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (auto& [ma, ca] : a.terms_)
      for (auto& [mb, cb] : b.terms_) r.add_term(mul_mono(ma, mb), ca * cb);
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend Polynomial operator*(const Rational& c, const Polynomial& p) {
    Polynomial r;
    if (c == 0) return r;
    for (auto& [m, pc] : p.terms_) r.terms_[m] = c * pc;
    return r;
  }
  Polynomial& operator*=(const Rational& c) { return *this = c * *this; }
  Polynomial& operator/=(const Rational& c) { return *this = Rational(1) / c * *this; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) {
    return !(a == b);
  }

  // drop every monomial of total degree > d
  Polynomial truncated(unsigned d) const {
    Polynomial r;
    for (auto& [m, c] : terms_)
      if (degree(m) <= d) r.terms_[m] = c;
    return r;
  }

  // substitute rationals for (a subset of) the variables
  Polynomial substitute(const std::map<int, Rational>& vals) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
      Rational coeff = c;
      Monomial rest;
      for (auto& [v, e] : m) {
        auto it = vals.find(v);
        if (it == vals.end()) {
          rest.emplace_back(v, e);
        } else {
          for (unsigned k = 0; k < e; ++k) coeff *= it->second;
        }
      }
      if (coeff != 0) r.add_term(rest, coeff);
    }
    return r;
  }

  // substitute polynomials for variables
  Polynomial substitute_poly(const std::map<int, Polynomial>& vals) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
      Polynomial t(c);
      for (auto& [v, e] : m) {
        auto it = vals.find(v);
        Polynomial base = it == vals.end() ? var(v) : it->second;
        for (unsigned k = 0; k < e; ++k) t *= base;
      }
      r += t;
    }
    return r;
  }

  Polynomial derivative(int v) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
      for (size_t i = 0; i < m.size(); ++i) {
        if (m[i].first != v) continue;
        Monomial dm = m;
        Rational dc = c * int(m[i].second);
        if (--dm[i].second == 0) dm.erase(dm.begin() + i);
        r.add_term(dm, dc);
        break;
      }
    }
    return r;
  }

  std::vector<int> variables() const {
    std::vector<int> vs;
    for (auto& [m, c] : terms_)
      for (auto& [v, e] : m)
        if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
    std::sort(vs.begin(), vs.end());
    return vs;
  }

  // deterministic rendering; name(v) maps a variable id to its display name
  template <class NameFn>
  std::string to_string(NameFn name) const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto& [m, c] : terms_) {
      std::string t;
      Rational ca = c < 0 ? Rational(-c) : c;
      if (m.empty() || ca != 1) t += rational_to_string(ca);
      for (auto& [v, e] : m) {
        if (!t.empty()) t += "*";
        t += name(v);
        if (e > 1) t += "^" + std::to_string(e);
      }
      if (out.empty())
        out = (c < 0 ? "-" : "") + t;
      else
        out += (c < 0 ? " - " : " + ") + t;
    }
    return out;
  }
  std::string to_string() const {
    return to_string([](int v) { return "t" + std::to_string(v); });
  }

  friend bool operator<(const Polynomial& a, const Polynomial& b) {
    return a.terms_ < b.terms_;
  }

 private:
  static Monomial mul_mono(const Monomial& a, const Monomial& b) {
    Monomial r;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
        r.push_back(a[i++]);
      else if (i == a.size() || b[j].first < a[i].first)
        r.push_back(b[j++]);
      else {
        r.emplace_back(a[i].first, a[i].second + b[j].second);
        ++i, ++j;
      }
    }
    return r;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  std::map<Monomial, Rational> terms_;
};

// Scalar concept helpers shared by Rational / Polynomial instantiations.
inline bool scalar_is_zero(const Rational& r) { return r == 0; }
inline bool scalar_is_zero(const Polynomial& p) { return p.is_zero(); }
inline std::string scalar_to_string(const Rational& r) {
  return rational_to_string(r);
}
inline std::string scalar_to_string(const Polynomial& p) {
  return p.to_string();
}

}  // namespace frobten
