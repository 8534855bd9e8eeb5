#include <catch2/catch_amalgamated.hpp>

#include "frobten/rank_one.hpp"

using namespace frobten;

namespace {

RankOneTheory<Rational> theory(std::vector<Rational> c) {
  return RankOneTheory<Rational>(std::move(c));
}

Polynomial C1(int i) { return Polynomial::var(i); }
Polynomial C2(int j) { return Polynomial::var(100 + j); }

Polynomial reduced(int n) {
  std::map<int, Rational> unit = {{3, Rational(1)}, {103, Rational(1)}};
  return universal_polynomial(n).substitute(unit);
}

}  // namespace

TEST_CASE("u transform of the bare cubic is trivial") {
  auto u = u_transform(theory({1, 0, 0, 0}));
  REQUIRE(u.order() == 3);
  CHECK(u.B[0] == 1);
  CHECK(u.B[1] == 0);
  CHECK(u.B[2] == 0);
  CHECK(u.B[3] == 0);
}

TEST_CASE("u transform of the quadratic second derivative") {
  // Phi'' = x + x^2/2, i.e. C_3 = C_4 = 1
  auto u = u_transform(theory({1, 1, 0}));
  CHECK(u.B[0] == 1);
  CHECK(u.B[1] == -1);
  CHECK(u.B[2] == 3);
}

TEST_CASE("u transform round trip") {
  auto t = theory({1, Rational(2, 3), -5, Rational(7, 2), 0, 11});
  auto back = u_inverse_transform(u_transform(t), t.N);
  REQUIRE(back.N == t.N);
  for (int n = 3; n <= t.N; ++n) CHECK(back.coeff(n) == t.coeff(n));
}

TEST_CASE("u transform rejects unnormalized input") {
  CHECK_THROWS_AS(u_transform(theory({2, 1})), std::invalid_argument);
  CHECK_THROWS_AS(u_transform(theory({0, 1})), std::invalid_argument);
}

TEST_CASE("neg log u is additive under u multiplication") {
  auto u1 = u_transform(theory({1, 2, -1, Rational(1, 3)}));
  auto u2 = u_transform(theory({1, -3, 4, 0}));
  USeries<Rational> prod;
  prod.B = detail::series_mul(u1.B, u2.B, u1.order());
  auto l1 = neg_log_u(u1), l2 = neg_log_u(u2), lp = neg_log_u(prod);
  for (size_t k = 0; k < lp.size(); ++k) CHECK(lp[k] == l1[k] + l2[k]);
  auto unit = neg_log_u(u_transform(theory({1, 0, 0, 0})));
  for (auto& v : unit) CHECK(v == 0);
}

TEST_CASE("quartic tensor coefficient is additive") {
  auto t = tensor_rank1(theory({1, 2}), theory({1, 3}));
  CHECK(t.coeff(4) == 5);
}

TEST_CASE("quintic tensor coefficient with vanishing quintic inputs") {
  auto t = tensor_rank1(theory({1, 1, 0}), theory({1, 1, 0}));
  CHECK(t.coeff(5) == 5);
}

TEST_CASE("two non-invertible factors tensor to zero") {
  auto t = tensor_rank1(theory({0, 7, -2, 5}), theory({0, Rational(1, 3), 1, 4}));
  for (int n = 3; n <= t.N; ++n) CHECK(t.coeff(n) == 0);
}

TEST_CASE("tensor is commutative") {
  auto a = theory({2, 1, -1, Rational(5, 2)});
  auto b = theory({Rational(1, 3), 0, 4, -2});
  auto ab = tensor_rank1(a, b), ba = tensor_rank1(b, a);
  for (int n = 3; n <= ab.N; ++n) CHECK(ab.coeff(n) == ba.coeff(n));
  auto z = theory({0, 1, 2, 3});
  auto az = tensor_rank1(a, z), za = tensor_rank1(z, a);
  for (int n = 3; n <= az.N; ++n) CHECK(az.coeff(n) == za.coeff(n));
}

TEST_CASE("tensor is associative") {
  auto a = theory({1, 2, 0, -1});
  auto b = theory({3, Rational(1, 2), 1, 0});
  auto c = theory({Rational(-2, 5), 1, 1, 1});
  auto l = tensor_rank1(tensor_rank1(a, b), c);
  auto r = tensor_rank1(a, tensor_rank1(b, c));
  for (int n = 3; n <= l.N; ++n) CHECK(l.coeff(n) == r.coeff(n));
}

TEST_CASE("the unit cubic theory is neutral") {
  auto unit = theory({1, 0, 0, 0});
  for (auto& t : {theory({2, 1, -3, Rational(4, 7)}), theory({0, 5, 1, -1})}) {
    auto p = tensor_rank1(t, unit);
    for (int n = 3; n <= p.N; ++n) CHECK(p.coeff(n) == t.coeff(n));
  }
}

TEST_CASE("invertible tensor agrees with the universal polynomials") {
  auto a = theory({2, -1, 3, Rational(1, 2)});
  auto b = theory({Rational(3, 2), 4, 0, 1});
  auto t = tensor_rank1(a, b);
  for (int n = 3; n <= t.N; ++n) {
    std::map<int, Rational> vals;
    for (int i = 3; i <= n; ++i) {
      vals[i] = a.coeff(i);
      vals[100 + i] = b.coeff(i);
    }
    CHECK(universal_polynomial(n).substitute(vals).constant_term() ==
          t.coeff(n));
  }
}

TEST_CASE("explicit normalized tensor formulas through order seven") {
  CHECK(reduced(4) == C1(4) + C2(4));
  CHECK(reduced(5) == C1(5) + Rational(5) * C1(4) * C2(4) + C2(5));
  CHECK(reduced(6) ==
        C1(6) + Rational(8) * C1(4) * C1(4) * C2(4) +
            Rational(8) * C1(4) * C2(4) * C2(4) + Rational(9) * C1(4) * C2(5) +
            Rational(9) * C1(5) * C2(4) + C2(6));
  CHECK(reduced(7) ==
        C1(7) + (Rational(35) * C1(4) * C1(5) + Rational(14) * C1(6)) * C2(4) +
            Rational(61) * C1(4) * C1(4) * C2(4) * C2(4) +
            Rational(33) * C1(4) * C1(4) * C2(5) +
            Rational(33) * C1(5) * C2(4) * C2(4) +
            Rational(19) * C1(5) * C2(5) +
            C1(4) * (Rational(35) * C2(4) * C2(5) + Rational(14) * C2(6)) +
            C2(7));
}

TEST_CASE("bidegree and bilength balance of the universal polynomials") {
  for (int n = 3; n <= 8; ++n) {
    auto rep = universal_polynomial_constraints(n);
    INFO("n = " << n);
    CHECK(rep.pass());
  }
}

TEST_CASE("lowest universal polynomials") {
  CHECK(universal_polynomial(3) == C1(3) * C2(3));
  CHECK(universal_polynomial(4) ==
        C1(4) * C2(3) * C2(3) + C1(3) * C1(3) * C2(4));
}

TEST_CASE("coefficient law matches the diagonal pathway") {
  auto unit = theory({1, 0, 0, 0});
  CHECK(cross_validate(unit, unit, 6).pass());
  auto a = theory({1, Rational(2, 3), -1, 4});
  auto b = theory({1, 5, Rational(1, 2), -2});
  CHECK(cross_validate(a, b, 6).pass());
  auto c = theory({0, 3, 1, Rational(-1, 3)});
  CHECK(cross_validate(a, c, 6).pass());
  // scaled invertible factors exercise the normalization path
  auto d = theory({2, 1, -1, Rational(1, 5)});
  auto e = theory({Rational(-3, 2), 0, 2, 1});
  CHECK(cross_validate(d, e, 6).pass());
}

TEST_CASE("cross validation demands matching truncation") {
  CHECK_THROWS_AS(cross_validate(theory({1, 0}), theory({1, 0}), 6),
                  std::invalid_argument);
}
