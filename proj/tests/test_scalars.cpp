#include <catch2/catch_amalgamated.hpp>

#include "frobten/basis.hpp"
#include "frobten/koszul.hpp"
#include "frobten/polynomial.hpp"
#include "frobten/rational.hpp"

using namespace frobten;

TEST_CASE("rational parsing and formatting") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-6/8") == Rational(-3, 4));
  CHECK(parse_rational("5") == Rational(5));
  CHECK(parse_rational("0/7") == 0);
  CHECK(rational_to_string(Rational(-3, 4)) == "-3/4");
  CHECK(rational_to_string(Rational(8, 2)) == "4");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
  CHECK(factorial(5) == 120);
  CHECK(factorial(0) == 1);
}

TEST_CASE("koszul sign basics") {
  // identity permutation on any parities
  CHECK(koszul_sign({0, 1, 2}, {1, 1, 1}) == 1);
  // swapping two odd elements
  CHECK(koszul_sign({1, 0}, {1, 1}) == -1);
  // swapping odd past even
  CHECK(koszul_sign({1, 0}, {1, 0}) == 1);
  CHECK(koszul_sign({1, 0}, {0, 0}) == 1);
  // 3-cycle of odds: two transpositions
  CHECK(koszul_sign({1, 2, 0}, {1, 1, 1}) == 1);
}

TEST_CASE("sorting with koszul sign") {
  auto odd = [](int) { return 1; };
  auto even = [](int) { return 0; };
  auto [s1, g1] = sort_with_koszul_sign({2, 1, 0}, odd);
  CHECK(s1 == std::vector<int>{0, 1, 2});
  CHECK(g1 == -1);  // reversal of 3 odds: 3 inversions
  auto [s2, g2] = sort_with_koszul_sign({2, 1, 0}, even);
  CHECK(g2 == 1);
  auto [s3, g3] = sort_with_koszul_sign({1, 1}, odd);
  CHECK(g3 == 0);  // repeated odd index kills the symmetric value
  auto [s4, g4] = sort_with_koszul_sign({1, 1}, even);
  CHECK(g4 == 1);
  // mixed parity: parity depends on value
  auto par = [](int a) { return a % 2; };
  auto [s5, g5] = sort_with_koszul_sign({3, 1, 2}, par);
  CHECK(s5 == std::vector<int>{1, 2, 3});
  CHECK(g5 == -1);  // 3 moves past 1 (odd-odd), 2 is even
}

TEST_CASE("unshuffle sign") {
  auto par = [](int a) { return a; };  // element value = parity
  // take the second of two odds to the front: one odd-odd swap
  CHECK(unshuffle_sign({1, 1}, {false, true}, par) == -1);
  CHECK(unshuffle_sign({1, 1}, {true, false}, par) == 1);
  CHECK(unshuffle_sign({0, 1}, {false, true}, par) == 1);
}

TEST_CASE("polynomial arithmetic") {
  auto x = Polynomial::var(0), y = Polynomial::var(1);
  auto p = x * x + Rational(2) * x * y + y * y;
  auto q = (x + y) * (x + y);
  CHECK(p == q);
  CHECK((p - q).is_zero());
  CHECK(p.total_degree() == 2);
  CHECK(p.truncated(1).is_zero());
  CHECK(p.coeff({{0, 1}, {1, 1}}) == 2);

  auto d = p.derivative(0);
  CHECK(d == Rational(2) * x + Rational(2) * y);

  auto val = p.substitute({{0, Rational(1)}, {1, Rational(2)}});
  CHECK(val.is_constant());
  CHECK(val.constant_term() == 9);

  auto comp = p.substitute_poly({{0, y}});  // x := y
  CHECK(comp == Rational(4) * y * y);

  CHECK(p.variables() == std::vector<int>{0, 1});
  CHECK(Polynomial(0).is_zero());
  CHECK(Polynomial(1).to_string() == "1");
  CHECK((x - y).to_string([](int v) { return std::string(1, char('x' + v)); })
        == "x - y");
}

TEST_CASE("exact matrix inverse") {
  std::vector<std::vector<Rational>> m = {{Rational(2), Rational(1)},
                                          {Rational(1), Rational(1)}};
  auto inv = invert_matrix(m);
  CHECK(inv[0][0] == 1);
  CHECK(inv[0][1] == -1);
  CHECK(inv[1][0] == -1);
  CHECK(inv[1][1] == 2);
  std::vector<std::vector<Rational>> sing = {{Rational(1), Rational(2)},
                                             {Rational(2), Rational(4)}};
  CHECK_THROWS_AS(invert_matrix(sing), std::runtime_error);
}

TEST_CASE("metric validation") {
  GradedBasis b = GradedBasis::even(2);
  Metric g({{Rational(0), Rational(1)}, {Rational(1), Rational(0)}}, b);
  CHECK(g.ginv[0][1] == 1);
  CHECK_THROWS(Metric({{Rational(0), Rational(1)}, {Rational(2), Rational(0)}}, b));
  GradedBasis mixed;
  mixed.parities = {0, 1};
  // pairing an even index with an odd one is forbidden
  CHECK_THROWS(Metric({{Rational(0), Rational(1)}, {Rational(1), Rational(0)}}, mixed));
  // odd-odd block is antisymmetric
  GradedBasis odd2;
  odd2.parities = {1, 1};
  CHECK_NOTHROW(Metric({{Rational(0), Rational(1)}, {Rational(-1), Rational(0)}}, odd2));
  CHECK_THROWS(Metric({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}, odd2));
}

TEST_CASE("graded basis labels") {
  GradedBasis b = GradedBasis::even(2);
  CHECK(b.label(1) == "x1");
  b.labels = {"e", "p"};
  CHECK(b.label(0) == "e");
  CHECK(b.all_even());
}
