#include <catch2/catch_amalgamated.hpp>

#include "frobten/frobenius.hpp"

using namespace frobten;

namespace {

// dim-2 model with flat identity d_0: Phi = x0^2 x1 / 2 + f(x1); every
// choice of f solves the associativity equations
FrobeniusModel<Rational> two_dim_model(const std::vector<Rational>& fcoeffs,
                                       int N) {
  GradedBasis b = GradedBasis::even(2);
  auto x0 = Polynomial::var(0), x1 = Polynomial::var(1);
  Polynomial phi = Rational(1, 2) * x0 * x0 * x1;
  Polynomial p1 = x1 * x1 * x1;
  for (auto& c : fcoeffs) {
    phi += c * p1;
    p1 *= x1;
  }
  FrobeniusModel<Rational> m;
  m.basis = b;
  m.metric = Metric({{Rational(0), Rational(1)}, {Rational(1), Rational(0)}}, b);
  m.correlators = correlators_from_potential(phi.truncated(N), b, N);
  m.identity = 0;
  return m;
}

FrobeniusModel<Rational> one_dim_cubic(Rational c3, int N) {
  GradedBasis b = GradedBasis::even(1);
  FrobeniusModel<Rational> m;
  m.basis = b;
  m.metric = Metric({{Rational(1)}}, b);
  m.correlators = CorrelatorFamily<Rational>(b, N);
  m.correlators.set({0, 0, 0}, c3);
  return m;
}

}  // namespace

TEST_CASE("wdvv and coherence hold for the two-dimensional family") {
  auto m = two_dim_model({Rational(1), Rational(-2, 3), Rational(5)}, 6);
  CHECK(wdvv_check(m).pass());
  CHECK(coherence_check(m).pass());
  CHECK(flat_identity_check(m).pass());
}

TEST_CASE("wdvv and coherence detect a broken model together") {
  auto m = two_dim_model({Rational(1)}, 6);
  // break associativity: x0^2 x1^2 term couples the identity direction
  m.correlators.set({0, 0, 1, 1}, Rational(1));
  auto w = wdvv_check(m);
  auto c = coherence_check(m);
  CHECK(!w.pass());
  CHECK(!c.pass());
  CHECK(!flat_identity_check(m).pass());
  CHECK(!w.violations.empty());
  CHECK(w.violations.front().lhs != w.violations.front().rhs);
}

TEST_CASE("wdvv reports no unverifiable entries") {
  auto m = two_dim_model({Rational(2)}, 5);
  auto r = wdvv_check(m);
  CHECK(r.complete());
  CHECK(r.status() == "pass");
}

TEST_CASE("operadic correlator on explicit small trees") {
  auto m = one_dim_cubic(Rational(3), 6);
  // one-vertex trees reproduce the plain correlators
  m.correlators.set({0, 0, 0, 0}, Rational(7));
  CHECK(operadic_correlator(m, one_vertex_tree(3), {0, 0, 0}) == 3);
  CHECK(operadic_correlator(m, one_vertex_tree(4), {0, 0, 0, 0}) == 7);
  // a single edge contracts two cubic vertices through g = (1)
  auto t = make_stable_tree(4, {0b1100});
  CHECK(operadic_correlator(m, t, {0, 0, 0, 0}) == 9);
  // two edges in a chain: C3^3
  auto t5 = make_stable_tree(5, {0b11000, 0b11100});
  CHECK(operadic_correlator(m, t5, {0, 0, 0, 0, 0}) == 27);
}

TEST_CASE("operadic correlator respects the Keel class") {
  // on an associative model all three one-edge 4-trees give the same value
  auto m = two_dim_model({Rational(1), Rational(4)}, 6);
  auto trees = enumerate_stable_trees(4, 1);
  REQUIRE(trees.size() == 3);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          std::vector<int> idx = {a, b, c, d};
          auto v0 = operadic_correlator(m, trees[0], idx);
          CHECK(operadic_correlator(m, trees[1], idx) == v0);
          CHECK(operadic_correlator(m, trees[2], idx) == v0);
        }
}

TEST_CASE("operadic correlator kills Keel relations at n=5") {
  auto m = two_dim_model({Rational(1, 2), Rational(3)}, 6);
  // relation built from tails 1,2,3,4 of the 5-marked space
  const int n = 5;
  std::vector<std::pair<StableTree, int>> rel;
  uint32_t full = full_mask(n);
  for (uint32_t mask = 0; mask <= full; ++mask) {
    if (!valid_split(mask, n)) continue;
    auto in = [&](uint32_t side, int x) { return (side >> x) & 1u; };
    uint32_t a = mask, b = full & ~mask;
    bool sep1234 = (in(a, 1) && in(a, 2) && in(b, 3) && in(b, 4)) ||
                   (in(b, 1) && in(b, 2) && in(a, 3) && in(a, 4));
    bool sep1324 = (in(a, 1) && in(a, 3) && in(b, 2) && in(b, 4)) ||
                   (in(b, 1) && in(b, 3) && in(a, 2) && in(a, 4));
    if (sep1234) rel.emplace_back(make_stable_tree(n, {mask}), 1);
    if (sep1324) rel.emplace_back(make_stable_tree(n, {mask}), -1);
  }
  REQUIRE(!rel.empty());
  for_each_sorted_tuple(2, 5, m.basis, [&](const std::vector<int>& idx) {
    Rational acc = 0;
    for (auto& [t, sgn] : rel)
      acc += Rational(sgn) * operadic_correlator(m, t, idx);
    CHECK(acc == 0);
  });
}

TEST_CASE("operadic flat identity against stabilization") {
  auto m = two_dim_model({Rational(2), Rational(-1)}, 6);
  // trees where the last tail sits on a 3-valent vertex: contraction case
  for (auto& t : enumerate_stable_trees(5, 1))
    CHECK(operadic_flat_identity_check(m, t).pass());
  for (auto& t : enumerate_stable_trees(5, 2))
    CHECK(operadic_flat_identity_check(m, t).pass());
  CHECK(operadic_flat_identity_check(m, one_vertex_tree(5)).pass());
}

TEST_CASE("euler structure for the quasi-homogeneous family") {
  // Phi = x0^2 x1/2 + c x1^k with E = x0 d0 + w x1 d1, w = 2/(k-1)
  for (int k : {3, 4, 5}) {
    std::vector<Rational> coeffs(k - 2, Rational(0));
    coeffs[k - 3] = Rational(7, 3);
    auto m = two_dim_model(coeffs, 6);
    Rational w = Rational(2) / (k - 1);
    EulerData e;
    e.d = {{Rational(1), Rational(0)}, {Rational(0), w}};
    e.r = {Rational(0), Rational(0)};
    e.D = 1 + w;
    e.d0 = 1;
    m.euler = e;
    CHECK(conformality_check(m).pass());
    CHECK(v_skewness_check(m).pass());
    auto q = quasi_homogeneity_check(m);
    CHECK(q.pass());
    CHECK(q.complete());  // r = 0: every arity verifiable
    // operadic version across small trees
    CHECK(operadic_quasi_homogeneity_check(m, one_vertex_tree(3)).pass());
    CHECK(operadic_quasi_homogeneity_check(m, one_vertex_tree(4)).pass());
    for (auto& t : enumerate_stable_trees(5, 1))
      CHECK(operadic_quasi_homogeneity_check(m, t).pass());
  }
}

TEST_CASE("constant euler part marks the top arity unverifiable") {
  // Y_n = 1 for all n with E = d/dx: the shift eats one order
  const int N = 5;
  GradedBasis b = GradedBasis::even(1);
  FrobeniusModel<Rational> m;
  m.basis = b;
  m.metric = Metric({{Rational(1)}}, b);
  m.correlators = CorrelatorFamily<Rational>(b, N);
  for (int n = 3; n <= N; ++n)
    m.correlators.set(std::vector<int>(n, 0), Rational(1));
  EulerData e;
  e.d = {{Rational(0)}};
  e.r = {Rational(1)};
  e.D = 0;
  e.d0 = 1;
  m.euler = e;
  auto q = quasi_homogeneity_check(m);
  CHECK(q.pass());
  CHECK(!q.complete());
  CHECK(q.status() == "partial");
  REQUIRE(q.unverifiable.size() == 1);
  // breaking a correlator is caught at the verifiable arities
  m.correlators.set({0, 0, 0, 0}, Rational(2));
  CHECK(!quasi_homogeneity_check(m).pass());
}

TEST_CASE("higher products") {
  auto m = one_dim_cubic(Rational(5), 5);
  m.correlators.set({0, 0, 0, 0}, Rational(11));
  auto p2 = higher_product(m, {0, 0});
  REQUIRE(p2.size() == 1);
  CHECK(p2[0] == 5);
  auto p3 = higher_product(m, {0, 0, 0});
  CHECK(p3[0] == 11);
  CHECK_THROWS(higher_product(m, {0, 0, 0, 0, 0}));
}

TEST_CASE("graded correlator path agrees with the even fast path") {
  // run the graded evaluation code on an even model by marking the basis
  // through a graded twin with the same parities: compare against a
  // structurally odd basis carrying only even-parity data
  auto m = two_dim_model({Rational(3)}, 6);
  // trick: a model with an odd direction whose correlators vanish; the
  // graded path must reproduce the even values on the even sub-basis
  GradedBasis b;
  b.parities = {0, 0, 1, 1};
  FrobeniusModel<Rational> g;
  g.basis = b;
  g.metric = Metric({{Rational(0), Rational(1), Rational(0), Rational(0)},
                     {Rational(1), Rational(0), Rational(0), Rational(0)},
                     {Rational(0), Rational(0), Rational(0), Rational(1)},
                     {Rational(0), Rational(0), Rational(-1), Rational(0)}},
                    b);
  g.correlators = CorrelatorFamily<Rational>(b, 6);
  for (int n = 3; n <= 6; ++n)
    for (auto& [k, v] : m.correlators.stored(n)) g.correlators.set(k, v);
  auto t = make_stable_tree(4, {0b1100});
  for (int a = 0; a < 2; ++a)
    for (int bb = 0; bb < 2; ++bb)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          std::vector<int> idx = {a, bb, c, d};
          CHECK(operadic_correlator(g, t, idx) ==
                operadic_correlator(m, t, idx));
        }
}

TEST_CASE("model validation") {
  auto m = two_dim_model({Rational(1)}, 5);
  m.identity = 5;
  CHECK_THROWS(validate_model(m));
  m.identity = 0;
  EulerData e;
  e.d = {{Rational(1)}};
  e.r = {Rational(0)};
  m.euler = e;
  CHECK_THROWS(validate_model(m));
}
