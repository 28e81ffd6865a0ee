#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "specq/calibration.hpp"
#include "helpers.hpp"

using namespace specq;
using testutil::Rand;
using testutil::ulp_tol;
using testutil::vec;

namespace {

Seminorm random_seminorm(Rand& rng, int dim) {
  auto support = rng.subset(dim);
  return Seminorm(dim, support, rng.weights(support.size()));
}

}  // namespace

TEST_CASE("eval picks the largest weighted coordinate over the support") {
  Seminorm p(3, {1, 2}, {1.0, 1.0});
  CHECK(p(vec({3.0, Complex(0.0, -4.0), 99.0})) == 4.0);

  Seminorm single(3, {1}, {2.0});
  CHECK(single(vec({0.0, 7.0, 7.0})) == 0.0);

  Seminorm full(3, {1, 2, 3}, {1.0, 1.0, 1.0});
  CHECK(full(vec({1.0, 1.0, 1.0})) == 1.0);

  Seminorm weighted(3, {1, 3}, {2.0, 0.5});
  double value = weighted(vec({Complex(1.0, 1.0), 9.0, Complex(0.0, 4.0)}));
  CHECK(value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("null space membership and accessors") {
  Seminorm p(4, {2, 4}, {3.0, 0.5}, "q");
  CHECK(p.dim() == 4);
  CHECK(p.label() == "q");
  CHECK(p.support() == std::vector<int>{2, 4});
  CHECK(p.support_size() == 2);
  CHECK(p.null_space_dim() == 2);
  CHECK_FALSE(p.full_support());
  CHECK(p.contains(2));
  CHECK_FALSE(p.contains(1));
  CHECK(p.weight_of(4) == 0.5);
  CHECK(p.weight_of(3) == 0.0);

  // Anything supported off {2,4} is null for p.
  CHECK(p(vec({5.0, 0.0, Complex(1.0, -2.0), 0.0})) == 0.0);
  CHECK_THROWS_AS(p(vec({1.0, 2.0})), std::invalid_argument);

  Seminorm full(2, {1, 2}, {1.0, 1.0});
  CHECK(full.full_support());
  CHECK(full.null_space_dim() == 0);
}

TEST_CASE("construction validates support and weights") {
  CHECK_THROWS_AS(Seminorm(3, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Seminorm(3, {1, 1}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Seminorm(3, {1}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Seminorm(3, {1}, {-2.0}), std::invalid_argument);
  CHECK_THROWS_AS(Seminorm(3, {0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Seminorm(3, {4}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Seminorm(3, {1, 2}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Seminorm(0, {1}, {1.0}), std::invalid_argument);

  // Entries are sorted by coordinate regardless of input order.
  Seminorm p(3, {3, 1}, {0.5, 2.0});
  CHECK(p.support() == std::vector<int>{1, 3});
  CHECK(p.weights() == std::vector<double>{2.0, 0.5});
}

TEST_CASE("relabeling keeps the functional, same_functional compares exactly") {
  Seminorm p(3, {1, 2}, {1.0, 2.0}, "a");
  Seminorm q = p.with_label("b");
  CHECK(q.label() == "b");
  CHECK(p.same_functional(q));
  Vector x = vec({Complex(1.0, 2.0), -3.0, 4.0});
  CHECK(p(x) == q(x));

  Seminorm r(3, {1, 2}, {1.0, 2.0 + 1e-12});
  CHECK_FALSE(p.same_functional(r));
  Seminorm s(3, {1, 3}, {1.0, 2.0});
  CHECK_FALSE(p.same_functional(s));
}

TEST_CASE("absolute homogeneity and triangle inequality on random vectors") {
  Rand rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = rng.integer(1, 8);
    Seminorm p = random_seminorm(rng, n);
    Vector x = rng.vector(n, 5.0);
    Vector y = rng.vector(n, 5.0);
    Complex alpha = rng.cplx(3.0);

    double lhs = p(Vector(alpha * x));
    double rhs = std::abs(alpha) * p(x);
    CHECK(std::abs(lhs - rhs) <= ulp_tol(std::max(lhs, rhs)));

    double sum = p(Vector(x + y));
    CHECK(sum <= p(x) + p(y) + ulp_tol(sum));
  }
}

TEST_CASE("compare reports minimal ratios and witnesses") {
  SUBCASE("strict domination across nested supports") {
    Seminorm p(2, {1}, {1.0});
    Seminorm q(2, {1, 2}, {1.0, 1.0});
    auto order = compare(p, q);
    CHECK(order.dominated);
    CHECK_FALSE(order.equivalent);
    CHECK(order.ratio == 1.0);
    CHECK(order.reverse_ratio == kInf);
  }
  SUBCASE("equal supports give two-sided ratios") {
    Seminorm p(2, {1, 2}, {2.0, 3.0});
    Seminorm q(2, {1, 2}, {1.0, 1.0});
    auto order = compare(p, q);
    CHECK(order.dominated);
    CHECK(order.equivalent);
    CHECK(order.ratio == 3.0);
    CHECK(order.reverse_ratio == 0.5);
  }
  SUBCASE("disjoint supports fail with a witness coordinate") {
    Seminorm p(2, {1}, {1.0});
    Seminorm q(2, {2}, {1.0});
    auto order = compare(p, q);
    CHECK_FALSE(order.dominated);
    REQUIRE(order.witness.has_value());
    CHECK(*order.witness == 1);
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(compare(Seminorm(2, {1}, {1.0}), Seminorm(3, {1}, {1.0})),
                    std::invalid_argument);
  }
}

TEST_CASE("compare is reflexive and transitive") {
  Rand rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    int n = rng.integer(2, 8);
    Seminorm p = random_seminorm(rng, n);
    auto self = compare(p, p);
    CHECK(self.dominated);
    CHECK(self.equivalent);
    CHECK(self.ratio == 1.0);
    CHECK(self.reverse_ratio == 1.0);

    // Build supports nested by construction so both hops dominate.
    auto sup_r = rng.subset(n);
    std::vector<int> sup_q;
    for (int c : sup_r)
      if (rng.coin()) sup_q.push_back(c);
    if (sup_q.empty()) sup_q.push_back(sup_r[0]);
    std::vector<int> sup_p;
    for (int c : sup_q)
      if (rng.coin()) sup_p.push_back(c);
    if (sup_p.empty()) sup_p.push_back(sup_q[0]);

    Seminorm a(n, sup_p, rng.weights(sup_p.size()));
    Seminorm b(n, sup_q, rng.weights(sup_q.size()));
    Seminorm c(n, sup_r, rng.weights(sup_r.size()));
    auto ab = compare(a, b);
    auto bc = compare(b, c);
    auto ac = compare(a, c);
    REQUIRE(ab.dominated);
    REQUIRE(bc.dominated);
    CHECK(ac.dominated);
    CHECK(ac.ratio <= ab.ratio * bc.ratio * (1.0 + 1e-12));
  }
}

TEST_CASE("the domination ratio bounds evaluation and is attained") {
  Rand rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    int n = rng.integer(2, 8);
    auto sup_q = rng.subset(n);
    std::vector<int> sup_p;
    for (int c : sup_q)
      if (rng.coin()) sup_p.push_back(c);
    if (sup_p.empty()) sup_p.push_back(sup_q[0]);
    Seminorm p(n, sup_p, rng.weights(sup_p.size()));
    Seminorm q(n, sup_q, rng.weights(sup_q.size()));
    auto order = compare(p, q);
    REQUIRE(order.dominated);

    for (int k = 0; k < 5; ++k) {
      Vector x = rng.vector(n, 3.0);
      CHECK(p(x) <= order.ratio * q(x) * (1.0 + 1e-12) + 1e-300);
    }

    // The ratio is attained at a scaled basis vector of the maximizing
    // coordinate.
    int best = sup_p[0];
    double best_ratio = 0.0;
    for (int c : sup_p) {
      double r = p.weight_of(c) / q.weight_of(c);
      if (r > best_ratio) {
        best_ratio = r;
        best = c;
      }
    }
    Vector x = Vector::Zero(n);
    x(best - 1) = 1.0 / q.weight_of(best);
    CHECK(std::abs(q(x) - 1.0) <= ulp_tol(1.0));
    CHECK(std::abs(p(x) - order.ratio) <= ulp_tol(order.ratio));
  }
}

TEST_CASE("q_equivalent matches members in both directions") {
  SUBCASE("weight changes on a shared support") {
    Calibration a({Seminorm(2, {1, 2}, {1.0, 1.0})});
    Calibration b({Seminorm(2, {1, 2}, {2.0, 3.0})});
    auto match = q_equivalent(a, b);
    CHECK(match.equivalent);
    CHECK(match.forward == std::vector<int>{0});
    CHECK(match.backward == std::vector<int>{0});
  }
  SUBCASE("an unmatched member fails the backward condition") {
    Calibration a({Seminorm(2, {1}, {1.0})});
    Calibration b({Seminorm(2, {1}, {1.0}), Seminorm(2, {1, 2}, {1.0, 1.0})});
    auto match = q_equivalent(a, b);
    CHECK_FALSE(match.equivalent);
    CHECK(match.forward == std::vector<int>{0});
    REQUIRE(match.backward.size() == 2);
    CHECK(match.backward[0] == 0);
    CHECK(match.backward[1] == -1);
  }
  SUBCASE("a family matches itself") {
    Calibration a({Seminorm(3, {1}, {1.0}), Seminorm(3, {1, 2}, {0.5, 2.0})});
    CHECK(q_equivalent(a, a).equivalent);
  }
  SUBCASE("dimension mismatch is rejected") {
    Calibration a({Seminorm(2, {1}, {1.0})});
    Calibration b({Seminorm(3, {1}, {1.0})});
    CHECK_THROWS_AS(q_equivalent(a, b), std::invalid_argument);
  }
}

TEST_CASE("q_equivalent behaves as an equivalence relation") {
  Rand rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    int n = rng.integer(2, 6);
    int count = rng.integer(1, 4);
    std::vector<Seminorm> base;
    for (int i = 0; i < count; ++i) base.push_back(random_seminorm(rng, n));
    // Same supports with rescaled weights stay pairwise equivalent.
    std::vector<Seminorm> scaled1, scaled2;
    for (const Seminorm& s : base) {
      scaled1.push_back(Seminorm(n, s.support(), rng.weights(s.support().size())));
      scaled2.push_back(Seminorm(n, s.support(), rng.weights(s.support().size())));
    }
    Calibration a(base), b(scaled1), c(scaled2);
    CHECK(q_equivalent(a, a).equivalent);
    auto ab = q_equivalent(a, b);
    auto ba = q_equivalent(b, a);
    CHECK(ab.equivalent == ba.equivalent);
    if (ab.equivalent && q_equivalent(b, c).equivalent) CHECK(q_equivalent(a, c).equivalent);
  }
}

TEST_CASE("seminorm_max is the pointwise maximum") {
  Rand rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    int n = rng.integer(1, 7);
    Seminorm a = random_seminorm(rng, n);
    Seminorm b = random_seminorm(rng, n);
    Seminorm m = seminorm_max(a, b);
    for (int c = 1; c <= n; ++c) {
      CHECK(m.contains(c) == (a.contains(c) || b.contains(c)));
      if (m.contains(c)) CHECK(m.weight_of(c) == std::max(a.weight_of(c), b.weight_of(c)));
    }
    for (int k = 0; k < 5; ++k) {
      Vector x = rng.vector(n, 2.0);
      CHECK(m(x) == std::max(a(x), b(x)));
    }
  }
  CHECK_THROWS_AS(seminorm_max(Seminorm(2, {1}, {1.0}), Seminorm(3, {1}, {1.0})),
                  std::invalid_argument);
}

TEST_CASE("seminorm_scale multiplies values") {
  Seminorm p(3, {1, 2}, {1.0, 2.0});
  Seminorm q = seminorm_scale(p, 2.5);
  Vector x = vec({Complex(1.0, -1.0), 3.0, 9.0});
  CHECK(q(x) == doctest::Approx(2.5 * p(x)).epsilon(1e-15));
  CHECK_THROWS_AS(seminorm_scale(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(seminorm_scale(p, -1.0), std::invalid_argument);
}

TEST_CASE("calibration flags, labels and lookup") {
  Calibration nested({Seminorm(3, {1}, {1.0}), Seminorm(3, {1, 2}, {1.0, 1.0}),
                      Seminorm(3, {1, 2, 3}, {1.0, 1.0, 1.0})},
                     "nested");
  CHECK(nested.dim() == 3);
  CHECK(nested.size() == 3);
  CHECK(nested.name() == "nested");
  CHECK(nested.separating());
  CHECK(nested.principal());
  CHECK(nested[0].label() == "p1");
  CHECK(nested[2].label() == "p3");
  CHECK(nested.find("p2") == 1);
  CHECK_FALSE(nested.find("p9").has_value());

  Calibration singletons({Seminorm(2, {1}, {1.0}), Seminorm(2, {2}, {1.0})});
  CHECK(singletons.separating());
  CHECK_FALSE(singletons.principal());

  Calibration partial({Seminorm(2, {1}, {1.0})});
  CHECK_FALSE(partial.separating());
  CHECK(partial.principal());

  Calibration mixed({Seminorm(2, {1}, {1.0}, "alpha"), Seminorm(2, {2}, {1.0})});
  CHECK(mixed[0].label() == "alpha");
  CHECK(mixed[1].label() == "p2");
  CHECK(mixed.find("alpha") == 0);

  CHECK_THROWS_AS(Calibration({}), std::invalid_argument);
  CHECK_THROWS_AS(Calibration({Seminorm(2, {1}, {1.0}), Seminorm(3, {1}, {1.0})}),
                  std::invalid_argument);
}

TEST_CASE("principal_closure adds pairwise maxima up to the cap") {
  SUBCASE("one max completes a two-member family") {
    Calibration p({Seminorm(2, {1}, {1.0}), Seminorm(2, {2}, {1.0})});
    auto closure = principal_closure(p);
    CHECK(closure.complete);
    CHECK(closure.generated == 1);
    REQUIRE(closure.calibration.size() == 3);
    CHECK(closure.calibration[2].support() == std::vector<int>{1, 2});
    CHECK(closure.calibration[2].weights() == std::vector<double>{1.0, 1.0});
    CHECK(closure.calibration.principal());
  }
  SUBCASE("a directed family is a fixpoint") {
    Calibration p({Seminorm(3, {1}, {1.0}), Seminorm(3, {1, 2}, {1.0, 1.0})});
    auto closure = principal_closure(p);
    CHECK(closure.complete);
    CHECK(closure.generated == 0);
    CHECK(closure.calibration.size() == 2);
  }
  SUBCASE("the cap truncates with a flag") {
    Calibration p({Seminorm(3, {1}, {1.0}), Seminorm(3, {2}, {1.0}), Seminorm(3, {3}, {1.0})});
    auto closure = principal_closure(p, 2);
    CHECK_FALSE(closure.complete);
    CHECK(closure.generated == 2);
    CHECK(closure.calibration.size() == 5);
  }
  SUBCASE("complete closures are directed and keep the originals") {
    Rand rng(43);
    for (int trial = 0; trial < 50; ++trial) {
      int n = rng.integer(2, 5);
      int count = rng.integer(1, 3);
      std::vector<Seminorm> members;
      for (int i = 0; i < count; ++i) members.push_back(random_seminorm(rng, n));
      Calibration p(members);
      auto closure = principal_closure(p);
      REQUIRE(closure.complete);
      CHECK(closure.calibration.principal());
      for (int i = 0; i < p.size(); ++i)
        CHECK(closure.calibration[i].same_functional(p[i]));
    }
  }
}

TEST_CASE("augmented_calibration merges scaled supports") {
  SUBCASE("direct merge") {
    Calibration p({Seminorm(2, {2}, {1.0})});
    Seminorm extra(2, {1}, {1.0});
    Calibration q = augmented_calibration(p, extra, {2.0});
    REQUIRE(q.size() == 1);
    CHECK(q[0].support() == std::vector<int>{1, 2});
    CHECK(q[0].weights() == std::vector<double>{2.0, 1.0});
  }
  SUBCASE("m = 1 over a dominating family stays equivalent") {
    Calibration p({Seminorm(3, {1, 2}, {1.0, 1.0}), Seminorm(3, {1, 2, 3}, {1.0, 1.0, 1.0})});
    Seminorm extra(3, {1}, {1.0});
    Calibration q = augmented_calibration(p, extra, {1.0});
    CHECK(q_equivalent(q, p).equivalent);
  }
  SUBCASE("cardinality is |m_values| * |P| in m-major order") {
    Calibration p({Seminorm(3, {1}, {1.0}), Seminorm(3, {2}, {1.0}), Seminorm(3, {3}, {1.0})});
    Seminorm extra(3, {1}, {1.0});
    Calibration q = augmented_calibration(p, extra, {1.0, 2.0, 4.0});
    REQUIRE(q.size() == 9);
    // Entry 3k is max(m_k * extra, p1): support {1} with weight max(m_k, 1).
    CHECK(q[0].support() == std::vector<int>{1});
    CHECK(q[0].weight_of(1) == 1.0);
    CHECK(q[3].weight_of(1) == 2.0);
    CHECK(q[6].weight_of(1) == 4.0);
    // Entry 3k+1 merges with p2: support {1,2}.
    CHECK(q[4].support() == std::vector<int>{1, 2});
    CHECK(q[4].weight_of(1) == 2.0);
    CHECK(q[4].weight_of(2) == 1.0);
  }
  SUBCASE("validation") {
    Calibration p({Seminorm(2, {1}, {1.0})});
    CHECK_THROWS_AS(augmented_calibration(p, Seminorm(3, {1}, {1.0}), {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(augmented_calibration(p, Seminorm(2, {1}, {1.0}), {}),
                    std::invalid_argument);
  }
}
