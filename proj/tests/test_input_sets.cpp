#include "dualverify/errors.hpp"
#include "dualverify/input_sets.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace dualverify;
using namespace dualverify::testing;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// max over supports S with |S| <= k of v^T c + radius * sum_{i in S} |v_i|.
double enumerate_cardinality(const Vector& v, const Vector& center, double radius, Index k) {
  const Index n = v.size();
  double best = -1e300;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) > k) continue;
    double s = v.dot(center);
    for (Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) s += radius * std::abs(v(i));
    }
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

TEST_CASE("linear_max on boxes and balls") {
  const InputSet box(Box{vec({-1, 0}), vec({1, 2})});
  auto r = linear_max(box, vec({1, -1}));
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.argmax == vec({1, 0}));

  const InputSet l2(NormBall{Norm::L2, vec({0, 0}), 1.0});
  r = linear_max(l2, vec({3, 4}));
  CHECK(r.value == doctest::Approx(5.0));
  CHECK((r.argmax - vec({0.6, 0.8})).norm() < 1e-12);

  const InputSet l1(NormBall{Norm::L1, vec({1, 1}), 0.5});
  CHECK(linear_max(l1, vec({1, -3})).value == doctest::Approx(-2.0 + 1.5));
  const InputSet linf(NormBall{Norm::Linf, vec({0, 0}), 2.0});
  CHECK(linear_max(linf, vec({1, -3})).value == doctest::Approx(8.0));

  const InputSet card(CardinalityBall{vec({0, 0, 0}), 1.0, 1});
  r = linear_max(card, vec({1, -2, 0.5}));
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.argmax == vec({0, -1, 0}));

  CHECK_THROWS_AS(linear_max(box, vec({1})), ShapeError);
}

TEST_CASE("f0 adds the bias term") {
  const InputSet box(Box{vec({0}), vec({1})});
  Matrix w(1, 1);
  w << 2;
  const auto r = f0(vec({-1}), w, vec({3}), box);
  // max over x in [0,1] of 2x, plus 3
  CHECK(r.value == doctest::Approx(5.0));
  CHECK(r.argmax == vec({1}));
}

TEST_CASE("cardinality linear_max equals subset enumeration") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = std::uniform_int_distribution<Index>(1, 8)(rng);
    const Index k = std::uniform_int_distribution<Index>(0, std::min<Index>(3, n))(rng);
    const Vector c = random_vector(rng, n, 2.0);
    const double radius = uniform(rng, 0.0, 1.5);
    const Vector v = random_vector(rng, n, 3.0);
    const InputSet set(CardinalityBall{c, radius, k});
    const auto r = linear_max(set, v);
    CHECK(std::abs(r.value - enumerate_cardinality(v, c, radius, k)) <= 1e-12);
    CHECK(contains(set, r.argmax));
    CHECK(std::abs(v.dot(r.argmax) - r.value) <= 1e-12);
  }
}

TEST_CASE("support function is symmetric about the center") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector c = random_vector(rng, 4);
    const Vector v = random_vector(rng, 4);
    for (const InputSet& set : {InputSet(NormBall{Norm::L1, c, 0.7}),
                                InputSet(NormBall{Norm::L2, c, 0.7}),
                                InputSet(NormBall{Norm::Linf, c, 0.7}),
                                InputSet(CardinalityBall{c, 0.7, 2})}) {
      const double up = linear_max(set, v).value - v.dot(c);
      const double down = linear_max(set, Vector(-v)).value + v.dot(c);
      CHECK(up == doctest::Approx(down).epsilon(1e-12));
    }
  }
}

TEST_CASE("projection") {
  const InputSet box(Box{vec({0, 0}), vec({1, 1})});
  CHECK(project(box, vec({2, -1})) == vec({1, 0}));
  const InputSet l2(NormBall{Norm::L2, vec({0, 0}), 1.0});
  CHECK((project(l2, vec({3, 4})) - vec({0.6, 0.8})).norm() < 1e-12);
  const InputSet l1(NormBall{Norm::L1, vec({0, 0}), 1.0});
  CHECK((project(l1, vec({2, 0.5})) - vec({1, 0})).norm() < 1e-12);
  CHECK((project(l1, vec({1, 1})) - vec({0.5, 0.5})).norm() < 1e-12);
  const InputSet card(CardinalityBall{vec({0, 0, 0}), 1.0, 1});
  CHECK(project(card, vec({0.5, -3, 0.2})) == vec({0, -1, 0}));

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector c = random_vector(rng, 3);
    const Vector x = random_vector(rng, 3, 4.0);
    for (const InputSet& set : {InputSet(NormBall{Norm::L1, c, 0.5}),
                                InputSet(NormBall{Norm::L2, c, 0.5}),
                                InputSet(NormBall{Norm::Linf, c, 0.5}),
                                InputSet(CardinalityBall{c, 0.5, 2})}) {
      const Vector p = project(set, x);
      CHECK(contains(set, p, 1e-9));
      CHECK((project(set, p) - p).norm() < 1e-12);
    }
    // Euclidean projection is no farther than any sampled feasible point.
    const InputSet l1ball(NormBall{Norm::L1, c, 0.5});
    const double dist = (project(l1ball, x) - x).norm();
    for (int s = 0; s < 50; ++s) CHECK(dist <= (sample_point(l1ball, rng) - x).norm() + 1e-12);
  }
}

TEST_CASE("bounding box") {
  const Vector c = vec({1, -1});
  auto b = bounding_box(InputSet(NormBall{Norm::L1, c, 0.5}));
  CHECK(b.lower == vec({0.5, -1.5}));
  CHECK(b.upper == vec({1.5, -0.5}));
  b = bounding_box(InputSet(CardinalityBall{c, 0.5, 0}));
  CHECK(b.lower == c);
  CHECK(b.upper == c);
}

TEST_CASE("samples are feasible and invalid sets are rejected") {
  std::mt19937_64 rng(2);
  const Vector c = vec({0, 1, 2});
  for (const InputSet& set : {InputSet(Box{c, Vector(c.array() + 1.0)}),
                              InputSet(NormBall{Norm::L1, c, 0.5}),
                              InputSet(NormBall{Norm::L2, c, 0.5}),
                              InputSet(NormBall{Norm::Linf, c, 0.5}),
                              InputSet(CardinalityBall{c, 0.5, 2})}) {
    CHECK(contains(set, set.anchor()));
    for (int s = 0; s < 200; ++s) CHECK(contains(set, sample_point(set, rng)));
  }
  CHECK_THROWS(InputSet(Box{vec({1}), vec({0})}));
  CHECK_THROWS(InputSet(NormBall{Norm::L2, c, -1.0}));
  CHECK_THROWS(InputSet(CardinalityBall{c, 0.5, 4}));
  CHECK_THROWS(InputSet(Box{vec({0, 0}), vec({1})}));
}
