#include "dualverify/conjugates.hpp"
#include "dualverify/errors.hpp"
#include "dualverify/oracles.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace dualverify;
using namespace dualverify::testing;

namespace {

auto scalar(Activation type) {
  return [type](double y) { return reference_activation(type, y); };
}

ConjugateResult exact_for(Activation type, double lambda, double mu, double lo, double hi) {
  return conjugate(ActivationKind{type, 1}, lambda, mu, lo, hi);
}

}  // namespace

TEST_CASE("relu conjugate") {
  auto r = conjugate_relu(0, 1, -1, 2);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.argmax == 2.0);
  CHECK(conjugate_relu(1, 1, -1, 2).value == doctest::Approx(0.0));
  r = conjugate_relu(2, 1, 1, 3);
  CHECK(r.value == doctest::Approx(-1.0));
  CHECK(r.argmax == 1.0);
  CHECK_THROWS_AS(conjugate_relu(1, 1, 2, 1), InvalidIntervalError);
}

TEST_CASE("sigmoid conjugate") {
  CHECK(conjugate_sigmoid(0, 1, -2, 3).value == doctest::Approx(3.0));
  // Frozen from a 1e5-point grid.
  CHECK(conjugate_sigmoid(1, 0, -2, 3).value == doctest::Approx(-0.11920292202).epsilon(1e-9));
  const auto r = conjugate_sigmoid(4, 1, -3, 3);
  CHECK(r.value == doctest::Approx(-0.81029650729).epsilon(1e-9));
  CHECK(r.argmax == 3.0);
  CHECK_THROWS_AS(conjugate_sigmoid(1, 1, 0.5, 0.0), InvalidIntervalError);
}

TEST_CASE("tanh conjugate") {
  auto r = conjugate_tanh(0, -1, -2, 1);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.argmax == -2.0);
  CHECK(conjugate_tanh(1, 1, -2, 2).value == doctest::Approx(1.03597241992).epsilon(1e-9));
  // max over {+-3, +-arctanh(sqrt(1/2))}
  const double s = std::atanh(std::sqrt(0.5));
  double expected = -1e300;
  for (double y : {-3.0, 3.0, -s, s}) expected = std::max(expected, y - 2.0 * std::tanh(y));
  CHECK(conjugate_tanh(2, 1, -3, 3).value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.00989049262).epsilon(1e-9));
}

TEST_CASE("maxpool conjugate") {
  Vector mu(2), lo(2), hi(2);
  mu << 1, 1;
  lo << 0, 0;
  hi << 1, 1;
  auto r = conjugate_maxpool(0, mu, lo, hi);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.argmax == hi);

  mu << 0, 0;
  lo << 0, 2;
  hi << 1, 3;
  CHECK(conjugate_maxpool(1, mu, lo, hi).value == doctest::Approx(-2.0));

  mu << 1, 0;
  lo << 0, 0;
  hi << 2, 1;
  r = conjugate_maxpool(1, mu, lo, hi);
  CHECK(r.value == doctest::Approx(0.0));
  CHECK(r.value == doctest::Approx(mu.dot(r.argmax) - r.argmax.maxCoeff()));

  CHECK_THROWS_AS(conjugate_maxpool(1, mu, hi, lo), InvalidIntervalError);
  CHECK_THROWS_AS(conjugate_maxpool(1, Vector::Zero(3), lo, hi), ShapeError);
}

TEST_CASE("partition bound") {
  const auto sig = scalar(Activation::Sigmoid);
  CHECK(conjugate_general(sig, 0, 1, -1, 2, 1).value == doctest::Approx(2.0));
  CHECK_FALSE(conjugate_general(sig, 0, 1, -1, 2, 1).exact);
  CHECK(conjugate_general(sig, 1, 0, -2, 3, 1).value ==
        doctest::Approx(conjugate_sigmoid(1, 0, -2, 3).value));

  const auto th = scalar(Activation::Tanh);
  const double exact = conjugate_tanh(1, 1, -2, 2).value;
  const double b1 = conjugate_general(th, 1, 1, -2, 2, 1).value;
  const double b10 = conjugate_general(th, 1, 1, -2, 2, 10).value;
  const double b1000 = conjugate_general(th, 1, 1, -2, 2, 1000).value;
  CHECK(b1 >= b10);
  CHECK(b10 >= b1000);
  CHECK(b1000 >= exact);
  CHECK(b1000 - exact < 1e-3);
  CHECK_THROWS_AS(conjugate_general(th, 1, 1, -2, 2, 0), PreconditionError);
}

TEST_CASE("partition bound is monotone under doubling") {
  std::mt19937_64 rng(5);
  for (Activation type : {Activation::Sigmoid, Activation::Tanh, Activation::ELU}) {
    for (int i = 0; i < 200; ++i) {
      const double a = uniform(rng, -5, 5), b = uniform(rng, -5, 5);
      const double lo = std::min(a, b), hi = std::max(a, b);
      const double lambda = uniform(rng, -3, 3), mu = uniform(rng, -3, 3);
      double prev = conjugate_general(scalar(type), lambda, mu, lo, hi, 1).value;
      for (int pieces = 2; pieces <= 256; pieces *= 2) {
        const double next = conjugate_general(scalar(type), lambda, mu, lo, hi, pieces).value;
        CHECK(next <= prev + 1e-12);
        prev = next;
      }
      CHECK(prev >= exact_for(type, lambda, mu, lo, hi).value - 1e-12);
    }
  }
}

TEST_CASE("dispatch") {
  for (double lambda : {-1.5, 0.0, 0.7}) {
    const auto a = conjugate(ActivationKind::relu(), lambda, 0.3, -1, 2);
    const auto b = conjugate_relu(lambda, 0.3, -1, 2);
    CHECK(a.value == b.value);
    CHECK(a.argmax == b.argmax);
    CHECK(conjugate(ActivationKind::sigmoid(), lambda, 0.1, -1, 2).value ==
          conjugate_sigmoid(lambda, 0.1, -1, 2).value);
  }
  CHECK_THROWS_AS(conjugate(ActivationKind::maxpool(2), 1, 1, 0, 1), UnsupportedActivationError);
}

TEST_CASE("elu conjugate against the grid and the partition bound") {
  std::mt19937_64 rng(9);
  const auto elu = scalar(Activation::ELU);
  for (int i = 0; i < 300; ++i) {
    const double lambda = uniform(rng, -3, 3), mu = uniform(rng, -3, 3);
    const auto r = conjugate(ActivationKind::elu(), lambda, mu, -4, 4);
    const double grid = conjugate_grid(elu, lambda, mu, -4, 4, 100001);
    CHECK(r.value >= grid - 1e-12);
    CHECK(r.value - grid < 1e-3);
    CHECK(conjugate_general(elu, lambda, mu, -4, 4, 64).value >= r.value - 1e-12);
  }
}

TEST_CASE("degenerate interval returns the point value") {
  std::mt19937_64 rng(13);
  for (Activation type : {Activation::ReLU, Activation::Sigmoid, Activation::Tanh,
                          Activation::ELU, Activation::Identity}) {
    for (int i = 0; i < 50; ++i) {
      const double y = uniform(rng, -4, 4), lambda = uniform(rng, -2, 2), mu = uniform(rng, -2, 2);
      const auto r = exact_for(type, lambda, mu, y, y);
      CHECK(r.value == doctest::Approx(mu * y - lambda * activate(type, y)).epsilon(1e-14));
      CHECK(r.argmax == y);
    }
  }
}

TEST_CASE("analytic conjugates are sound and match the grid") {
  std::mt19937_64 rng(17);
  for (Activation type : {Activation::ReLU, Activation::Sigmoid, Activation::Tanh,
                          Activation::ELU, Activation::Identity}) {
    CAPTURE(static_cast<int>(type));
    for (int i = 0; i < 200; ++i) {
      const double a = uniform(rng, -6, 6), b = uniform(rng, -6, 6);
      const double lo = std::min(a, b), hi = std::max(a, b);
      const double lambda = uniform(rng, -3, 3), mu = uniform(rng, -3, 3);
      const auto r = exact_for(type, lambda, mu, lo, hi);
      CHECK(r.argmax >= lo);
      CHECK(r.argmax <= hi);
      CHECK(std::abs(r.value - (mu * r.argmax - lambda * activate(type, r.argmax))) < 1e-9);
      for (int s = 0; s < 100; ++s) {
        const double y = uniform(rng, lo, hi);
        CHECK(r.value >= mu * y - lambda * activate(type, y) - 1e-9);
      }
      const double grid = conjugate_grid(scalar(type), lambda, mu, lo, hi, 20001);
      CHECK(std::abs(r.value - grid) < 1e-3);
    }
  }
}
