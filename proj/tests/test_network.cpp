#include "dualverify/errors.hpp"
#include "dualverify/network.hpp"
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

}  // namespace

TEST_CASE("forward on a single relu layer") {
  Matrix w(1, 2);
  w << 1, -1;
  const Network net({Layer(w, Vector::Zero(1), ActivationKind::relu())});
  const Trace trace = forward(net, vec({1.0, 0.5}));
  CHECK(trace.pre[0](0) == doctest::Approx(0.5));
  CHECK(trace.post[1](0) == doctest::Approx(0.5));
  CHECK(trace.post[0] == vec({1.0, 0.5}));
}

TEST_CASE("forward with zero weights gives zero activations") {
  const Network net({Layer(Matrix::Zero(3, 2), Vector::Zero(3), ActivationKind::relu()),
                     Layer(Matrix::Zero(2, 3), Vector::Zero(2), ActivationKind::relu())});
  const Trace trace = forward(net, vec({4.0, -7.0}));
  for (std::size_t l = 1; l < trace.post.size(); ++l) CHECK(trace.post[l].isZero(0.0));
  for (const auto& z : trace.pre) CHECK(z.isZero(0.0));
}

TEST_CASE("forward agrees with an independent evaluator and is deterministic") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Network net = random_network(rng, 3, 3, 6, all_activations(), 2);
    const Vector x = random_vector(rng, 3, 2.0);
    const Trace a = forward(net, x);
    const Trace b = forward(net, x);
    CHECK((a.output() - reference_forward(net, x)).lpNorm<Eigen::Infinity>() < 1e-12);
    for (std::size_t l = 0; l < a.pre.size(); ++l) {
      CHECK(a.pre[l] == b.pre[l]);
      CHECK(a.post[l + 1] ==
            activation_eval(net.layer(l).activation(), a.pre[l]));  // post = h(pre)
      CHECK((a.pre[l] - (net.layer(l).weights() * a.post[l] + net.layer(l).bias())).norm() ==
            0.0);
    }
  }
}

TEST_CASE("forward rejects dimension mismatch") {
  const Network net({Layer(Matrix::Ones(1, 2), Vector::Zero(1), ActivationKind::tanh())});
  CHECK_THROWS_AS(forward(net, vec({1.0})), ShapeError);
}

TEST_CASE("activation_eval") {
  CHECK(activation_eval(ActivationKind::relu(), vec({-1, 2})) == vec({0, 2}));
  CHECK(activation_eval(ActivationKind::maxpool(2), vec({1, 3, -2, -5})) == vec({3, -2}));
  CHECK(activation_eval(ActivationKind::sigmoid(), vec({0}))(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(activation_eval(ActivationKind::maxpool(2), vec({1, 2, 3})), ShapeError);
}

TEST_CASE("activation derivatives") {
  CHECK(activation_derivs(ActivationKind::sigmoid(), vec({0}), 1)(0) == doctest::Approx(0.25));
  CHECK(activation_derivs(ActivationKind::tanh(), vec({0}), 2)(0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(activation_derivs(ActivationKind::relu(), vec({0}), 1),
                  UnsupportedActivationError);
  CHECK_THROWS_AS(activation_derivs(ActivationKind::maxpool(2), vec({0, 1}), 1),
                  UnsupportedActivationError);

  const double h = 1e-5;
  const double fd = (activate(Activation::Sigmoid, 1.0 + h) - activate(Activation::Sigmoid, 1.0 - h)) /
                    (2 * h);
  CHECK(activation_derivative(Activation::Sigmoid, 1.0, 1) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("first and second derivatives match central differences") {
  std::mt19937_64 rng(11);
  const double h = 1e-5;
  for (Activation type : {Activation::Sigmoid, Activation::Tanh, Activation::ELU,
                          Activation::Identity}) {
    for (int i = 0; i < 1000; ++i) {
      double y = uniform(rng, -6.0, 6.0);
      if (type == Activation::ELU && std::abs(y) < 2 * h) y = 0.5;  // kink of h'
      const double d1 = (activate(type, y + h) - activate(type, y - h)) / (2 * h);
      CHECK(std::abs(activation_derivative(type, y, 1) - d1) < 1e-5);
      const double d2 = (activation_derivative(type, y + h, 1) -
                         activation_derivative(type, y - h, 1)) / (2 * h);
      CHECK(std::abs(activation_derivative(type, y, 2) - d2) < 1e-5);
      if (type != Activation::ELU) {
        const double d3 = (activation_derivative(type, y + h, 2) -
                           activation_derivative(type, y - h, 2)) / (2 * h);
        CHECK(std::abs(activation_derivative(type, y, 3) - d3) < 1e-5);
      }
    }
  }
}

TEST_CASE("smoothness constants") {
  // Grid maxima frozen from an independent numpy evaluation on the same grid.
  CHECK(grid_sup_abs_derivative(Activation::Tanh, 2) == doctest::Approx(0.7698003588).epsilon(1e-9));
  CHECK(grid_sup_abs_derivative(Activation::Sigmoid, 2) ==
        doctest::Approx(0.0962250449).epsilon(1e-9));
  CHECK(grid_sup_abs_derivative(Activation::Tanh, 3) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(grid_sup_abs_derivative(Activation::Sigmoid, 3) == doctest::Approx(0.125).epsilon(1e-8));

  const auto tanh = smoothness_constants(ActivationKind::tanh());
  CHECK(tanh.gamma == doctest::Approx(kSmoothnessSafety * 0.7698003588));
  CHECK(tanh.eta == doctest::Approx(kSmoothnessSafety * 2.0));
  // Closed forms: sup|tanh''| = 4 / (3 sqrt 3), sup|sigmoid''| = sqrt(3) / 18.
  CHECK(tanh.gamma >= 4.0 / (3.0 * std::sqrt(3.0)));
  CHECK(smoothness_constants(ActivationKind::sigmoid()).gamma >= std::sqrt(3.0) / 18.0);

  const auto id = smoothness_constants(ActivationKind::identity());
  CHECK(id.gamma == 0.0);
  CHECK(id.eta == 0.0);
  CHECK_THROWS_AS(smoothness_constants(ActivationKind::elu()), UnsupportedActivationError);
  CHECK_THROWS_AS(smoothness_constants(ActivationKind::relu()), UnsupportedActivationError);
}

TEST_CASE("network construction enforces shape chaining") {
  CHECK_THROWS_AS(Layer(Matrix::Ones(2, 2), Vector::Zero(3), ActivationKind::relu()), ShapeError);
  CHECK_THROWS_AS(Layer(Matrix::Ones(3, 2), Vector::Zero(3), ActivationKind::maxpool(2)),
                  ShapeError);
  CHECK_THROWS_AS(ActivationKind::maxpool(1), PreconditionError);
  CHECK_THROWS_AS(Network({}), ShapeError);
  CHECK_THROWS_AS(Network({Layer(Matrix::Ones(4, 2), Vector::Zero(4), ActivationKind::maxpool(2)),
                           Layer(Matrix::Ones(1, 4), Vector::Zero(1), ActivationKind::identity())}),
                  ShapeError);
  const Network ok({Layer(Matrix::Ones(4, 2), Vector::Zero(4), ActivationKind::maxpool(2)),
                    Layer(Matrix::Ones(1, 2), Vector::Zero(1), ActivationKind::identity())});
  CHECK(ok.output_width() == 1);
  Matrix bad = Matrix::Ones(1, 1);
  bad(0, 0) = std::nan("");
  CHECK_THROWS(Layer(bad, Vector::Zero(1), ActivationKind::relu()));
}

TEST_CASE("network JSON round trip") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Network net = random_network(rng, 2, 3, 5, all_activations(), 3);
    CHECK(load_network(save_network(net)) == net);
  }
}

TEST_CASE("network JSON format contract") {
  const Network net = load_network(
      R"({"layers": [{"weights": [[1, 2]], "bias": [0.5], "activation": "relu"},
                     {"weights": [[1],[2]], "bias": [0, 0], "activation": {"maxpool": 2}}]})");
  CHECK(net.layer(0).activation() == ActivationKind::relu());
  CHECK(net.layer(1).activation() == ActivationKind::maxpool(2));
  CHECK(net.output_width() == 1);

  CHECK_THROWS_AS(load_network(R"({"layers": [{"weights": [[1, 2]], "bias": [0, 1],
                                                "activation": "relu"}]})"),
                  ShapeError);
  CHECK_THROWS_AS(load_network("{not json"), FormatError);
  CHECK_THROWS_AS(load_network(R"({"layers": [{"weights": [[1]], "bias": [0],
                                                "activation": "swish"}]})"),
                  FormatError);
  CHECK_THROWS_AS(load_network(R"({"layers": []})"), ShapeError);
}
