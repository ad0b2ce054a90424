#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dualverify {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class Activation { ReLU, Sigmoid, Tanh, ELU, Identity, MaxPool };

// One activation per layer. group_size is meaningful only for MaxPool, where
// it is the length of each contiguous, non-overlapping pooling block.
struct ActivationKind {
  Activation type = Activation::Identity;
  Index group_size = 1;

  static ActivationKind relu() { return {Activation::ReLU, 1}; }
  static ActivationKind sigmoid() { return {Activation::Sigmoid, 1}; }
  static ActivationKind tanh() { return {Activation::Tanh, 1}; }
  static ActivationKind elu() { return {Activation::ELU, 1}; }
  static ActivationKind identity() { return {Activation::Identity, 1}; }
  static ActivationKind maxpool(Index group);

  bool is_componentwise() const { return type != Activation::MaxPool; }
  bool is_smooth() const;
  // Width after the activation for a pre-activation of width n.
  Index output_width(Index n) const;

  friend bool operator==(const ActivationKind&, const ActivationKind&) = default;
};

std::string to_string(const ActivationKind& kind);

// Scalar activation values and derivatives for component-wise kinds.
// ELU uses alpha = 1.
double activate(Activation type, double y);
// order in {1, 2, 3}. ReLU and MaxPool are rejected.
double activation_derivative(Activation type, double y, int order);

// Affine map followed by an activation: post = h(W * in + b).
class Layer {
 public:
  Layer(Matrix weights, Vector bias, ActivationKind activation);

  const Matrix& weights() const { return weights_; }
  const Vector& bias() const { return bias_; }
  const ActivationKind& activation() const { return activation_; }

  Index input_width() const { return weights_.cols(); }
  Index pre_width() const { return weights_.rows(); }
  Index output_width() const { return activation_.output_width(pre_width()); }

  friend bool operator==(const Layer&, const Layer&) = default;

 private:
  Matrix weights_;
  Vector bias_;
  ActivationKind activation_;
};

// Immutable feedforward network. Layer 0 consumes the input.
class Network {
 public:
  explicit Network(std::vector<Layer> layers);

  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(std::size_t l) const { return layers_.at(l); }
  std::size_t num_layers() const { return layers_.size(); }
  Index input_width() const { return layers_.front().input_width(); }
  Index output_width() const { return layers_.back().output_width(); }

  // The first `count` layers as a network of their own.
  Network prefix(std::size_t count) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<Layer> layers_;
};

// pre[l] = W(l) post[l] + b(l), post[l + 1] = h(l)(pre[l]).
struct Trace {
  std::vector<Vector> pre;
  std::vector<Vector> post;

  const Vector& output() const { return post.back(); }
};

Trace forward(const Network& net, const Vector& x);

Vector activation_eval(const ActivationKind& kind, const Vector& y);
Vector activation_derivs(const ActivationKind& kind, const Vector& y, int order);

// gamma = sup |h''|, eta = sup |h'''|, each scaled by kSmoothnessSafety.
struct SmoothnessConstants {
  double gamma = 0.0;
  double eta = 0.0;
};

inline constexpr double kSmoothnessSafety = 1.01;

// Grid maximum of |h^(order)| over [-10, 10] with 10^6 points, no safety factor.
double grid_sup_abs_derivative(Activation type, int order);

// Cached per activation; Sigmoid, Tanh and Identity only.
SmoothnessConstants smoothness_constants(const ActivationKind& kind);

std::string save_network(const Network& net);
Network load_network(const std::string& text);

}  // namespace dualverify
