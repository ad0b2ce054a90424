#pragma once

// Shared generators and independent reference evaluators for the test suites.

#include "dualverify/input_sets.hpp"
#include "dualverify/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace dualverify::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = uniform(rng, -scale, scale);
  }
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = uniform(rng, -scale, scale);
  return v;
}

// Random network: `layers` layers, hidden widths in [1, max_width], activations
// drawn from `pool` for hidden layers; the last layer is identity with
// `outputs` units.
inline Network random_network(std::mt19937_64& rng, Index input_width, int layers,
                              Index max_width, const std::vector<Activation>& pool,
                              Index outputs = 1) {
  std::vector<Layer> out;
  Index width = input_width;
  for (int l = 0; l < layers; ++l) {
    const bool last = l + 1 == layers;
    ActivationKind kind = ActivationKind::identity();
    Index pre = outputs;
    if (!last) {
      const Activation type =
          pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      pre = std::uniform_int_distribution<Index>(1, max_width)(rng);
      if (type == Activation::MaxPool) {
        const Index group = std::uniform_int_distribution<Index>(2, 3)(rng);
        const Index groups = std::max<Index>(1, pre / group);
        pre = groups * group;
        kind = ActivationKind::maxpool(group);
      } else {
        kind = ActivationKind{type, 1};
      }
    }
    out.emplace_back(random_matrix(rng, pre, width), random_vector(rng, pre, 0.5), kind);
    width = kind.output_width(pre);
  }
  return Network(std::move(out));
}

inline const std::vector<Activation>& all_activations() {
  static const std::vector<Activation> pool{Activation::ReLU, Activation::Sigmoid,
                                            Activation::Tanh, Activation::ELU,
                                            Activation::MaxPool};
  return pool;
}

// Scalar activation written out independently of the library.
inline double reference_activation(Activation type, double y) {
  switch (type) {
    case Activation::ReLU: return std::max(0.0, y);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-y));
    case Activation::Tanh: return std::tanh(y);
    case Activation::ELU: return y > 0.0 ? y : std::exp(y) - 1.0;
    default: return y;
  }
}

// Forward pass with explicit loops, for cross-checking.
inline Vector reference_forward(const Network& net, const Vector& x) {
  std::vector<double> cur(x.data(), x.data() + x.size());
  for (const Layer& layer : net.layers()) {
    std::vector<double> pre(static_cast<std::size_t>(layer.pre_width()));
    for (Index i = 0; i < layer.pre_width(); ++i) {
      double s = layer.bias()(i);
      for (Index j = 0; j < layer.input_width(); ++j) {
        s += layer.weights()(i, j) * cur[static_cast<std::size_t>(j)];
      }
      pre[static_cast<std::size_t>(i)] = s;
    }
    const ActivationKind& kind = layer.activation();
    std::vector<double> post;
    if (kind.type == Activation::MaxPool) {
      for (std::size_t g = 0; g < pre.size(); g += static_cast<std::size_t>(kind.group_size)) {
        double m = pre[g];
        for (std::size_t k = 1; k < static_cast<std::size_t>(kind.group_size); ++k) {
          m = std::max(m, pre[g + k]);
        }
        post.push_back(m);
      }
    } else {
      for (double v : pre) post.push_back(reference_activation(kind.type, v));
    }
    cur = std::move(post);
  }
  return Eigen::Map<Vector>(cur.data(), static_cast<Index>(cur.size()));
}

}  // namespace dualverify::testing
