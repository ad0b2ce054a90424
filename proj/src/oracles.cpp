#include "dualverify/oracles.hpp"

#include "dualverify/errors.hpp"

#include <cmath>
#include <limits>

namespace dualverify {

namespace {

void check_constraint(const Network& net, const OutputConstraint& constraint) {
  if (constraint.c.size() != net.output_width()) {
    throw ShapeError("constraint length does not match the network output width");
  }
}

double activation_lipschitz(Activation type) {
  return type == Activation::Sigmoid ? 0.25 : 1.0;
}

// Visits every point of the uniform grid over the listed coordinates; the
// remaining coordinates keep their values in `x`.
template <class Fn>
void for_each_grid_point(Vector& x, const std::vector<Index>& axes, const Vector& lo,
                         const Vector& hi, int n, Fn&& fn, std::size_t depth = 0) {
  if (depth == axes.size()) {
    fn(x);
    return;
  }
  const Index a = axes[depth];
  for (int i = 0; i < n; ++i) {
    x(a) = i == n - 1 ? hi(a) : lo(a) + (hi(a) - lo(a)) * (static_cast<double>(i) / (n - 1));
    for_each_grid_point(x, axes, lo, hi, n, fn, depth + 1);
  }
}

}  // namespace

double objective_value(const Network& net, const OutputConstraint& constraint, const Vector& x) {
  check_constraint(net, constraint);
  return constraint.c.dot(forward(net, x).output()) + constraint.d;
}

Vector objective_gradient(const Network& net, const OutputConstraint& constraint,
                          const Vector& x) {
  check_constraint(net, constraint);
  const Trace trace = forward(net, x);
  Vector delta = constraint.c;
  for (std::size_t l = net.num_layers(); l-- > 0;) {
    const Layer& layer = net.layer(l);
    const ActivationKind& kind = layer.activation();
    const Vector& pre = trace.pre[l];
    Vector dpre = Vector::Zero(pre.size());
    switch (kind.type) {
      case Activation::MaxPool: {
        const Index g = kind.group_size;
        for (Index k = 0; k < delta.size(); ++k) {
          Index best = 0;
          pre.segment(k * g, g).maxCoeff(&best);
          dpre(k * g + best) = delta(k);
        }
        break;
      }
      case Activation::ReLU:
        for (Index k = 0; k < pre.size(); ++k) dpre(k) = pre(k) > 0.0 ? delta(k) : 0.0;
        break;
      default:
        dpre = delta.cwiseProduct(activation_derivs(kind, pre, 1));
        break;
    }
    delta = layer.weights().transpose() * dpre;
  }
  return delta;
}

double objective_lipschitz_bound(const Network& net, const OutputConstraint& constraint) {
  check_constraint(net, constraint);
  double bound = constraint.c.norm();
  for (const Layer& layer : net.layers()) {
    Eigen::JacobiSVD<Matrix> svd(layer.weights());
    bound *= svd.singularValues()(0) * activation_lipschitz(layer.activation().type);
  }
  return bound;
}

GridResult grid_oracle(const Network& net, const OutputConstraint& constraint,
                       const InputSet& set, int resolution) {
  check_constraint(net, constraint);
  const Index dim = set.dimension();
  if (dim != net.input_width()) {
    throw ShapeError("input set dimension does not match the network input");
  }
  if (dim > kMaxGridDimension) {
    throw PreconditionError("grid oracle refuses input dimension " + std::to_string(dim) +
                            " (maximum " + std::to_string(kMaxGridDimension) + ")");
  }
  if (resolution < 10) {
    throw PreconditionError("grid oracle needs at least 10 points per axis");
  }

  GridResult result;
  result.value = -std::numeric_limits<double>::infinity();
  auto visit = [&](const Vector& x) {
    const double v = objective_value(net, constraint, x);
    if (v > result.value) {
      result.value = v;
      result.argmax = x;
    }
  };
  visit(set.anchor());

  const Box box = bounding_box(set);
  result.spacing = (box.upper - box.lower).maxCoeff() / (resolution - 1);
  Index free_axes = dim;

  if (const auto* card = std::get_if<CardinalityBall>(&set.variant())) {
    // Each support of size <= k is gridded separately, others stay at the center.
    free_axes = card->k;
    std::vector<Index> support;
    auto recurse = [&](auto&& self, Index start) -> void {
      if (!support.empty()) {
        Vector x = card->center;
        for_each_grid_point(x, support, box.lower, box.upper, resolution, visit);
      }
      if (static_cast<Index>(support.size()) == card->k) return;
      for (Index i = start; i < dim; ++i) {
        support.push_back(i);
        self(self, i + 1);
        support.pop_back();
      }
    };
    recurse(recurse, 0);
  } else {
    std::vector<Index> axes;
    for (Index i = 0; i < dim; ++i) axes.push_back(i);
    Vector x = box.lower;
    for_each_grid_point(x, axes, box.lower, box.upper, resolution, [&](const Vector& p) {
      if (contains(set, p, 1e-12)) visit(p);
    });
  }
  result.error_bar = objective_lipschitz_bound(net, constraint) * result.spacing *
                     std::sqrt(static_cast<double>(free_axes));
  return result;
}

AttackResult pgd_attack(const Network& net, const OutputConstraint& constraint,
                        const InputSet& set, const AttackConfig& config) {
  check_constraint(net, constraint);
  if (config.steps < 0 || config.restarts < 1) {
    throw PreconditionError("attack needs steps >= 0 and restarts >= 1");
  }
  const Box box = bounding_box(set);
  const Vector half_width = 0.5 * (box.upper - box.lower);
  bool sign_steps = true;
  double radius = 0.0;
  if (const auto* ball = std::get_if<NormBall>(&set.variant())) {
    sign_steps = ball->p == Norm::Linf;
    radius = ball->radius;
  }

  AttackResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < config.restarts; ++r) {
    std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(r));
    Vector x = r == 0 ? set.anchor() : sample_point(set, rng);
    auto consider = [&](const Vector& p, int step) {
      const double v = objective_value(net, constraint, p);
      if (v > best.value) {
        best.value = v;
        best.x_adv = p;
        best.steps = step;
      }
    };
    consider(x, 0);
    for (int t = 0; t < config.steps; ++t) {
      const Vector g = objective_gradient(net, constraint, x);
      const double scale =
          config.step_size * std::max(0.05, 1.0 - static_cast<double>(t) / config.steps);
      if (sign_steps) {
        x += scale * half_width.cwiseProduct(
                         g.unaryExpr([](double e) { return (e > 0.0) - (e < 0.0) + 0.0; }));
      } else {
        const double n = g.norm();
        if (n == 0.0) break;
        x += (scale * radius / n) * g;
      }
      x = project(set, x);
      consider(x, t + 1);
    }
  }
  return best;
}

double conjugate_grid(const std::function<double(double)>& h, double lambda, double mu,
                      double lower, double upper, int n) {
  if (lower > upper) {
    throw InvalidIntervalError("conjugate_grid interval is empty");
  }
  if (lower == upper) {
    return mu * lower - lambda * h(lower);
  }
  if (n < 2) {
    throw PreconditionError("conjugate_grid needs at least two samples");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double y =
        i == n - 1 ? upper : lower + (upper - lower) * (static_cast<double>(i) / (n - 1));
    best = std::max(best, mu * y - lambda * h(y));
  }
  return best;
}

}  // namespace dualverify
