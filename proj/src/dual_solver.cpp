#include "dualverify/dual_solver.hpp"

#include "dualverify/conjugates.hpp"
#include "dualverify/errors.hpp"

#include <cmath>
#include <limits>

namespace dualverify {

DualVariables DualVariables::zeros(const Network& net) {
  DualVariables duals;
  const std::size_t layers = net.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    duals.mu.push_back(Vector::Zero(net.layer(l).pre_width()));
    if (l + 1 < layers) {
      duals.lambda.push_back(Vector::Zero(net.layer(l).output_width()));
    }
  }
  return duals;
}

bool DualVariables::same_shape(const DualVariables& other) const {
  if (lambda.size() != other.lambda.size() || mu.size() != other.mu.size()) return false;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i].size() != other.lambda[i].size()) return false;
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i].size() != other.mu[i].size()) return false;
  }
  return true;
}

double DualVariables::max_abs() const {
  double m = 0.0;
  for (const Vector& v : lambda) {
    if (v.size() > 0) m = std::max(m, v.lpNorm<Eigen::Infinity>());
  }
  for (const Vector& v : mu) {
    if (v.size() > 0) m = std::max(m, v.lpNorm<Eigen::Infinity>());
  }
  return m;
}

void DualVariables::add_scaled(const DualVariables& other, double scale) {
  if (!same_shape(other)) throw ShapeError("dual variables differ in shape");
  for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] += scale * other.lambda[i];
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += scale * other.mu[i];
}

DualVariables DualVariables::mix(const DualVariables& a, const DualVariables& b,
                                 double theta) {
  if (!a.same_shape(b)) throw ShapeError("dual variables differ in shape");
  DualVariables out = a;
  for (std::size_t i = 0; i < a.lambda.size(); ++i) {
    out.lambda[i] = theta * a.lambda[i] + (1.0 - theta) * b.lambda[i];
  }
  for (std::size_t i = 0; i < a.mu.size(); ++i) {
    out.mu[i] = theta * a.mu[i] + (1.0 - theta) * b.mu[i];
  }
  return out;
}

namespace {

void check_inputs(const Network& net, const OutputConstraint& constraint, const InputSet& set,
                  const ActivationBounds& bounds, const DualVariables& duals) {
  if (constraint.c.size() != net.output_width()) {
    throw ShapeError("constraint has length " + std::to_string(constraint.c.size()) +
                     ", network output has width " + std::to_string(net.output_width()));
  }
  if (set.dimension() != net.input_width()) {
    throw ShapeError("input set dimension does not match the network input");
  }
  if (!bounds.consistent_with(net)) {
    throw PreconditionError("activation bounds are missing, mis-sized or unordered");
  }
  if (!duals.same_shape(DualVariables::zeros(net))) {
    throw ShapeError("dual variables do not match the network");
  }
}

}  // namespace

DualEvaluation dual_objective(const Network& net, const OutputConstraint& constraint,
                              const InputSet& set, const ActivationBounds& bounds,
                              const DualVariables& duals) {
  check_inputs(net, constraint, set, bounds, duals);
  const std::size_t layers = net.num_layers();

  DualEvaluation eval;
  eval.bound = constraint.d;
  eval.subgradient = DualVariables::zeros(net);
  eval.witness_pre.resize(layers);
  eval.witness_post.resize(layers);

  // Pre-activation terms: one conjugate per neuron (per block for maxpool).
  for (std::size_t l = 0; l < layers; ++l) {
    const Layer& layer = net.layer(l);
    const ActivationKind& kind = layer.activation();
    const Vector lambda = l + 1 == layers ? Vector(-constraint.c) : duals.lambda[l];
    const Vector& mu = duals.mu[l];
    const Vector& lo = bounds.prel[l];
    const Vector& hi = bounds.preu[l];
    Vector& z = eval.witness_pre[l];
    z.resize(layer.pre_width());
    if (kind.type == Activation::MaxPool) {
      const Index g = kind.group_size;
      for (Index k = 0; k < lambda.size(); ++k) {
        const auto r = conjugate_maxpool(lambda(k), mu.segment(k * g, g), lo.segment(k * g, g),
                                         hi.segment(k * g, g));
        eval.bound += r.value;
        z.segment(k * g, g) = r.argmax;
      }
    } else {
      for (Index k = 0; k < lambda.size(); ++k) {
        const auto r = conjugate(kind, lambda(k), mu(k), lo(k), hi(k));
        eval.bound += r.value;
        z(k) = r.argmax;
      }
    }
  }

  // Input term.
  {
    const Layer& first = net.layer(0);
    auto r = f0(duals.mu[0], first.weights(), first.bias(), set);
    eval.bound += r.value;
    eval.witness_post[0] = std::move(r.argmax);
  }

  // Hidden post-activation terms, maximized at box corners. Zero coefficients
  // take the lower corner.
  for (std::size_t l = 1; l < layers; ++l) {
    const Layer& layer = net.layer(l);
    const Vector& mu = duals.mu[l];
    const Vector coef = duals.lambda[l - 1] - layer.weights().transpose() * mu;
    Vector x(coef.size());
    for (Index k = 0; k < coef.size(); ++k) {
      x(k) = coef(k) > 0.0 ? bounds.postu[l](k) : bounds.postl[l](k);
    }
    eval.bound += coef.dot(x) - layer.bias().dot(mu);
    eval.witness_post[l] = std::move(x);
  }

  // Subgradients: the relaxed constraint residuals at the maximizers.
  for (std::size_t l = 0; l < layers; ++l) {
    const Layer& layer = net.layer(l);
    eval.subgradient.mu[l] =
        eval.witness_pre[l] - layer.weights() * eval.witness_post[l] - layer.bias();
    if (l + 1 < layers) {
      eval.subgradient.lambda[l] =
          eval.witness_post[l + 1] - activation_eval(layer.activation(), eval.witness_pre[l]);
    }
  }
  return eval;
}

DualSolveResult minimize_dual(const Network& net, const OutputConstraint& constraint,
                              const InputSet& set, const ActivationBounds& bounds,
                              const DualConfig& config) {
  if (config.iterations < 0) {
    throw PreconditionError("iterations must be non-negative");
  }
  if (!(config.step0 > 0.0) || !std::isfinite(config.step0)) {
    throw PreconditionError("step size must be positive");
  }
  DualSolveResult result;
  result.best_bound = std::numeric_limits<double>::infinity();
  result.history.reserve(static_cast<std::size_t>(config.iterations) + 1);

  DualVariables duals = DualVariables::zeros(net);
  for (int t = 0; t <= config.iterations; ++t) {
    const DualEvaluation eval = dual_objective(net, constraint, set, bounds, duals);
    if (eval.bound < result.best_bound) {
      result.best_bound = eval.bound;
      result.best_duals = duals;
    }
    result.history.push_back(result.best_bound);
    if (t == config.iterations) break;

    const double g_inf = eval.subgradient.max_abs();
    if (g_inf == 0.0) {
      // Zero subgradient: the current point minimizes the convex objective.
      result.history.resize(static_cast<std::size_t>(config.iterations) + 1, result.best_bound);
      break;
    }
    double step = config.step0;
    if (config.schedule == StepSchedule::InverseSqrt) {
      step /= std::sqrt(static_cast<double>(t) + 1.0);
    }
    duals.add_scaled(eval.subgradient, -step / (1.0 + g_inf));
  }
  return result;
}

bool convexity_probe(const Network& net, const OutputConstraint& constraint,
                     const InputSet& set, const ActivationBounds& bounds,
                     const DualVariables& a, const DualVariables& b, double tol) {
  const double ga = dual_objective(net, constraint, set, bounds, a).bound;
  const double gb = dual_objective(net, constraint, set, bounds, b).bound;
  for (const double theta : {0.25, 0.5, 0.75}) {
    const double gm =
        dual_objective(net, constraint, set, bounds, DualVariables::mix(a, b, theta)).bound;
    if (gm > theta * ga + (1.0 - theta) * gb + tol) return false;
  }
  return true;
}

}  // namespace dualverify
